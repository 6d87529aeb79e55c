#include "imbench/undersampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "imbench/errors.hpp"
#include "imbench/learners.hpp"
#include "imbench/neighbors.hpp"
#include "imbench/rng.hpp"

namespace imbench {

namespace {

std::size_t required_majority(const LabeledDataset& d, double target_ratio) {
    if (!(target_ratio > 0.0)) throw ResampleError("target_ratio must be positive");
    return static_cast<std::size_t>(
        std::ceil(static_cast<double>(d.minority_count()) / target_ratio));
}

LabeledDataset keep_rows(const LabeledDataset& d, std::vector<std::size_t> rows) {
    std::sort(rows.begin(), rows.end());
    return d.subset(rows);
}

Matrix gather(const LabeledDataset& d, const std::vector<std::size_t>& rows) {
    Matrix m(rows.size(), d.features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = d.features.row(rows[i]);
        std::copy(src.begin(), src.end(), m.row(i).begin());
    }
    return m;
}

// 1-NN label of `point` against the rows listed in `store`, ties to the
// lowest store position.
int one_nn_label(const LabeledDataset& d, const std::vector<std::size_t>& store,
                 std::span<const double> point) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_row = store.front();
    for (std::size_t row : store) {
        const double dist = squared_distance(point, d.features.row(row));
        if (dist < best) {
            best = dist;
            best_row = row;
        }
    }
    return d.labels[best_row];
}

// One batch ENN editing pass: returns the surviving subset of `current`
// (original row ids, order preserved). Only majority rows are candidates for
// removal; neighbourhoods are k-NN over the whole current set, self excluded.
std::vector<std::size_t> enn_pass(const LabeledDataset& d, const std::vector<std::size_t>& current,
                                  std::size_t k, EditCriterion criterion, bool* removed_any) {
    *removed_any = false;
    if (current.size() < 2) return current;
    const std::size_t k_eff = std::min(k, current.size() - 1);
    const Matrix points = gather(d, current);
    NeighborIndex index(points);

    std::vector<std::size_t> kept;
    kept.reserve(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
        const std::size_t row = current[i];
        if (d.labels[row] != kMajorityLabel) {
            kept.push_back(row);
            continue;
        }
        const auto nn = index.query_excluding(i, k_eff);
        std::size_t disagree = 0;
        for (const auto& nb : nn) {
            if (d.labels[current[nb.index]] != kMajorityLabel) ++disagree;
        }
        const bool remove = criterion == EditCriterion::mode ? 2 * disagree > k_eff
                                                             : disagree > 0;
        if (remove) {
            *removed_any = true;
        } else {
            kept.push_back(row);
        }
    }
    return kept;
}

std::size_t count_label(const LabeledDataset& d, const std::vector<std::size_t>& rows,
                        int label) {
    std::size_t n = 0;
    for (std::size_t r : rows) {
        if (d.labels[r] == label) ++n;
    }
    return n;
}

} // namespace

LabeledDataset random_undersample(const LabeledDataset& d, double target_ratio,
                                  std::uint64_t seed) {
    d.validate();
    const std::size_t keep = required_majority(d, target_ratio);
    auto majority = d.indices_of(kMajorityLabel);
    if (keep > majority.size()) {
        throw ResampleError("target_ratio requires " + std::to_string(keep) +
                            " majority rows but only " + std::to_string(majority.size()) +
                            " exist");
    }
    Rng rng(seed);
    rng.shuffle(majority);
    std::vector<std::size_t> rows(majority.begin(), majority.begin() + keep);
    const auto minority = d.indices_of(kMinorityLabel);
    rows.insert(rows.end(), minority.begin(), minority.end());
    return keep_rows(d, std::move(rows));
}

LabeledDataset condensed_nn(const LabeledDataset& d, std::size_t n_seeds, std::uint64_t seed) {
    d.validate();
    auto store = d.indices_of(kMinorityLabel);
    auto majority = d.indices_of(kMajorityLabel);
    Rng rng(seed);
    rng.shuffle(majority);

    const std::size_t seeds = std::min(std::max<std::size_t>(n_seeds, 1), majority.size());
    store.insert(store.end(), majority.begin(), majority.begin() + seeds);
    std::vector<std::size_t> remaining(majority.begin() + seeds, majority.end());

    // passes over the remaining majority in the shuffled order; a sample
    // misclassified by 1-NN on the current store transfers into the store
    bool transferred = true;
    while (transferred && !remaining.empty()) {
        transferred = false;
        std::vector<std::size_t> still_out;
        still_out.reserve(remaining.size());
        for (std::size_t row : remaining) {
            if (one_nn_label(d, store, d.features.row(row)) != d.labels[row]) {
                store.push_back(row);
                transferred = true;
            } else {
                still_out.push_back(row);
            }
        }
        remaining.swap(still_out);
    }
    return keep_rows(d, std::move(store));
}

LabeledDataset edited_nn(const LabeledDataset& d, std::size_t k_neighbors,
                         EditCriterion criterion, EnnMode mode, std::size_t max_iter) {
    d.validate();
    if (k_neighbors == 0) throw ResampleError("k_neighbors must be >= 1");
    std::vector<std::size_t> current(d.size());
    std::iota(current.begin(), current.end(), std::size_t{0});
    bool removed = false;

    switch (mode) {
    case EnnMode::single:
        current = enn_pass(d, current, k_neighbors, criterion, &removed);
        break;
    case EnnMode::repeated:
        for (std::size_t it = 0; it < max_iter; ++it) {
            current = enn_pass(d, current, k_neighbors, criterion, &removed);
            if (!removed || count_label(d, current, kMajorityLabel) == 0) break;
        }
        break;
    case EnnMode::all_knn:
        for (std::size_t k = 1; k <= k_neighbors; ++k) {
            current = enn_pass(d, current, k, criterion, &removed);
            if (count_label(d, current, kMajorityLabel) == 0) break;
        }
        break;
    }
    return keep_rows(d, std::move(current));
}

LabeledDataset near_miss(const LabeledDataset& d, int version, std::size_t k_neighbors,
                         double target_ratio, std::uint64_t seed) {
    (void)seed; // scoring is deterministic; parameter kept for the common signature
    d.validate();
    if (version < 1 || version > 3) throw ResampleError("near_miss version must be 1, 2 or 3");
    const auto minority = d.indices_of(kMinorityLabel);
    const auto majority = d.indices_of(kMajorityLabel);
    if (k_neighbors == 0 || k_neighbors > minority.size()) {
        throw ResampleError("k_neighbors=" + std::to_string(k_neighbors) +
                            " exceeds minority count " + std::to_string(minority.size()));
    }
    const std::size_t target = std::min(required_majority(d, target_ratio), majority.size());

    const Matrix minority_points = gather(d, minority);
    NeighborIndex minority_index(minority_points);

    auto average_minority_distance = [&](std::size_t row, bool closest) {
        if (closest) {
            const auto nn = minority_index.query(d.features.row(row), k_neighbors);
            double sum = 0;
            for (const auto& nb : nn) sum += nb.distance;
            return sum / static_cast<double>(nn.size());
        }
        // farthest k: scan all minority distances
        std::vector<double> dist;
        dist.reserve(minority.size());
        for (std::size_t m : minority) {
            dist.push_back(euclidean_distance(d.features.row(row), d.features.row(m)));
        }
        std::sort(dist.begin(), dist.end());
        double sum = 0;
        for (std::size_t i = dist.size() - k_neighbors; i < dist.size(); ++i) sum += dist[i];
        return sum / static_cast<double>(k_neighbors);
    };

    std::vector<std::size_t> kept;
    if (version == 1 || version == 2) {
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(majority.size());
        for (std::size_t row : majority) {
            scored.emplace_back(average_minority_distance(row, version == 1), row);
        }
        std::sort(scored.begin(), scored.end()); // ascending score, ties by row index
        for (std::size_t i = 0; i < target; ++i) kept.push_back(scored[i].second);
    } else {
        // stage 1: union of each minority sample's k nearest majority rows
        const Matrix majority_points = gather(d, majority);
        NeighborIndex majority_index(majority_points);
        const std::size_t k_pool = std::min(k_neighbors, majority.size());
        std::set<std::size_t> pool_set;
        for (std::size_t m : minority) {
            const auto nn = majority_index.query(d.features.row(m), k_pool);
            for (const auto& nb : nn) pool_set.insert(majority[nb.index]);
        }
        // stage 2: from the pool, keep the rows FARTHEST on average from their
        // k nearest minority points; a pool smaller than the target is
        // returned whole.
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t row : pool_set) {
            scored.emplace_back(-average_minority_distance(row, true), row);
        }
        std::sort(scored.begin(), scored.end());
        const std::size_t take = std::min(target, scored.size());
        for (std::size_t i = 0; i < take; ++i) kept.push_back(scored[i].second);
    }

    kept.insert(kept.end(), minority.begin(), minority.end());
    return keep_rows(d, std::move(kept));
}

std::vector<std::pair<std::size_t, std::size_t>> find_tomek_links(const LabeledDataset& d) {
    const std::size_t n = d.size();
    std::vector<std::pair<std::size_t, std::size_t>> links;
    if (n < 2) return links;

    NeighborIndex index(d.features);
    const std::size_t k = std::min<std::size_t>(2, n - 1);

    // nearest candidate and whether it is strictly unique at that distance
    std::vector<std::size_t> nearest(n);
    std::vector<bool> unique(n, true);
    std::vector<double> nearest_dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nn = index.query_excluding(i, k);
        nearest[i] = nn[0].index;
        nearest_dist[i] = nn[0].distance;
        if (nn.size() > 1 && nn[1].distance == nn[0].distance) unique[i] = false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = nearest[i];
        if (j < i) continue; // each pair reports once
        if (d.labels[i] == d.labels[j]) continue;
        if (nearest[j] != i || !unique[i] || !unique[j]) continue;
        links.emplace_back(i, j);
    }
    return links;
}

LabeledDataset tomek_links(const LabeledDataset& d) {
    d.validate();
    const auto links = find_tomek_links(d);
    std::vector<bool> drop(d.size(), false);
    for (const auto& [a, b] : links) {
        if (d.labels[a] == kMajorityLabel) drop[a] = true;
        if (d.labels[b] == kMajorityLabel) drop[b] = true;
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!drop[i]) kept.push_back(i);
    }
    return keep_rows(d, std::move(kept));
}

LabeledDataset one_sided_selection(const LabeledDataset& d, std::size_t n_seeds,
                                   std::uint64_t seed) {
    return tomek_links(condensed_nn(d, n_seeds, seed));
}

LabeledDataset ncl(const LabeledDataset& d, std::size_t k_neighbors, EditCriterion criterion,
                   double cleaning_threshold) {
    d.validate();
    std::vector<std::size_t> current(d.size());
    std::iota(current.begin(), current.end(), std::size_t{0});
    bool removed = false;
    current = enn_pass(d, current, k_neighbors, criterion, &removed);

    // phase 2: clean majority neighbours that misclassify minority samples,
    // guarded so only classes of size >= threshold * N_min lose rows (in the
    // binary case this can only be the majority class)
    const std::size_t n_min = count_label(d, current, kMinorityLabel);
    const std::size_t n_maj = count_label(d, current, kMajorityLabel);
    const bool guard_allows =
        static_cast<double>(n_maj) >= cleaning_threshold * static_cast<double>(n_min);

    std::vector<bool> drop(d.size(), false);
    if (guard_allows && current.size() >= 2) {
        const Matrix points = gather(d, current);
        NeighborIndex index(points);
        const std::size_t k3 = std::min<std::size_t>(3, current.size() - 1);
        for (std::size_t i = 0; i < current.size(); ++i) {
            if (d.labels[current[i]] != kMinorityLabel) continue;
            const auto nn = index.query_excluding(i, k3);
            std::size_t majority = 0;
            for (const auto& nb : nn) {
                if (d.labels[current[nb.index]] == kMajorityLabel) ++majority;
            }
            if (2 * majority > k3) { // plurality of the 3 neighbours is majority
                for (const auto& nb : nn) {
                    if (d.labels[current[nb.index]] == kMajorityLabel) {
                        drop[current[nb.index]] = true;
                    }
                }
            }
        }
    }
    std::vector<std::size_t> kept;
    for (std::size_t row : current) {
        if (!drop[row]) kept.push_back(row);
    }
    return keep_rows(d, std::move(kept));
}

LabeledDataset cluster_centroids(const LabeledDataset& d, double target_ratio,
                                 std::uint64_t seed, std::size_t n_restarts) {
    d.validate();
    const auto majority = d.indices_of(kMajorityLabel);
    const std::size_t k = required_majority(d, target_ratio);
    if (k > majority.size()) {
        throw ResampleError("target_ratio requires " + std::to_string(k) +
                            " centroids but only " + std::to_string(majority.size()) +
                            " majority rows exist");
    }
    const Matrix majority_points = gather(d, majority);
    const auto model = kmeans_fit(majority_points, k, seed, 100, n_restarts);

    LabeledDataset out;
    out.feature_names = d.feature_names;
    const auto minority = d.indices_of(kMinorityLabel);
    out.features = Matrix(0, d.features.cols());
    for (std::size_t row : minority) {
        out.features.push_row(d.features.row(row));
        out.labels.push_back(kMinorityLabel);
    }
    for (std::size_t c = 0; c < model.centroids.rows(); ++c) {
        out.features.push_row(model.centroids.row(c));
        out.labels.push_back(kMajorityLabel);
    }
    return out;
}

} // namespace imbench
