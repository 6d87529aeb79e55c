#include "imbench/oversampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "imbench/errors.hpp"
#include "imbench/learners.hpp"
#include "imbench/neighbors.hpp"
#include "imbench/rng.hpp"

namespace imbench {

namespace {

// Synthetic rows to generate: G = ceil(target_ratio * N_maj) - N_min.
std::size_t synthetic_quota(const LabeledDataset& d, double target_ratio) {
    const std::size_t n_maj = d.majority_count();
    const std::size_t n_min = d.minority_count();
    const auto required = static_cast<std::size_t>(
        std::ceil(target_ratio * static_cast<double>(n_maj)));
    if (required < n_min) {
        throw ResampleError("target_ratio " + std::to_string(target_ratio) +
                            " is below the current minority/majority ratio");
    }
    return required - n_min;
}

LabeledDataset append_minority_rows(const LabeledDataset& d, const Matrix& rows) {
    LabeledDataset out = d;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        out.features.push_row(rows.row(r));
        out.labels.push_back(kMinorityLabel);
    }
    return out;
}

Matrix minority_matrix(const LabeledDataset& d, std::vector<std::size_t>& minority_rows) {
    minority_rows = d.indices_of(kMinorityLabel);
    Matrix m(minority_rows.size(), d.features.cols());
    for (std::size_t i = 0; i < minority_rows.size(); ++i) {
        const auto src = d.features.row(minority_rows[i]);
        std::copy(src.begin(), src.end(), m.row(i).begin());
    }
    return m;
}

void require_smote_preconditions(const LabeledDataset& d, std::size_t k_neighbors) {
    d.validate();
    const std::size_t n_min = d.minority_count();
    if (n_min < 2) throw ResampleError("too few minority samples for interpolation");
    if (k_neighbors == 0 || k_neighbors > n_min - 1) {
        throw ResampleError("k_neighbors=" + std::to_string(k_neighbors) +
                            " exceeds minority size - 1 = " + std::to_string(n_min - 1));
    }
}

// k nearest minority neighbours of each minority row (self excluded by row id).
std::vector<std::vector<std::size_t>> minority_neighbor_lists(const Matrix& minority,
                                                              std::size_t k) {
    NeighborIndex index(minority);
    std::vector<std::vector<std::size_t>> lists(minority.rows());
    for (std::size_t i = 0; i < minority.rows(); ++i) {
        const auto nn = index.query_excluding(i, k);
        lists[i].reserve(nn.size());
        for (const auto& nb : nn) lists[i].push_back(nb.index);
    }
    return lists;
}

// Quotas by the largest-remainder method, ties toward the larger weight then
// the lower index; weights must be non-negative with a positive sum.
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> quota(weights.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        quota[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::sort(remainders.begin(), remainders.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        if (weights[a.second] != weights[b.second]) return weights[a.second] > weights[b.second];
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
        ++quota[remainders[i % remainders.size()].second];
    }
    return quota;
}

} // namespace

std::vector<double> smote_interpolate(std::span<const double> base,
                                      std::span<const double> neighbor, double u) {
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] = base[i] + u * (neighbor[i] - base[i]);
    }
    return out;
}

LabeledDataset random_oversample(const LabeledDataset& d, double target_ratio,
                                 std::uint64_t seed) {
    d.validate();
    const std::size_t quota = synthetic_quota(d, target_ratio);
    const auto minority_rows = d.indices_of(kMinorityLabel);
    Rng rng(seed);
    Matrix synth(0, 0);
    for (std::size_t g = 0; g < quota; ++g) {
        synth.push_row(d.features.row(minority_rows[rng.index(minority_rows.size())]));
    }
    return append_minority_rows(d, synth);
}

LabeledDataset smote(const LabeledDataset& d, const OversampleParams& params,
                     std::uint64_t seed) {
    require_smote_preconditions(d, params.k_neighbors);
    const std::size_t quota = synthetic_quota(d, params.target_ratio);

    std::vector<std::size_t> minority_rows;
    const Matrix minority = minority_matrix(d, minority_rows);
    const auto neighbors = minority_neighbor_lists(minority, params.k_neighbors);

    Rng rng(seed);
    Matrix synth(0, 0);
    for (std::size_t g = 0; g < quota; ++g) {
        const std::size_t base = rng.index(minority.rows());
        const std::size_t nb = neighbors[base][rng.index(neighbors[base].size())];
        synth.push_row(smote_interpolate(minority.row(base), minority.row(nb), rng.unit()));
    }
    return append_minority_rows(d, synth);
}

LabeledDataset borderline_smote(const LabeledDataset& d, const OversampleParams& params,
                                std::uint64_t seed) {
    require_smote_preconditions(d, params.k_neighbors);
    const std::size_t m = params.m_danger_neighbors;
    if (m == 0 || m > d.size() - 1) {
        throw ResampleError("m_danger_neighbors exceeds dataset size - 1");
    }
    const std::size_t quota = synthetic_quota(d, params.target_ratio);

    std::vector<std::size_t> minority_rows;
    const Matrix minority = minority_matrix(d, minority_rows);

    // DANGER selection: at least half of the m full-set neighbours majority,
    // but not all of them (that is NOISE).
    NeighborIndex full_index(d.features);
    std::vector<std::size_t> danger; // positions within the minority matrix
    for (std::size_t i = 0; i < minority_rows.size(); ++i) {
        const auto nn = full_index.query_excluding(minority_rows[i], m);
        std::size_t majority = 0;
        for (const auto& nb : nn) {
            if (d.labels[nb.index] == kMajorityLabel) ++majority;
        }
        if (2 * majority >= m && majority < m) danger.push_back(i);
    }
    if (danger.empty()) throw ResampleError("no borderline minority samples");

    Rng rng(seed);
    Matrix synth(0, 0);
    if (params.kind == OversampleParams::BorderlineKind::borderline1) {
        const auto neighbors = minority_neighbor_lists(minority, params.k_neighbors);
        for (std::size_t g = 0; g < quota; ++g) {
            const std::size_t base = danger[rng.index(danger.size())];
            const std::size_t nb = neighbors[base][rng.index(neighbors[base].size())];
            synth.push_row(smote_interpolate(minority.row(base), minority.row(nb), rng.unit()));
        }
    } else {
        // borderline2 draws neighbours from the full set; interpolation toward
        // a majority neighbour stays on the near half of the segment.
        std::vector<std::vector<std::size_t>> full_neighbors(danger.size());
        for (std::size_t di = 0; di < danger.size(); ++di) {
            const auto nn = full_index.query_excluding(minority_rows[danger[di]],
                                                       params.k_neighbors);
            for (const auto& nb : nn) full_neighbors[di].push_back(nb.index);
        }
        for (std::size_t g = 0; g < quota; ++g) {
            const std::size_t di = rng.index(danger.size());
            const std::size_t base_row = minority_rows[danger[di]];
            const std::size_t nb = full_neighbors[di][rng.index(full_neighbors[di].size())];
            double u = rng.unit();
            if (d.labels[nb] == kMajorityLabel) u *= 0.5;
            synth.push_row(smote_interpolate(d.features.row(base_row), d.features.row(nb), u));
        }
    }
    return append_minority_rows(d, synth);
}

LabeledDataset svm_smote(const LabeledDataset& d, const OversampleParams& params,
                         std::uint64_t seed) {
    require_smote_preconditions(d, params.k_neighbors);
    const std::size_t quota = synthetic_quota(d, params.target_ratio);

    const auto fit = svm_fit(d, params.svm_reg_c, params.svm_epochs, Rng::derive(seed, "svm"));

    std::vector<std::size_t> minority_rows;
    const Matrix minority = minority_matrix(d, minority_rows);
    std::vector<std::size_t> bases; // positions within the minority matrix
    for (std::size_t i = 0; i < minority_rows.size(); ++i) {
        if (fit.support[minority_rows[i]]) bases.push_back(i);
    }
    if (bases.empty()) throw ResampleError("no minority support vectors");

    const auto neighbors = minority_neighbor_lists(minority, params.k_neighbors);
    Rng rng(seed);
    Matrix synth(0, 0);
    for (std::size_t g = 0; g < quota; ++g) {
        const std::size_t base = bases[rng.index(bases.size())];
        const std::size_t nb = neighbors[base][rng.index(neighbors[base].size())];
        synth.push_row(smote_interpolate(minority.row(base), minority.row(nb), rng.unit()));
    }
    return append_minority_rows(d, synth);
}

LabeledDataset kmeans_smote(const LabeledDataset& d, const OversampleParams& params,
                            std::uint64_t seed) {
    d.validate();
    if (d.minority_count() < 1) throw ResampleError("no minority samples");
    if (params.n_clusters == 0) throw ResampleError("n_clusters must be >= 1");
    const std::size_t quota = synthetic_quota(d, params.target_ratio);

    const std::size_t k_clusters = std::min(params.n_clusters, d.size());
    const auto model = kmeans_fit(d.features, k_clusters, Rng::derive(seed, "kmeans"));

    struct Cluster {
        std::vector<std::size_t> minority_rows; // dataset row ids
        double sparsity = 0;
    };
    std::vector<Cluster> kept;
    for (std::size_t c = 0; c < k_clusters; ++c) {
        std::size_t n_min = 0, n_maj = 0;
        Cluster cluster;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (model.assignment[i] != c) continue;
            if (d.labels[i] == kMinorityLabel) {
                ++n_min;
                cluster.minority_rows.push_back(i);
            } else {
                ++n_maj;
            }
        }
        if (n_min == 0 || n_min <= n_maj) continue; // keep minority-dominated clusters only
        double dist_sum = 0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < cluster.minority_rows.size(); ++a) {
            for (std::size_t b = a + 1; b < cluster.minority_rows.size(); ++b) {
                dist_sum += euclidean_distance(d.features.row(cluster.minority_rows[a]),
                                               d.features.row(cluster.minority_rows[b]));
                ++pairs;
            }
        }
        cluster.sparsity = pairs > 0 ? dist_sum / static_cast<double>(pairs) : 0.0;
        kept.push_back(std::move(cluster));
    }
    if (kept.empty()) throw ResampleError("no minority-dominated cluster");

    std::vector<double> weights(kept.size());
    double weight_sum = 0;
    for (std::size_t c = 0; c < kept.size(); ++c) {
        weights[c] = std::pow(kept[c].sparsity, params.sparsity_exponent);
        weight_sum += weights[c];
    }
    if (weight_sum <= 0) {
        // every kept cluster is a single point or fully duplicated: spread evenly
        std::fill(weights.begin(), weights.end(), 1.0);
    }
    const auto quotas = largest_remainder(weights, quota);

    Rng rng(seed);
    Matrix synth(0, 0);
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const auto& rows = kept[c].minority_rows;
        if (rows.size() == 1) {
            for (std::size_t g = 0; g < quotas[c]; ++g) synth.push_row(d.features.row(rows[0]));
            continue;
        }
        Matrix local(rows.size(), d.features.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto src = d.features.row(rows[i]);
            std::copy(src.begin(), src.end(), local.row(i).begin());
        }
        const std::size_t k_eff = std::min(params.k_neighbors, rows.size() - 1);
        const auto neighbors = minority_neighbor_lists(local, k_eff);
        for (std::size_t g = 0; g < quotas[c]; ++g) {
            const std::size_t base = rng.index(local.rows());
            const std::size_t nb = neighbors[base][rng.index(neighbors[base].size())];
            synth.push_row(smote_interpolate(local.row(base), local.row(nb), rng.unit()));
        }
    }
    return append_minority_rows(d, synth);
}

LabeledDataset adasyn(const LabeledDataset& d, const OversampleParams& params,
                      std::uint64_t seed) {
    require_smote_preconditions(d, params.k_neighbors);
    if (params.k_neighbors > d.size() - 1) {
        throw ResampleError("k_neighbors exceeds dataset size - 1");
    }
    const std::size_t quota = synthetic_quota(d, params.target_ratio);

    std::vector<std::size_t> minority_rows;
    const Matrix minority = minority_matrix(d, minority_rows);

    NeighborIndex full_index(d.features);
    std::vector<double> difficulty(minority_rows.size(), 0.0);
    double difficulty_sum = 0;
    for (std::size_t i = 0; i < minority_rows.size(); ++i) {
        const auto nn = full_index.query_excluding(minority_rows[i], params.k_neighbors);
        std::size_t majority = 0;
        for (const auto& nb : nn) {
            if (d.labels[nb.index] == kMajorityLabel) ++majority;
        }
        difficulty[i] = static_cast<double>(majority) / static_cast<double>(params.k_neighbors);
        difficulty_sum += difficulty[i];
    }
    if (difficulty_sum <= 0) {
        throw ResampleError("no adaptive distribution: no minority point has a majority neighbour");
    }

    const auto quotas = quota > 0 ? largest_remainder(difficulty, quota)
                                  : std::vector<std::size_t>(minority_rows.size(), 0);
    const auto neighbors = minority_neighbor_lists(minority, params.k_neighbors);

    Rng rng(seed);
    Matrix synth(0, 0);
    for (std::size_t i = 0; i < minority_rows.size(); ++i) {
        for (std::size_t g = 0; g < quotas[i]; ++g) {
            const std::size_t nb = neighbors[i][rng.index(neighbors[i].size())];
            synth.push_row(smote_interpolate(minority.row(i), minority.row(nb), rng.unit()));
        }
    }
    return append_minority_rows(d, synth);
}

} // namespace imbench
