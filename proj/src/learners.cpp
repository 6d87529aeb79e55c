#include "imbench/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "imbench/errors.hpp"
#include "imbench/metrics.hpp"
#include "imbench/neighbors.hpp"
#include "imbench/rng.hpp"

namespace imbench {

namespace {

std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> point,
                             double* dist2_out = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(point, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist2_out) *dist2_out = best_d;
    return best;
}

KMeansModel lloyd_once(const Matrix& points, std::size_t k, Rng& rng, std::size_t max_iter) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();

    // k-means++ seeding
    Matrix centroids(k, d);
    std::vector<double> min_dist2(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.index(n);
    std::copy_n(points.row(first).begin(), d, centroids.row(0).begin());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            min_dist2[i] = std::min(min_dist2[i],
                                    squared_distance(points.row(i), centroids.row(c - 1)));
            total += min_dist2[i];
        }
        std::size_t chosen;
        if (total <= 0) {
            chosen = rng.index(n); // all remaining points coincide with a centroid
        } else {
            double target = rng.unit() * total;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= min_dist2[i];
                if (target <= 0) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy_n(points.row(chosen).begin(), d, centroids.row(c).begin());
    }

    KMeansModel model;
    model.assignment.assign(n, 0);
    std::vector<double> dist2(n, 0.0);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = iter == 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = nearest_centroid(centroids, points.row(i), &dist2[i]);
            if (a != model.assignment[i]) changed = true;
            model.assignment[i] = a;
        }
        if (!changed) break;

        Matrix sums(k, d, 0.0);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = model.assignment[i];
            auto srow = sums.row(a);
            const auto prow = points.row(i);
            for (std::size_t j = 0; j < d; ++j) srow[j] += prow[j];
            ++sizes[a];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                // re-seed from the point farthest from its assigned centroid
                std::size_t far = 0;
                double far_d = -1;
                for (std::size_t i = 0; i < n; ++i) {
                    if (dist2[i] > far_d) {
                        far_d = dist2[i];
                        far = i;
                    }
                }
                std::copy_n(points.row(far).begin(), d, centroids.row(c).begin());
                dist2[far] = 0; // avoid handing the same point to two empty clusters
            } else {
                auto crow = centroids.row(c);
                const auto srow = sums.row(c);
                for (std::size_t j = 0; j < d; ++j) {
                    crow[j] = srow[j] / static_cast<double>(sizes[c]);
                }
            }
        }
    }

    model.inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
        model.assignment[i] = nearest_centroid(centroids, points.row(i), &dist2[i]);
        model.inertia += dist2[i];
    }
    model.centroids = std::move(centroids);
    return model;
}

} // namespace

KMeansModel kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                       std::size_t max_iter, std::size_t n_restarts) {
    if (k == 0 || k > points.rows()) {
        throw std::invalid_argument("kmeans_fit: k must be in [1, n]");
    }
    Rng rng(seed);
    KMeansModel best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(1, n_restarts); ++r) {
        KMeansModel m = lloyd_once(points, k, rng, max_iter);
        if (m.inertia < best.inertia) best = std::move(m);
    }
    return best;
}

double LinearScorer::raw_score(std::span<const double> x) const {
    double s = intercept;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * x[i];
    return s;
}

double LinearScorer::probability(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(-raw_score(x)));
}

SvmFit svm_fit(const LabeledDataset& d, double reg_c, std::size_t epochs, std::uint64_t seed) {
    d.validate();
    const std::size_t n = d.size();
    const std::size_t dim = d.features.cols();
    const double lambda = 1.0 / (reg_c * static_cast<double>(n));

    SvmFit fit;
    fit.scorer.loss = LinearScorer::Loss::hinge;
    fit.scorer.regularization = lambda;
    fit.scorer.weights.assign(dim, 0.0);
    fit.scorer.intercept = 0.0;

    // Pegasos steps with suffix averaging: the averaged second half of the
    // trajectory is what gets returned, which keeps the unregularized bias
    // from wandering on symmetric data.
    Rng rng(seed);
    std::vector<double> w(dim, 0.0), w_avg(dim, 0.0);
    double b = 0.0, b_avg = 0.0;
    const std::size_t total_steps = std::max<std::size_t>(1, epochs * n);
    const std::size_t burn_in = total_steps / 2;
    std::size_t averaged = 0;
    for (std::size_t t = 1; t <= total_steps; ++t) {
        const std::size_t i = rng.index(n);
        const double y = d.labels[i] == kMinorityLabel ? 1.0 : -1.0;
        const auto x = d.features.row(i);
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        double margin = b;
        for (std::size_t j = 0; j < dim; ++j) margin += w[j] * x[j];
        margin *= y;
        const double decay = 1.0 - eta * lambda;
        for (double& wj : w) wj *= decay;
        if (margin < 1.0) {
            for (std::size_t j = 0; j < dim; ++j) w[j] += eta * y * x[j];
            b += eta * y;
        }
        if (t > burn_in) {
            for (std::size_t j = 0; j < dim; ++j) w_avg[j] += w[j];
            b_avg += b;
            ++averaged;
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        fit.scorer.weights[j] = w_avg[j] / static_cast<double>(averaged);
    }
    fit.scorer.intercept = b_avg / static_cast<double>(averaged);

    constexpr double kMarginEps = 1e-3;
    fit.support.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = d.labels[i] == kMinorityLabel ? 1.0 : -1.0;
        fit.support[i] = y * fit.scorer.raw_score(d.features.row(i)) <= 1.0 + kMarginEps;
    }
    return fit;
}

LinearScorer logistic_fit(const LabeledDataset& d, double reg_lambda, std::size_t epochs,
                          std::uint64_t seed) {
    (void)seed; // full-batch descent from zero is already deterministic
    d.validate();
    const std::size_t n = d.size();
    const std::size_t dim = d.features.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    LinearScorer scorer;
    scorer.loss = LinearScorer::Loss::logistic;
    scorer.regularization = reg_lambda;
    scorer.weights.assign(dim, 0.0);
    scorer.intercept = 0.0;

    auto loss_of = [&](const std::vector<double>& w, double b) {
        double loss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = d.features.row(i);
            double z = b;
            for (std::size_t j = 0; j < dim; ++j) z += w[j] * x[j];
            const double y = d.labels[i] == kMinorityLabel ? 1.0 : -1.0;
            const double m = -y * z;
            // log(1 + exp(m)) without overflow
            loss += m > 30 ? m : std::log1p(std::exp(m));
        }
        loss *= inv_n;
        double reg = 0;
        for (double v : w) reg += v * v;
        return loss + 0.5 * reg_lambda * reg;
    };

    std::vector<double> grad_w(dim, 0.0);
    double grad_b = 0;
    double step = 1.0;
    double current = loss_of(scorer.weights, scorer.intercept);

    for (std::size_t it = 0; it < epochs; ++it) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        grad_b = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = d.features.row(i);
            const double y = d.labels[i] == kMinorityLabel ? 1.0 : -1.0;
            double z = scorer.intercept;
            for (std::size_t j = 0; j < dim; ++j) z += scorer.weights[j] * x[j];
            const double g = -y / (1.0 + std::exp(y * z));
            for (std::size_t j = 0; j < dim; ++j) grad_w[j] += g * x[j];
            grad_b += g;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            grad_w[j] = grad_w[j] * inv_n + reg_lambda * scorer.weights[j];
        }
        grad_b *= inv_n;

        double g2 = grad_b * grad_b;
        for (double g : grad_w) g2 += g * g;
        if (g2 < 1e-18) break;

        // monotone backtracking from twice the last accepted step
        step = std::min(step * 2.0, 1e6);
        while (step > 1e-12) {
            std::vector<double> w_try(dim);
            for (std::size_t j = 0; j < dim; ++j) w_try[j] = scorer.weights[j] - step * grad_w[j];
            const double b_try = scorer.intercept - step * grad_b;
            const double next = loss_of(w_try, b_try);
            if (next <= current - 0.5 * step * g2 * 1e-4) {
                scorer.weights = std::move(w_try);
                scorer.intercept = b_try;
                current = next;
                break;
            }
            step /= 2.0;
        }
    }
    return scorer;
}

std::vector<double> knn_score(const LabeledDataset& train, const Matrix& queries, std::size_t k) {
    if (k == 0 || k > train.size()) {
        throw std::invalid_argument("knn_score: k must be in [1, n_train]");
    }
    NeighborIndex index(train.features);
    std::vector<double> scores;
    scores.reserve(queries.rows());
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        const auto nn = index.query(queries.row(q), k);
        std::size_t minority = 0;
        for (const auto& nb : nn) {
            if (train.labels[nb.index] == kMinorityLabel) ++minority;
        }
        scores.push_back(static_cast<double>(minority) / static_cast<double>(k));
    }
    return scores;
}

std::string ClassifierConfig::id() const {
    std::ostringstream out;
    if (kind == Kind::logistic) {
        out << "logistic(lambda=" << lambda << ")";
    } else {
        out << "knn(k=" << k << ")";
    }
    return out.str();
}

std::vector<ClassifierConfig> default_classifier_candidates() {
    std::vector<ClassifierConfig> out;
    for (double lambda : {1e-3, 1e-1}) {
        ClassifierConfig c;
        c.kind = ClassifierConfig::Kind::logistic;
        c.lambda = lambda;
        out.push_back(c);
    }
    for (std::size_t k : {std::size_t{5}, std::size_t{15}}) {
        ClassifierConfig c;
        c.kind = ClassifierConfig::Kind::knn;
        c.k = k;
        out.push_back(c);
    }
    return out;
}

FittedClassifier FittedClassifier::fit(const ClassifierConfig& config, const LabeledDataset& train,
                                       std::uint64_t seed) {
    FittedClassifier out;
    out.id_ = config.id();
    if (config.kind == ClassifierConfig::Kind::logistic) {
        out.impl_ = logistic_fit(train, config.lambda, config.epochs, seed);
    } else {
        KnnState state;
        state.train = train;
        state.k = std::min(config.k, train.size()); // small resampled sets still score
        out.impl_ = std::move(state);
    }
    return out;
}

std::vector<double> FittedClassifier::score(const Matrix& queries) const {
    if (const auto* linear = std::get_if<LinearScorer>(&impl_)) {
        std::vector<double> out;
        out.reserve(queries.rows());
        for (std::size_t i = 0; i < queries.rows(); ++i) {
            out.push_back(linear->probability(queries.row(i)));
        }
        return out;
    }
    const auto& knn = std::get<KnnState>(impl_);
    return knn_score(knn.train, queries, knn.k);
}

ModelSelection select_model_cv(const LabeledDataset& train,
                               std::span<const ClassifierConfig> candidates, std::size_t folds,
                               std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("select_model_cv: folds must be >= 2");
    if (candidates.empty()) throw std::invalid_argument("select_model_cv: no candidates");
    train.validate();

    // stratified fold assignment: per class, shuffled indices dealt round-robin
    std::vector<std::size_t> fold_of(train.size(), 0);
    Rng rng(Rng::derive(seed, "cv-folds"));
    for (int label : {kMinorityLabel, kMajorityLabel}) {
        auto idx = train.indices_of(label);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = i % folds;
    }

    std::vector<double> mean_auc(candidates.size(), 0.0);
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        double sum = 0;
        std::size_t used = 0;
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> fit_rows, heldout_rows;
            for (std::size_t i = 0; i < train.size(); ++i) {
                (fold_of[i] == f ? heldout_rows : fit_rows).push_back(i);
            }
            if (fit_rows.empty() || heldout_rows.empty()) continue;
            const auto heldout = train.subset(heldout_rows);
            const bool single_class = heldout.minority_count() == 0 ||
                                      heldout.majority_count() == 0;
            if (single_class) continue; // fold AUC undefined
            const auto fit_part = train.subset(fit_rows);
            if (fit_part.minority_count() == 0 || fit_part.majority_count() == 0) continue;

            const auto clf = FittedClassifier::fit(candidates[ci], fit_part,
                                                   Rng::derive(seed, "fold" + std::to_string(f)));
            ScoredPredictions sp{clf.score(heldout.features), heldout.labels};
            sum += roc_auc(sp);
            ++used;
        }
        if (used == 0) {
            throw InvalidDatasetError("select_model_cv: every fold was single-class");
        }
        mean_auc[ci] = sum / static_cast<double>(used);
    }

    std::size_t best = 0;
    for (std::size_t ci = 1; ci < candidates.size(); ++ci) {
        if (mean_auc[ci] > mean_auc[best]) best = ci; // ties keep the earlier candidate
    }

    ModelSelection sel{candidates[best],
                       FittedClassifier::fit(candidates[best], train, Rng::derive(seed, "refit")),
                       std::move(mean_auc), best};
    return sel;
}

} // namespace imbench
