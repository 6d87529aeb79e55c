#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "imbench/dataset.hpp"
#include "imbench/matrix.hpp"

namespace imbench {

struct KMeansModel {
    Matrix centroids;                   // k x d
    std::vector<std::size_t> assignment; // per input point, nearest centroid
    double inertia = 0.0;               // sum of squared distances to assigned centroid
};

// Lloyd's algorithm with k-means++ seeding, best of n_restarts by inertia.
// Empty clusters are re-seeded from the point farthest from its centroid.
KMeansModel kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                       std::size_t max_iter = 100, std::size_t n_restarts = 1);

struct LinearScorer {
    std::vector<double> weights;
    double intercept = 0.0;
    enum class Loss { hinge, logistic } loss = Loss::logistic;
    double regularization = 0.0;

    double raw_score(std::span<const double> x) const;
    // Sigmoid of the raw score; for the hinge loss this is just a monotone
    // squashing, which leaves every rank metric unchanged.
    double probability(std::span<const double> x) const;
};

struct SvmFit {
    LinearScorer scorer;
    // Margin-flagged "support" points: y * (w.x + b) <= 1 + 1e-3.
    std::vector<bool> support;
};

// Linear soft-margin SVM trained by seeded stochastic subgradient descent on
// the hinge objective (lambda = 1 / (reg_c * n), bias unregularized).
SvmFit svm_fit(const LabeledDataset& d, double reg_c, std::size_t epochs, std::uint64_t seed);

// L2-regularized logistic regression by full-batch gradient descent with
// monotone backtracking. Deterministic; the seed is accepted for interface
// symmetry and unused.
LinearScorer logistic_fit(const LabeledDataset& d, double reg_lambda, std::size_t epochs,
                          std::uint64_t seed);

// score = fraction of minority labels among the k nearest training points.
// No self-exclusion: queries are treated as unseen. Requires k <= n_train.
std::vector<double> knn_score(const LabeledDataset& train, const Matrix& queries, std::size_t k);

struct ClassifierConfig {
    enum class Kind { logistic, knn } kind;
    double lambda = 0.1;   // logistic
    std::size_t k = 5;     // knn
    std::size_t epochs = 200;
    std::string id() const;
};

// The fixed candidate pool used by the harness: logistic x lambda {1e-3, 1e-1}
// and knn x k {5, 15}.
std::vector<ClassifierConfig> default_classifier_candidates();

// A fitted scoring classifier (value type).
class FittedClassifier {
public:
    static FittedClassifier fit(const ClassifierConfig& config, const LabeledDataset& train,
                                std::uint64_t seed);
    std::vector<double> score(const Matrix& queries) const;
    const std::string& id() const { return id_; }

private:
    struct KnnState {
        LabeledDataset train;
        std::size_t k; // clamped to the training size when necessary
    };
    std::string id_;
    std::variant<LinearScorer, KnnState> impl_;
};

struct ModelSelection {
    ClassifierConfig config;
    FittedClassifier classifier;          // winner refit on the full training set
    std::vector<double> candidate_auc;    // mean out-of-fold ROC AUC per candidate
    std::size_t selected = 0;
};

// Stratified k-fold CV optimizing mean out-of-fold ROC AUC; ties go to the
// first candidate. Folds whose held-out part is single-class are skipped;
// if every fold of a candidate is skipped, InvalidDatasetError is thrown.
ModelSelection select_model_cv(const LabeledDataset& train,
                               std::span<const ClassifierConfig> candidates, std::size_t folds,
                               std::uint64_t seed);

} // namespace imbench
