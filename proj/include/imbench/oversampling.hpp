#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imbench/dataset.hpp"

namespace imbench {

struct OversampleParams {
    // Desired N_min / N_maj after resampling, in (0, 1]. Never below the
    // current ratio: oversampling only adds rows.
    double target_ratio = 1.0;
    std::size_t k_neighbors = 5;

    // BorderlineSMOTE
    std::size_t m_danger_neighbors = 10;
    enum class BorderlineKind { borderline1, borderline2 };
    BorderlineKind kind = BorderlineKind::borderline1;

    // SVM SMOTE
    double svm_reg_c = 1.0;
    std::size_t svm_epochs = 50;

    // KMeansSMOTE
    std::size_t n_clusters = 8;
    double sparsity_exponent = 1.0;
};

// base + u * (neighbor - base)
std::vector<double> smote_interpolate(std::span<const double> base,
                                      std::span<const double> neighbor, double u);

// All oversamplers return the input rows unchanged and in order, followed by
// the appended minority rows, and leave the output with
// N_min = ceil(target_ratio * N_maj).

LabeledDataset random_oversample(const LabeledDataset& d, double target_ratio,
                                 std::uint64_t seed);

LabeledDataset smote(const LabeledDataset& d, const OversampleParams& params, std::uint64_t seed);

// Minority points are classified by their m nearest neighbours over the full
// set: DANGER when at least half are majority (but not all), NOISE when all
// are, SAFE otherwise. Only DANGER points seed synthetics. borderline1
// interpolates toward minority k-neighbours; borderline2 also allows majority
// neighbours with u in [0, 0.5].
LabeledDataset borderline_smote(const LabeledDataset& d, const OversampleParams& params,
                                std::uint64_t seed);

// Bases are the minority points margin-flagged by a linear SVM.
LabeledDataset svm_smote(const LabeledDataset& d, const OversampleParams& params,
                         std::uint64_t seed);

// Clusters the full set, keeps clusters where minority outnumbers majority,
// and spreads generation across kept clusters proportionally to
// (mean pairwise minority distance)^sparsity_exponent.
LabeledDataset kmeans_smote(const LabeledDataset& d, const OversampleParams& params,
                            std::uint64_t seed);

// Per-point difficulty r_i = majority fraction among the k nearest over the
// full set; synthetic counts follow the normalized r via largest-remainder
// rounding.
LabeledDataset adasyn(const LabeledDataset& d, const OversampleParams& params,
                      std::uint64_t seed);

} // namespace imbench
