#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "imbench/dataset.hpp"

namespace imbench {

enum class EditCriterion {
    mode, // removed when the plurality neighbour label disagrees
    all   // removed when any neighbour label disagrees
};

enum class EnnMode { single, repeated, all_knn };

// Every undersampler keeps the minority rows exactly (count, values, order).
// All methods except cluster_centroids output a subset of the input rows in
// input order.

LabeledDataset random_undersample(const LabeledDataset& d, double target_ratio,
                                  std::uint64_t seed);

// Hart's condensation: a store seeded with all minority plus n_seeds random
// majority absorbs every sample the current store 1-NN-misclassifies, until a
// full pass over the remaining majority transfers nothing.
LabeledDataset condensed_nn(const LabeledDataset& d, std::size_t n_seeds, std::uint64_t seed);

LabeledDataset edited_nn(const LabeledDataset& d, std::size_t k_neighbors,
                         EditCriterion criterion, EnnMode mode, std::size_t max_iter = 100);

// version 1: keep majority with the smallest average distance to the
// k_neighbors closest minority points; version 2: to the k_neighbors farthest
// minority points; version 3: pool = union of each minority point's
// k_neighbors nearest majority points, then keep the pool entries with the
// largest average distance to their k_neighbors nearest minority points.
LabeledDataset near_miss(const LabeledDataset& d, int version, std::size_t k_neighbors,
                         double target_ratio, std::uint64_t seed);

// Cross-class pairs that are strict mutual nearest neighbours, sorted by
// (min, max) row index. Exposed for the brute-force equivalence tests.
std::vector<std::pair<std::size_t, std::size_t>> find_tomek_links(const LabeledDataset& d);

// Removes the majority member of every Tomek link.
LabeledDataset tomek_links(const LabeledDataset& d);

// condensed_nn followed by tomek_links on its output.
LabeledDataset one_sided_selection(const LabeledDataset& d, std::size_t n_seeds,
                                   std::uint64_t seed);

// Phase 1: single-pass edited_nn over the majority. Phase 2: for each minority
// sample whose 3 nearest neighbours are plurality-majority, remove those
// majority neighbours, guarded by class size >= cleaning_threshold * N_min.
LabeledDataset ncl(const LabeledDataset& d, std::size_t k_neighbors, EditCriterion criterion,
                   double cleaning_threshold);

// Prototype generation: majority replaced by the centroids of a
// ceil(N_min / target_ratio)-means clustering of the majority rows.
LabeledDataset cluster_centroids(const LabeledDataset& d, double target_ratio,
                                 std::uint64_t seed, std::size_t n_restarts = 1);

} // namespace imbench
