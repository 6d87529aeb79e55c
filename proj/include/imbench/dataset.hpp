#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imbench/matrix.hpp"

namespace imbench {

inline constexpr int kMajorityLabel = 0;
inline constexpr int kMinorityLabel = 1;

// Binary-labelled dense dataset. Immutable by convention once constructed;
// every resampler maps one LabeledDataset to a new one.
struct LabeledDataset {
    Matrix features;
    std::vector<int> labels; // 0 = majority, 1 = minority
    std::vector<std::string> feature_names; // optional, may be empty

    std::size_t size() const { return labels.size(); }
    std::size_t count_of(int label) const;
    std::size_t majority_count() const { return count_of(kMajorityLabel); }
    std::size_t minority_count() const { return count_of(kMinorityLabel); }
    std::vector<std::size_t> indices_of(int label) const;

    LabeledDataset subset(std::span<const std::size_t> row_indices) const;

    // Throws InvalidDatasetError on shape mismatch, non-finite features or an
    // empty class.
    void validate() const;
};

struct LoadResult {
    LabeledDataset dataset;
    std::size_t imputed_cells = 0; // missing numeric cells filled with the column mean
};

// Reads a comma-separated file with a header row. label_column is a header
// name, or a 0-based column index when no header matches and the string is
// numeric. Rows whose label cell equals positive_label get label 1, all
// others 0. Empty numeric cells are imputed with the column mean over the
// present values; non-empty non-numeric cells raise ParseError naming the
// row and column.
LoadResult load_csv(const std::string& path, const std::string& label_column,
                    const std::string& positive_label);

struct ImbalanceStats {
    double ratio;               // N_maj / N_min
    double minority_prevalence; // N_min / (N_min + N_maj)
};

ImbalanceStats imbalance_stats(const LabeledDataset& d);

struct SplitPair {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Seeded per-class split. Minority test allocation rounds up so the test set
// never loses its minority class; each class keeps at least one sample on
// each side or InvalidSplitError is thrown.
SplitPair stratified_split(const LabeledDataset& d, double train_fraction, std::uint64_t seed);

struct StandardizationParams {
    std::vector<double> mean;
    std::vector<double> stddev; // 0 marks a constant feature, passed through unscaled
};

StandardizationParams fit_standardization(const LabeledDataset& train);
void apply_standardization(const StandardizationParams& params, LabeledDataset& d);

// Fits on train, transforms train and every dataset in others in place.
StandardizationParams standardize(LabeledDataset& train, std::span<LabeledDataset* const> others);

} // namespace imbench
