#include "imbench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "imbench/csv.hpp"
#include "imbench/errors.hpp"
#include "imbench/rng.hpp"

namespace imbench {

std::size_t LabeledDataset::count_of(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> LabeledDataset::indices_of(int label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) out.push_back(i);
    }
    return out;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> row_indices) const {
    LabeledDataset out;
    out.feature_names = feature_names;
    out.features = Matrix(row_indices.size(), features.cols());
    out.labels.reserve(row_indices.size());
    std::size_t r = 0;
    for (std::size_t idx : row_indices) {
        const auto src = features.row(idx);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
        out.labels.push_back(labels[idx]);
        ++r;
    }
    return out;
}

void LabeledDataset::validate() const {
    if (features.rows() != labels.size()) {
        throw InvalidDatasetError("row count does not match label count");
    }
    for (double v : features.data()) {
        if (!std::isfinite(v)) throw InvalidDatasetError("non-finite feature value");
    }
    if (minority_count() == 0 || majority_count() == 0) {
        throw InvalidDatasetError("dataset must contain both classes");
    }
}

namespace {

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end != '\0') {
        if (!std::isspace(static_cast<unsigned char>(*end))) return false;
        ++end;
    }
    return std::isfinite(out);
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

LoadResult load_csv(const std::string& path, const std::string& label_column,
                    const std::string& positive_label) {
    const auto rows = read_csv_file(path);
    if (rows.size() < 3) {
        throw InvalidDatasetError("CSV needs a header and at least 2 data rows: " + path);
    }
    const auto& header = rows.front();

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trimmed(header[i]) == label_column) {
            label_idx = i;
            break;
        }
    }
    if (label_idx == header.size()) {
        // fall back to a 0-based column index
        double as_num = 0;
        if (parse_double(label_column, as_num) && as_num >= 0 &&
            as_num < static_cast<double>(header.size()) &&
            as_num == std::floor(as_num)) {
            label_idx = static_cast<std::size_t>(as_num);
        } else {
            throw ParseError("label column '" + label_column + "' not found in " + path);
        }
    }

    const std::size_t n_features = header.size() - 1;
    const std::size_t n_rows = rows.size() - 1;

    LoadResult result;
    result.dataset.feature_names.reserve(n_features);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != label_idx) result.dataset.feature_names.push_back(trimmed(header[i]));
    }

    Matrix features(n_rows, n_features);
    std::vector<int> labels(n_rows, kMajorityLabel);
    std::vector<std::vector<std::size_t>> missing_per_col(n_features);

    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& row = rows[r + 1];
        if (row.size() != header.size()) {
            throw ParseError("row " + std::to_string(r + 2) + " has " +
                             std::to_string(row.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        std::size_t c = 0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i == label_idx) {
                if (trimmed(row[i]) == positive_label) labels[r] = kMinorityLabel;
                continue;
            }
            const std::string cell = trimmed(row[i]);
            if (cell.empty()) {
                missing_per_col[c].push_back(r);
            } else {
                double v = 0;
                if (!parse_double(cell, v)) {
                    throw ParseError("non-numeric cell '" + cell + "' at row " +
                                     std::to_string(r + 2) + ", column '" +
                                     trimmed(header[i]) + "'");
                }
                features(r, c) = v;
            }
            ++c;
        }
    }

    // mean imputation over the present values of each column
    for (std::size_t c = 0; c < n_features; ++c) {
        if (missing_per_col[c].empty()) continue;
        double sum = 0;
        std::size_t present = 0;
        std::vector<bool> is_missing(n_rows, false);
        for (std::size_t r : missing_per_col[c]) is_missing[r] = true;
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (!is_missing[r]) {
                sum += features(r, c);
                ++present;
            }
        }
        const double mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
        for (std::size_t r : missing_per_col[c]) {
            features(r, c) = mean;
            ++result.imputed_cells;
        }
    }

    result.dataset.features = std::move(features);
    result.dataset.labels = std::move(labels);
    result.dataset.validate();
    return result;
}

ImbalanceStats imbalance_stats(const LabeledDataset& d) {
    const auto n_min = d.minority_count();
    const auto n_maj = d.majority_count();
    if (n_min == 0 || n_maj == 0) {
        throw InvalidDatasetError("imbalance_stats: a class is empty");
    }
    ImbalanceStats s;
    s.ratio = static_cast<double>(n_maj) / static_cast<double>(n_min);
    s.minority_prevalence = static_cast<double>(n_min) / static_cast<double>(n_min + n_maj);
    return s;
}

SplitPair stratified_split(const LabeledDataset& d, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidSplitError("train_fraction must be in (0, 1)");
    }
    Rng rng(seed);
    SplitPair out;

    for (int label : {kMinorityLabel, kMajorityLabel}) {
        auto idx = d.indices_of(label);
        const std::size_t n = idx.size();
        if (n < 2) {
            throw InvalidSplitError("class " + std::to_string(label) +
                                    " has fewer than 2 samples");
        }
        std::size_t n_train;
        if (label == kMinorityLabel) {
            // ceil on the minority test allocation: the test side never loses
            // the minority class.
            const auto n_test = static_cast<std::size_t>(
                std::ceil((1.0 - train_fraction) * static_cast<double>(n)));
            n_train = n - std::min(n_test, n - 1);
        } else {
            n_train = static_cast<std::size_t>(
                std::floor(train_fraction * static_cast<double>(n) + 0.5));
        }
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

        rng.shuffle(idx);
        out.train_indices.insert(out.train_indices.end(), idx.begin(), idx.begin() + n_train);
        out.test_indices.insert(out.test_indices.end(), idx.begin() + n_train, idx.end());
    }

    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    out.train = d.subset(out.train_indices);
    out.test = d.subset(out.test_indices);
    return out;
}

StandardizationParams fit_standardization(const LabeledDataset& train) {
    const auto& m = train.features;
    if (m.rows() == 0) throw InvalidDatasetError("fit_standardization: empty training set");
    StandardizationParams p;
    p.mean.assign(m.cols(), 0.0);
    p.stddev.assign(m.cols(), 0.0);
    const double n = static_cast<double>(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double sum = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, c);
        const double mean = sum / n;
        double ss = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double d = m(r, c) - mean;
            ss += d * d;
        }
        p.mean[c] = mean;
        p.stddev[c] = std::sqrt(ss / n);
    }
    return p;
}

void apply_standardization(const StandardizationParams& params, LabeledDataset& d) {
    auto& m = d.features;
    if (m.cols() != params.mean.size()) {
        throw InvalidDatasetError("apply_standardization: feature width mismatch");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const double sd = params.stddev[c];
        if (sd == 0.0) continue; // constant feature passes through unscaled
        const double mean = params.mean[c];
        for (std::size_t r = 0; r < m.rows(); ++r) {
            m(r, c) = (m(r, c) - mean) / sd;
        }
    }
}

StandardizationParams standardize(LabeledDataset& train, std::span<LabeledDataset* const> others) {
    auto params = fit_standardization(train);
    apply_standardization(params, train);
    for (LabeledDataset* d : others) apply_standardization(params, *d);
    return params;
}

} // namespace imbench
