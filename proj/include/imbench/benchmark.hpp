#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imbench/dataset.hpp"

namespace imbench {

enum class MethodId {
    baseline,
    random_oversampling,
    smote,
    borderline_smote,
    svm_smote,
    kmeans_smote,
    adasyn,
    random_undersampling,
    cnn,
    enn,
    repeated_enn,
    all_knn,
    near_miss,
    tomek_links,
    one_sided_selection,
    ncl,
    cluster_centroids,
};

inline constexpr std::array<MethodId, 17> kAllMethods = {
    MethodId::baseline,        MethodId::random_oversampling, MethodId::smote,
    MethodId::borderline_smote, MethodId::svm_smote,          MethodId::kmeans_smote,
    MethodId::adasyn,          MethodId::random_undersampling, MethodId::cnn,
    MethodId::enn,             MethodId::repeated_enn,        MethodId::all_knn,
    MethodId::near_miss,       MethodId::tomek_links,         MethodId::one_sided_selection,
    MethodId::ncl,             MethodId::cluster_centroids,
};

std::string method_name(MethodId id);          // machine id, e.g. "borderline_smote"
std::string method_display_name(MethodId id);  // report label, e.g. "Borderline SMOTE"
std::optional<MethodId> method_from_name(std::string_view name); // accepts either form

// Flat parameter assignment; values are printed forms ("0.5", "3", "mode").
using ParamMap = std::map<std::string, std::string>;

struct MethodConfig {
    MethodId method = MethodId::baseline;
    ParamMap params;
    std::size_t config_index = 0; // position within the method's grid

    std::string key() const; // "smote[2]{k=3,ratio=1.0}"

    double param_double(const std::string& name) const;
    std::size_t param_size(const std::string& name) const;
    std::string param_string(const std::string& name) const;
};

// The full hyperparameter grid of one method. Counts per method are fixed:
// baseline 1, random over 2, SMOTE 4, Borderline 16, SVM SMOTE 8, KMeans
// SMOTE 4, ADASYN 4, random under 2, CNN 2, ENN 4, RENN 4, AllKNN 4,
// NearMiss 12, Tomek 1, OSS 2, NCL 8, ClusterCentroids 4; total 82.
std::vector<MethodConfig> expand_grid(MethodId id);
std::vector<MethodConfig> expand_grid(std::span<const MethodId> ids);

// Throws ConfigError when the assignment does not validate against the
// method's parameter schema.
void validate_config(const MethodConfig& config);

// Runs the configured resampler on train. The baseline returns its input
// unchanged. Method failures surface as ResampleError.
LabeledDataset apply_resampler(const LabeledDataset& train, const MethodConfig& config,
                               std::uint64_t seed);

enum class RunStatus { ok, resample_error, timeout, metric_undefined };

std::string run_status_name(RunStatus s);

struct MetricSet {
    double pr_auc = 0, roc_auc = 0, p_roc_auc = 0;
    double balanced_accuracy = 0, precision = 0, recall = 0, f1_max = 0, mcc = 0;

    double by_name(const std::string& metric) const;
};

inline constexpr std::array<const char*, 8> kMetricNames = {
    "pr_auc", "roc_auc", "p_roc_auc", "balanced_accuracy",
    "precision", "recall", "f1_max", "mcc",
};

struct EvaluationRecord {
    std::string dataset_id;
    MethodConfig config;
    RunStatus status = RunStatus::ok;
    std::optional<MetricSet> metrics; // present iff status == ok
    double resample_seconds = 0.0;
    std::string classifier_id; // winner of the CV selection, empty on failure
    std::uint64_t seed = 0;
    std::string message; // failure detail for non-ok statuses
};

struct RunOptions {
    double train_fraction = 0.75;
    std::size_t cv_folds = 5;
    double budget_seconds = 600.0;
    double decision_threshold = 0.5; // operating point of the scalar metrics
};

// One benchmark run: split, standardize on train, resample (timed, budgeted),
// CV-select a classifier on the resampled train, score the untouched test
// set. Resampler failures and budget overruns become record statuses, never
// exceptions.
EvaluationRecord run_one(const LabeledDataset& d, const std::string& dataset_id,
                         const MethodConfig& config, std::uint64_t seed,
                         const RunOptions& options = {});

struct NamedDataset {
    std::string id;
    LabeledDataset data;
};

// Cross product of datasets x expanded configs on a bounded worker pool.
// Per-run seeds derive from (seed, dataset id, config key), so results do not
// depend on scheduling; the returned records are in deterministic task order.
std::vector<EvaluationRecord> run_benchmark(std::span<const NamedDataset> datasets,
                                            std::span<const MethodId> methods,
                                            std::uint64_t seed, std::size_t parallelism,
                                            const RunOptions& options = {});

struct BenchmarkConfig {
    struct DatasetSpec {
        std::string id;
        std::string path;
        std::string label_column = "label";
        std::string positive_label = "1";
    };
    std::vector<DatasetSpec> datasets;
    std::vector<MethodId> methods; // empty = all 17
    std::uint64_t seed = 0;
    std::size_t parallelism = 1;
    double budget_seconds = 600.0;
    std::string output_dir = "bench_out";
};

BenchmarkConfig load_benchmark_config(const std::string& path);

void write_records_jsonl(std::span<const EvaluationRecord> records, const std::string& path);
std::vector<EvaluationRecord> read_records_jsonl(const std::string& path);
void write_records_csv(std::span<const EvaluationRecord> records, const std::string& path);

} // namespace imbench
