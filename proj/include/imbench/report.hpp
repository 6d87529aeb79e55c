#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imbench/benchmark.hpp"

namespace imbench {

// One metric's scores: rows = datasets, columns = methods; nullopt marks a
// method that produced no successful run on that dataset.
struct ScoreTable {
    std::vector<std::string> datasets;
    std::vector<std::string> methods; // display names
    std::vector<std::vector<std::optional<double>>> values;
};

struct RankOptions {
    bool higher_is_better = true;
    enum class TiePolicy { average, min, max } ties = TiePolicy::average;
    // Missing cells are excluded from their row's ranking (the alternative,
    // worst-rank, is deliberately not the default).
};

// Ranks one row of scores: 1 = best, ties averaged, missing cells stay
// missing. Throws std::invalid_argument with fewer than 2 present scores.
std::vector<std::optional<double>> compute_ranks(std::span<const std::optional<double>> scores,
                                                 const RankOptions& options = {});

struct RankTable {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<std::vector<std::optional<double>>> ranks;
};

RankTable rank_scores(const ScoreTable& scores, const RankOptions& options = {});

struct RankSummary {
    std::string method;
    double mean = 0, min = 0, max = 0, p25 = 0, p50 = 0, p75 = 0;
    std::size_t n = 0; // datasets with a rank (the "// N" bookkeeping)
};

// Per-method statistics over non-missing ranks; methods with zero ranked
// datasets are omitted. Percentiles use linear interpolation.
std::vector<RankSummary> aggregate_ranks(const RankTable& table);

struct FriedmanResult {
    double chi_square = 0;
    double p_value = 1;
    std::size_t k = 0;         // methods compared
    std::size_t n_datasets = 0; // complete rows used
    std::size_t dropped_rows = 0;
};

// Friedman chi-square over the selected methods, restricted to datasets where
// all of them are present (ranks recomputed among those methods only):
// chi2 = 12N/(k(k+1)) * sum_j mean_rank_j^2 - 3N(k+1), k-1 degrees of freedom.
FriedmanResult friedman_statistic(const RankTable& table,
                                  std::span<const std::string> methods);

// Upper tail of the chi-square distribution (regularized incomplete gamma).
double chi_square_upper_tail(double x, double dof);

// Best score per (dataset, method) over status-ok records: each method is
// represented by its best hyperparameter configuration for this metric. This
// is the single reduction point between raw records and ranking.
ScoreTable best_scores(std::span<const EvaluationRecord> records, const std::string& metric);

// Per-dataset published-results table: method -> metric -> value, with
// missing cells (letter "NA" in the CSV) as nullopt. Layout: header
// "method,<8 metric columns>".
using DetailTable = std::map<std::string, std::map<std::string, std::optional<double>>>;
DetailTable load_detail_csv(const std::string& path);

// Builds a ScoreTable for one metric from several per-dataset detail tables.
ScoreTable score_table_from_details(std::span<const std::pair<std::string, DetailTable>> tables,
                                    const std::string& metric,
                                    std::span<const std::string> methods);

struct RuntimeSummary {
    std::string method;
    double min_seconds = 0, mean_seconds = 0, max_seconds = 0;
    std::size_t n = 0;
};

std::vector<RuntimeSummary> summarize_runtimes(std::span<const EvaluationRecord> records);

struct ReportOptions {
    std::vector<std::string> metrics = {"pr_auc", "roc_auc", "p_roc_auc"};
    bool write_svg = true;
};

// Writes ranks_<metric>.csv, summary.json, runtimes.csv and (optionally)
// ranks_<metric>.svg strip plots into output_dir. Throws on an empty record
// list or an unwritable directory.
void emit_report(std::span<const EvaluationRecord> records, const std::string& output_dir,
                 const ReportOptions& options = {});

// One strip plot: a row per method carrying min/mean/max marks in dark grey
// and 25/50/75 percentile marks in blue.
std::string render_rank_svg(std::span<const RankSummary> summaries, const std::string& title);

} // namespace imbench
