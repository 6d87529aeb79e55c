#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imbench/benchmark.hpp"
#include "imbench/csv.hpp"
#include "imbench/dataset.hpp"
#include "imbench/errors.hpp"
#include "imbench/format.hpp"
#include "imbench/metrics.hpp"
#include "imbench/report.hpp"

namespace {

using namespace imbench;

ParamMap parse_params(const std::string& spec) {
    ParamMap params;
    if (spec.empty()) return params;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key=value in --params, got '" + item + "'");
        }
        params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return params;
}

void write_dataset_csv(const LabeledDataset& d, const std::string& path,
                       const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t c = 0; c < d.features.cols(); ++c) {
        const std::string name = c < d.feature_names.size() ? d.feature_names[c]
                                                            : "f" + std::to_string(c);
        out << csv_escape(name) << ',';
    }
    out << csv_escape(label_column) << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.features.cols(); ++c) {
            out << format_double(d.features(r, c)) << ',';
        }
        out << d.labels[r] << '\n';
    }
}

int cmd_run(const std::string& config_path) {
    const auto cfg = load_benchmark_config(config_path);
    std::vector<NamedDataset> datasets;
    for (const auto& spec : cfg.datasets) {
        auto loaded = load_csv(spec.path, spec.label_column, spec.positive_label);
        if (loaded.imputed_cells > 0) {
            std::cerr << spec.id << ": imputed " << loaded.imputed_cells
                      << " missing cells with column means\n";
        }
        datasets.push_back({spec.id, std::move(loaded.dataset)});
    }

    RunOptions options;
    options.budget_seconds = cfg.budget_seconds;
    const auto records =
        run_benchmark(datasets, cfg.methods, cfg.seed, cfg.parallelism, options);

    std::filesystem::create_directories(cfg.output_dir);
    const auto dir = std::filesystem::path(cfg.output_dir);
    write_records_jsonl(records, (dir / "records.jsonl").string());
    write_records_csv(records, (dir / "records.csv").string());

    std::map<std::string, std::size_t> status_counts;
    for (const auto& r : records) ++status_counts[run_status_name(r.status)];
    std::cout << records.size() << " runs -> " << (dir / "records.jsonl").string() << "\n";
    for (const auto& [status, count] : status_counts) {
        std::cout << "  " << status << ": " << count << '\n';
    }
    return 0;
}

int cmd_report(const std::string& records_path, const std::string& metric,
               const std::string& out_dir, bool svg, const std::string& friedman_methods) {
    const auto records = read_records_jsonl(records_path);
    ReportOptions options;
    options.write_svg = svg;
    emit_report(records, out_dir, options);

    const auto table = rank_scores(best_scores(records, metric));
    std::cout << "mean ranks by " << metric << " (1 = best):\n";
    for (const auto& s : aggregate_ranks(table)) {
        std::cout << "  " << s.method << ": " << format_double(s.mean) << " // " << s.n << '\n';
    }

    if (!friedman_methods.empty()) {
        std::vector<std::string> methods;
        std::stringstream ss(friedman_methods);
        std::string name;
        while (std::getline(ss, name, ',')) {
            const auto id = method_from_name(name);
            if (!id) throw ConfigError("unknown method '" + name + "' in --friedman");
            methods.push_back(method_display_name(*id));
        }
        const auto result = friedman_statistic(table, methods);
        std::cout << "friedman(" << metric << "): chi2=" << format_double(result.chi_square)
                  << " k=" << result.k << " N=" << result.n_datasets
                  << " p=" << format_double(result.p_value);
        if (result.dropped_rows > 0) {
            std::cout << " (dropped " << result.dropped_rows << " incomplete datasets)";
        }
        std::cout << '\n';
    }
    std::cout << "report files in " << out_dir << '\n';
    return 0;
}

int cmd_resample(const std::string& method, const std::string& params_spec,
                 const std::string& in_path, const std::string& out_path, std::uint64_t seed,
                 const std::string& label_column, const std::string& positive_label) {
    const auto id = method_from_name(method);
    if (!id) throw ConfigError("unknown method '" + method + "'");
    MethodConfig config;
    config.method = *id;
    config.params = parse_params(params_spec);
    validate_config(config);

    const auto loaded = load_csv(in_path, label_column, positive_label);
    const auto before = imbalance_stats(loaded.dataset);
    const auto resampled = apply_resampler(loaded.dataset, config, seed);
    const auto after = imbalance_stats(resampled);
    write_dataset_csv(resampled, out_path, label_column);

    std::cout << method_name(*id) << ": " << loaded.dataset.size() << " rows (imbalance "
              << format_double(before.ratio) << ") -> " << resampled.size()
              << " rows (imbalance " << format_double(after.ratio) << ")\n";
    return 0;
}

int cmd_metrics(const std::string& scores_path, double threshold) {
    const auto rows = read_csv_file(scores_path);
    if (rows.size() < 2) throw ParseError("scores file needs a header and data rows");
    const auto& header = rows.front();
    std::size_t score_col = header.size(), label_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "score") score_col = i;
        if (header[i] == "label") label_col = i;
    }
    if (score_col == header.size() || label_col == header.size()) {
        throw ParseError("scores file needs 'score' and 'label' columns");
    }
    ScoredPredictions sp;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        sp.scores.push_back(std::stod(rows[r][score_col]));
        sp.labels.push_back(std::stoi(rows[r][label_col]));
    }

    std::size_t positives = 0;
    for (int l : sp.labels) positives += l == 1;
    const double prevalence =
        static_cast<double>(positives) / static_cast<double>(sp.labels.size());

    std::cout << "n=" << sp.labels.size() << " positives=" << positives << '\n';
    std::cout << "pr_auc=" << format_double(pr_auc(sp)) << '\n';
    std::cout << "roc_auc=" << format_double(roc_auc(sp)) << '\n';
    std::cout << "p_roc_auc=" << format_double(partial_roc_auc(sp, prevalence))
              << " (cap=" << format_double(prevalence) << ")\n";
    const auto scalars = scalar_metrics(sp, threshold);
    std::cout << "balanced_accuracy=" << format_double(scalars.balanced_accuracy) << '\n';
    std::cout << "precision=" << format_double(scalars.precision) << '\n';
    std::cout << "recall=" << format_double(scalars.recall) << '\n';
    std::cout << "f1_max=" << format_double(f1_max(sp)) << '\n';
    std::cout << "mcc=" << format_double(scalars.mcc) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Class-imbalance resampling benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the benchmark from a JSON config");
    run->add_option("--config", config_path, "JSON config file")->required();

    std::string records_path, metric = "pr_auc", report_dir = "report", friedman_methods;
    bool no_svg = false;
    auto* report = app.add_subcommand("report", "aggregate ranks from a records file");
    report->add_option("--records", records_path, "records.jsonl from a run")->required();
    report->add_option("--metric", metric, "metric for the printed mean ranks");
    report->add_option("--out", report_dir, "output directory");
    report->add_flag("--no-svg", no_svg, "skip the SVG strip plots");
    report->add_option("--friedman", friedman_methods,
                       "comma-separated methods for a Friedman rank test");

    std::string method, params_spec, in_path, out_path;
    std::string label_column = "label", positive_label = "1";
    std::uint64_t seed = 0;
    auto* resample = app.add_subcommand("resample", "resample one CSV dataset");
    resample->add_option("--method", method, "method name")->required();
    resample->add_option("--params", params_spec, "comma-separated key=value parameters");
    resample->add_option("--in", in_path, "input CSV")->required();
    resample->add_option("--out", out_path, "output CSV")->required();
    resample->add_option("--seed", seed, "random seed");
    resample->add_option("--label-column", label_column, "label column name");
    resample->add_option("--positive-label", positive_label, "minority label value");

    std::string scores_path;
    double threshold = 0.5;
    auto* metrics = app.add_subcommand("metrics", "evaluate a score,label CSV");
    metrics->add_option("--scores", scores_path, "CSV with score and label columns")->required();
    metrics->add_option("--threshold", threshold, "operating point for the scalar metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (report->parsed()) {
            return cmd_report(records_path, metric, report_dir, !no_svg, friedman_methods);
        }
        if (resample->parsed()) {
            return cmd_resample(method, params_spec, in_path, out_path, seed, label_column,
                                positive_label);
        }
        if (metrics->parsed()) return cmd_metrics(scores_path, threshold);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
