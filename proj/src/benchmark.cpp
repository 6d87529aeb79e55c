#include "imbench/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "imbench/csv.hpp"
#include "imbench/errors.hpp"
#include "imbench/format.hpp"
#include "imbench/learners.hpp"
#include "imbench/metrics.hpp"
#include "imbench/oversampling.hpp"
#include "imbench/rng.hpp"
#include "imbench/undersampling.hpp"

namespace imbench {

namespace {

struct MethodInfo {
    MethodId id;
    const char* name;
    const char* display;
};

constexpr MethodInfo kMethodInfo[] = {
    {MethodId::baseline, "baseline", "Baseline"},
    {MethodId::random_oversampling, "random_oversampling", "Random Oversampling"},
    {MethodId::smote, "smote", "SMOTE"},
    {MethodId::borderline_smote, "borderline_smote", "Borderline SMOTE"},
    {MethodId::svm_smote, "svm_smote", "SVM SMOTE"},
    {MethodId::kmeans_smote, "kmeans_smote", "KMeans SMOTE"},
    {MethodId::adasyn, "adasyn", "ADASYN"},
    {MethodId::random_undersampling, "random_undersampling", "Random Undersampling"},
    {MethodId::cnn, "cnn", "CNN"},
    {MethodId::enn, "enn", "ENN"},
    {MethodId::repeated_enn, "repeated_enn", "Repeated ENN"},
    {MethodId::all_knn, "all_knn", "All KNN"},
    {MethodId::near_miss, "near_miss", "Near Miss"},
    {MethodId::tomek_links, "tomek_links", "Tomek Links"},
    {MethodId::one_sided_selection, "one_sided_selection", "One-Sided Selection"},
    {MethodId::ncl, "ncl", "NCL"},
    {MethodId::cluster_centroids, "cluster_centroids", "Cluster Centroids"},
};

const MethodInfo& info_of(MethodId id) {
    for (const auto& info : kMethodInfo) {
        if (info.id == id) return info;
    }
    throw ConfigError("unknown method id");
}

ParamMap params_of(std::initializer_list<std::pair<const char*, std::string>> kvs) {
    ParamMap p;
    for (const auto& [k, v] : kvs) p.emplace(k, v);
    return p;
}

EditCriterion criterion_from(const std::string& s) {
    if (s == "mode") return EditCriterion::mode;
    if (s == "all") return EditCriterion::all;
    throw ConfigError("criterion must be 'mode' or 'all', got '" + s + "'");
}

} // namespace

std::string method_name(MethodId id) { return info_of(id).name; }
std::string method_display_name(MethodId id) { return info_of(id).display; }

std::optional<MethodId> method_from_name(std::string_view name) {
    for (const auto& info : kMethodInfo) {
        if (name == info.name || name == info.display) return info.id;
    }
    return std::nullopt;
}

std::string MethodConfig::key() const {
    std::ostringstream out;
    out << method_name(method) << '[' << config_index << ']';
    if (!params.empty()) {
        out << '{';
        bool first = true;
        for (const auto& [k, v] : params) {
            if (!first) out << ',';
            out << k << '=' << v;
            first = false;
        }
        out << '}';
    }
    return out.str();
}

double MethodConfig::param_double(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) throw ConfigError("missing parameter '" + name + "' for " + key());
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + name + "' = '" + it->second + "' is not numeric");
    }
}

std::size_t MethodConfig::param_size(const std::string& name) const {
    const double v = param_double(name);
    if (v < 0 || v != std::floor(v)) {
        throw ConfigError("parameter '" + name + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

std::string MethodConfig::param_string(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) throw ConfigError("missing parameter '" + name + "' for " + key());
    return it->second;
}

std::vector<MethodConfig> expand_grid(MethodId id) {
    const std::vector<std::string> ratios = {"0.5", "1.0"};
    const std::vector<std::string> ks = {"3", "5"};
    std::vector<ParamMap> grids;

    switch (id) {
    case MethodId::baseline:
        grids.push_back({});
        break;
    case MethodId::random_oversampling:
    case MethodId::random_undersampling:
        for (const auto& r : ratios) grids.push_back(params_of({{"ratio", r}}));
        break;
    case MethodId::smote:
    case MethodId::kmeans_smote:
    case MethodId::adasyn:
        for (const auto& r : ratios) {
            for (const auto& k : ks) grids.push_back(params_of({{"ratio", r}, {"k", k}}));
        }
        break;
    case MethodId::borderline_smote:
        for (const auto& r : ratios) {
            for (const auto& k : ks) {
                for (const std::string m : {"5", "10"}) {
                    for (const std::string kind : {"1", "2"}) {
                        grids.push_back(
                            params_of({{"ratio", r}, {"k", k}, {"m", m}, {"kind", kind}}));
                    }
                }
            }
        }
        break;
    case MethodId::svm_smote:
        for (const auto& r : ratios) {
            for (const auto& k : ks) {
                for (const std::string c : {"0.1", "1.0"}) {
                    grids.push_back(params_of({{"ratio", r}, {"k", k}, {"C", c}}));
                }
            }
        }
        break;
    case MethodId::cnn:
    case MethodId::one_sided_selection:
        for (const std::string s : {"1", "5"}) grids.push_back(params_of({{"seeds", s}}));
        break;
    case MethodId::enn:
    case MethodId::repeated_enn:
    case MethodId::all_knn:
        for (const auto& k : ks) {
            for (const std::string crit : {"mode", "all"}) {
                grids.push_back(params_of({{"k", k}, {"criterion", crit}}));
            }
        }
        break;
    case MethodId::near_miss:
        for (const std::string v : {"1", "2", "3"}) {
            for (const auto& k : ks) {
                for (const auto& r : ratios) {
                    grids.push_back(params_of({{"version", v}, {"k", k}, {"ratio", r}}));
                }
            }
        }
        break;
    case MethodId::tomek_links:
        grids.push_back({});
        break;
    case MethodId::ncl:
        for (const auto& k : ks) {
            for (const std::string crit : {"mode", "all"}) {
                for (const std::string t : {"0.3", "0.5"}) {
                    grids.push_back(
                        params_of({{"k", k}, {"criterion", crit}, {"threshold", t}}));
                }
            }
        }
        break;
    case MethodId::cluster_centroids:
        for (const auto& r : ratios) {
            for (const std::string restarts : {"1", "5"}) {
                grids.push_back(params_of({{"ratio", r}, {"restarts", restarts}}));
            }
        }
        break;
    }

    std::vector<MethodConfig> configs;
    configs.reserve(grids.size());
    for (std::size_t i = 0; i < grids.size(); ++i) {
        configs.push_back({id, std::move(grids[i]), i});
    }
    return configs;
}

std::vector<MethodConfig> expand_grid(std::span<const MethodId> ids) {
    std::vector<MethodConfig> out;
    for (MethodId id : ids) {
        auto one = expand_grid(id);
        out.insert(out.end(), std::make_move_iterator(one.begin()),
                   std::make_move_iterator(one.end()));
    }
    return out;
}

namespace {

const std::map<MethodId, std::vector<std::string>>& schema() {
    static const std::map<MethodId, std::vector<std::string>> s = {
        {MethodId::baseline, {}},
        {MethodId::random_oversampling, {"ratio"}},
        {MethodId::smote, {"ratio", "k"}},
        {MethodId::borderline_smote, {"ratio", "k", "m", "kind"}},
        {MethodId::svm_smote, {"ratio", "k", "C"}},
        {MethodId::kmeans_smote, {"ratio", "k", "clusters", "exponent"}},
        {MethodId::adasyn, {"ratio", "k"}},
        {MethodId::random_undersampling, {"ratio"}},
        {MethodId::cnn, {"seeds"}},
        {MethodId::enn, {"k", "criterion"}},
        {MethodId::repeated_enn, {"k", "criterion", "max_iter"}},
        {MethodId::all_knn, {"k", "criterion"}},
        {MethodId::near_miss, {"version", "k", "ratio"}},
        {MethodId::tomek_links, {}},
        {MethodId::one_sided_selection, {"seeds"}},
        {MethodId::ncl, {"k", "criterion", "threshold"}},
        {MethodId::cluster_centroids, {"ratio", "restarts"}},
    };
    return s;
}

} // namespace

void validate_config(const MethodConfig& config) {
    const auto& allowed = schema().at(config.method);
    for (const auto& [name, value] : config.params) {
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            throw ConfigError("parameter '" + name + "' is not valid for method " +
                              method_name(config.method));
        }
    }
    if (config.params.count("ratio")) {
        const double r = config.param_double("ratio");
        if (!(r > 0.0 && r <= 1.0)) throw ConfigError("ratio must be in (0, 1]");
    }
    if (config.params.count("k") && config.param_size("k") == 0) {
        throw ConfigError("k must be >= 1");
    }
    if (config.params.count("criterion")) criterion_from(config.param_string("criterion"));
    if (config.params.count("kind")) {
        const auto kind = config.param_string("kind");
        if (kind != "1" && kind != "2") throw ConfigError("kind must be 1 or 2");
    }
    if (config.params.count("version")) {
        const auto v = config.param_size("version");
        if (v < 1 || v > 3) throw ConfigError("version must be 1, 2 or 3");
    }
}

LabeledDataset apply_resampler(const LabeledDataset& train, const MethodConfig& config,
                               std::uint64_t seed) {
    validate_config(config);
    auto get_ratio = [&] { return config.param_double("ratio"); };
    auto get_k = [&] { return config.param_size("k"); };

    switch (config.method) {
    case MethodId::baseline:
        return train;
    case MethodId::random_oversampling:
        return random_oversample(train, get_ratio(), seed);
    case MethodId::smote: {
        OversampleParams p;
        p.target_ratio = get_ratio();
        p.k_neighbors = get_k();
        return smote(train, p, seed);
    }
    case MethodId::borderline_smote: {
        OversampleParams p;
        p.target_ratio = get_ratio();
        p.k_neighbors = get_k();
        p.m_danger_neighbors = config.param_size("m");
        p.kind = config.param_string("kind") == "1"
                     ? OversampleParams::BorderlineKind::borderline1
                     : OversampleParams::BorderlineKind::borderline2;
        return borderline_smote(train, p, seed);
    }
    case MethodId::svm_smote: {
        OversampleParams p;
        p.target_ratio = get_ratio();
        p.k_neighbors = get_k();
        p.svm_reg_c = config.param_double("C");
        return svm_smote(train, p, seed);
    }
    case MethodId::kmeans_smote: {
        OversampleParams p;
        p.target_ratio = get_ratio();
        p.k_neighbors = get_k();
        if (config.params.count("clusters")) p.n_clusters = config.param_size("clusters");
        if (config.params.count("exponent")) p.sparsity_exponent = config.param_double("exponent");
        return kmeans_smote(train, p, seed);
    }
    case MethodId::adasyn: {
        OversampleParams p;
        p.target_ratio = get_ratio();
        p.k_neighbors = get_k();
        return adasyn(train, p, seed);
    }
    case MethodId::random_undersampling:
        return random_undersample(train, get_ratio(), seed);
    case MethodId::cnn:
        return condensed_nn(train, config.param_size("seeds"), seed);
    case MethodId::enn:
        return edited_nn(train, get_k(), criterion_from(config.param_string("criterion")),
                         EnnMode::single);
    case MethodId::repeated_enn: {
        const std::size_t max_iter =
            config.params.count("max_iter") ? config.param_size("max_iter") : 100;
        return edited_nn(train, get_k(), criterion_from(config.param_string("criterion")),
                         EnnMode::repeated, max_iter);
    }
    case MethodId::all_knn:
        return edited_nn(train, get_k(), criterion_from(config.param_string("criterion")),
                         EnnMode::all_knn);
    case MethodId::near_miss:
        return near_miss(train, static_cast<int>(config.param_size("version")), get_k(),
                         get_ratio(), seed);
    case MethodId::tomek_links:
        return tomek_links(train);
    case MethodId::one_sided_selection:
        return one_sided_selection(train, config.param_size("seeds"), seed);
    case MethodId::ncl:
        return ncl(train, get_k(), criterion_from(config.param_string("criterion")),
                   config.param_double("threshold"));
    case MethodId::cluster_centroids:
        return cluster_centroids(train, get_ratio(), seed, config.param_size("restarts"));
    }
    throw ConfigError("unknown method id");
}

std::string run_status_name(RunStatus s) {
    switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::resample_error: return "resample_error";
    case RunStatus::timeout: return "timeout";
    case RunStatus::metric_undefined: return "metric_undefined";
    }
    return "unknown";
}

double MetricSet::by_name(const std::string& metric) const {
    if (metric == "pr_auc") return pr_auc;
    if (metric == "roc_auc") return roc_auc;
    if (metric == "p_roc_auc") return p_roc_auc;
    if (metric == "balanced_accuracy") return balanced_accuracy;
    if (metric == "precision") return precision;
    if (metric == "recall") return recall;
    if (metric == "f1_max") return f1_max;
    if (metric == "mcc") return mcc;
    throw ConfigError("unknown metric '" + metric + "'");
}

EvaluationRecord run_one(const LabeledDataset& d, const std::string& dataset_id,
                         const MethodConfig& config, std::uint64_t seed,
                         const RunOptions& options) {
    EvaluationRecord record;
    record.dataset_id = dataset_id;
    record.config = config;
    record.seed = seed;

    const auto split = stratified_split(d, options.train_fraction, Rng::derive(seed, "split"));
    LabeledDataset train = split.train;
    LabeledDataset test = split.test;
    LabeledDataset* test_ptr[] = {&test};
    standardize(train, test_ptr);

    LabeledDataset resampled;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        resampled = apply_resampler(train, config, Rng::derive(seed, "resample"));
    } catch (const ResampleError& e) {
        record.status = RunStatus::resample_error;
        record.message = e.what();
        record.resample_seconds = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();
        return record;
    }
    record.resample_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (record.resample_seconds > options.budget_seconds) {
        record.status = RunStatus::timeout;
        record.message = "resampling exceeded the budget";
        return record;
    }
    if (resampled.minority_count() == 0 || resampled.majority_count() == 0) {
        record.status = RunStatus::resample_error;
        record.message = "resampler removed an entire class";
        return record;
    }

    try {
        const auto selection = select_model_cv(resampled, default_classifier_candidates(),
                                               options.cv_folds, Rng::derive(seed, "cv"));
        record.classifier_id = selection.classifier.id();

        ScoredPredictions sp{selection.classifier.score(test.features), test.labels};
        MetricSet m;
        m.pr_auc = pr_auc(sp);
        m.roc_auc = roc_auc(sp);
        m.p_roc_auc = partial_roc_auc(sp, imbalance_stats(test).minority_prevalence);
        const auto scalars = scalar_metrics(sp, options.decision_threshold);
        m.balanced_accuracy = scalars.balanced_accuracy;
        m.precision = scalars.precision;
        m.recall = scalars.recall;
        m.mcc = scalars.mcc;
        m.f1_max = f1_max(sp);
        record.metrics = m;
        record.status = RunStatus::ok;
    } catch (const std::exception& e) {
        record.status = RunStatus::metric_undefined;
        record.message = e.what();
    }
    return record;
}

std::vector<EvaluationRecord> run_benchmark(std::span<const NamedDataset> datasets,
                                            std::span<const MethodId> methods,
                                            std::uint64_t seed, std::size_t parallelism,
                                            const RunOptions& options) {
    struct Task {
        const NamedDataset* dataset;
        MethodConfig config;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& ds : datasets) {
        for (MethodId id : methods) {
            for (auto& config : expand_grid(id)) {
                const std::uint64_t run_seed = Rng::derive(seed, ds.id + "/" + config.key());
                tasks.push_back({&ds, std::move(config), run_seed});
            }
        }
    }

    std::vector<EvaluationRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            records[i] = run_one(tasks[i].dataset->data, tasks[i].dataset->id, tasks[i].config,
                                 tasks[i].seed, options);
        }
    };

    const std::size_t n_workers = std::max<std::size_t>(1, parallelism);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return records;
}

namespace {

nlohmann::json record_to_json(const EvaluationRecord& r) {
    nlohmann::json j;
    j["dataset"] = r.dataset_id;
    j["method"] = method_name(r.config.method);
    j["config_index"] = r.config.config_index;
    j["params"] = r.config.params;
    j["status"] = run_status_name(r.status);
    j["seed"] = r.seed;
    j["resample_seconds"] = r.resample_seconds;
    if (!r.classifier_id.empty()) j["classifier"] = r.classifier_id;
    if (!r.message.empty()) j["message"] = r.message;
    if (r.metrics) {
        nlohmann::json m;
        for (const char* name : kMetricNames) m[name] = r.metrics->by_name(name);
        j["metrics"] = m;
    }
    return j;
}

RunStatus status_from_name(const std::string& s) {
    for (RunStatus st : {RunStatus::ok, RunStatus::resample_error, RunStatus::timeout,
                         RunStatus::metric_undefined}) {
        if (run_status_name(st) == s) return st;
    }
    throw ParseError("unknown run status '" + s + "'");
}

} // namespace

void write_records_jsonl(std::span<const EvaluationRecord> records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& r : records) {
        out << record_to_json(r).dump() << '\n';
    }
}

std::vector<EvaluationRecord> read_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<EvaluationRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        EvaluationRecord r;
        r.dataset_id = j.at("dataset").get<std::string>();
        const auto method = method_from_name(j.at("method").get<std::string>());
        if (!method) throw ParseError("unknown method in records: " + line);
        r.config.method = *method;
        r.config.config_index = j.at("config_index").get<std::size_t>();
        r.config.params = j.at("params").get<ParamMap>();
        r.status = status_from_name(j.at("status").get<std::string>());
        r.seed = j.at("seed").get<std::uint64_t>();
        r.resample_seconds = j.at("resample_seconds").get<double>();
        if (j.contains("classifier")) r.classifier_id = j["classifier"].get<std::string>();
        if (j.contains("message")) r.message = j["message"].get<std::string>();
        if (j.contains("metrics")) {
            MetricSet m;
            m.pr_auc = j["metrics"].at("pr_auc").get<double>();
            m.roc_auc = j["metrics"].at("roc_auc").get<double>();
            m.p_roc_auc = j["metrics"].at("p_roc_auc").get<double>();
            m.balanced_accuracy = j["metrics"].at("balanced_accuracy").get<double>();
            m.precision = j["metrics"].at("precision").get<double>();
            m.recall = j["metrics"].at("recall").get<double>();
            m.f1_max = j["metrics"].at("f1_max").get<double>();
            m.mcc = j["metrics"].at("mcc").get<double>();
            r.metrics = m;
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_records_csv(std::span<const EvaluationRecord> records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "dataset,method,config_index,params,status";
    for (const char* name : kMetricNames) out << ',' << name;
    out << ",resample_seconds,classifier,seed\n";
    for (const auto& r : records) {
        std::ostringstream params;
        bool first = true;
        for (const auto& [k, v] : r.config.params) {
            if (!first) params << ' ';
            params << k << '=' << v;
            first = false;
        }
        out << csv_escape(r.dataset_id) << ',' << method_name(r.config.method) << ','
            << r.config.config_index << ',' << csv_escape(params.str()) << ','
            << run_status_name(r.status);
        for (const char* name : kMetricNames) {
            out << ',';
            if (r.metrics) out << format_double(r.metrics->by_name(name));
        }
        out << ',' << format_double(r.resample_seconds) << ',' << csv_escape(r.classifier_id)
            << ',' << r.seed << '\n';
    }
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()));
    }
    BenchmarkConfig cfg;
    for (const auto& d : j.at("datasets")) {
        BenchmarkConfig::DatasetSpec spec;
        spec.id = d.at("id").get<std::string>();
        spec.path = d.at("path").get<std::string>();
        if (d.contains("label_column")) spec.label_column = d["label_column"].get<std::string>();
        if (d.contains("positive_label")) {
            spec.positive_label = d["positive_label"].get<std::string>();
        }
        cfg.datasets.push_back(std::move(spec));
    }
    if (j.contains("methods")) {
        for (const auto& m : j["methods"]) {
            const auto id = method_from_name(m.get<std::string>());
            if (!id) throw ConfigError("unknown method '" + m.get<std::string>() + "' in config");
            cfg.methods.push_back(*id);
        }
    }
    if (cfg.methods.empty()) {
        cfg.methods.assign(kAllMethods.begin(), kAllMethods.end());
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<std::size_t>();
    if (j.contains("budget_seconds")) cfg.budget_seconds = j["budget_seconds"].get<double>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    return cfg;
}

} // namespace imbench
