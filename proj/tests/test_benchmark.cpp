#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "imbench/benchmark.hpp"
#include "imbench/errors.hpp"
#include "test_util.hpp"

using namespace imbench;

namespace {

bool records_equal_except_timing(const EvaluationRecord& a, const EvaluationRecord& b) {
    if (a.dataset_id != b.dataset_id || method_name(a.config.method) != method_name(b.config.method))
        return false;
    if (a.config.config_index != b.config.config_index || a.config.params != b.config.params)
        return false;
    if (a.status != b.status || a.classifier_id != b.classifier_id || a.seed != b.seed)
        return false;
    if (a.metrics.has_value() != b.metrics.has_value()) return false;
    if (a.metrics) {
        for (const char* m : kMetricNames) {
            if (a.metrics->by_name(m) != b.metrics->by_name(m)) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("expand_grid matches the fixed per-method counts") {
    const std::map<MethodId, std::size_t> expected = {
        {MethodId::baseline, 1},
        {MethodId::random_oversampling, 2},
        {MethodId::smote, 4},
        {MethodId::borderline_smote, 16},
        {MethodId::svm_smote, 8},
        {MethodId::kmeans_smote, 4},
        {MethodId::adasyn, 4},
        {MethodId::random_undersampling, 2},
        {MethodId::cnn, 2},
        {MethodId::enn, 4},
        {MethodId::repeated_enn, 4},
        {MethodId::all_knn, 4},
        {MethodId::near_miss, 12},
        {MethodId::tomek_links, 1},
        {MethodId::one_sided_selection, 2},
        {MethodId::ncl, 8},
        {MethodId::cluster_centroids, 4},
    };
    std::size_t total = 0;
    for (const auto& [id, count] : expected) {
        const auto grid = expand_grid(id);
        CHECK(grid.size() == count);
        total += grid.size();
        std::set<std::string> keys;
        for (const auto& config : grid) {
            CHECK_NOTHROW(validate_config(config));
            CHECK(config.method == id);
            keys.insert(config.key());
        }
        CHECK(keys.size() == grid.size()); // configs are distinct
    }
    CHECK(total == 82);
    CHECK(expand_grid(kAllMethods).size() == 82);
}

TEST_CASE("baseline grid is a single empty config") {
    const auto grid = expand_grid(MethodId::baseline);
    REQUIRE(grid.size() == 1);
    CHECK(grid[0].params.empty());
    CHECK(expand_grid(MethodId::tomek_links).size() == 1);
}

TEST_CASE("method names round-trip both spellings") {
    for (MethodId id : kAllMethods) {
        CHECK(method_from_name(method_name(id)) == id);
        CHECK(method_from_name(method_display_name(id)) == id);
    }
    CHECK(!method_from_name("no_such_method").has_value());
}

TEST_CASE("validate_config rejects out-of-schema parameters") {
    MethodConfig config;
    config.method = MethodId::smote;
    config.params = {{"ratio", "0.5"}, {"k", "3"}, {"bogus", "1"}};
    CHECK_THROWS_AS(validate_config(config), ConfigError);

    config.params = {{"ratio", "1.5"}, {"k", "3"}};
    CHECK_THROWS_AS(validate_config(config), ConfigError);

    config.params = {{"ratio", "0.5"}, {"k", "0"}};
    CHECK_THROWS_AS(validate_config(config), ConfigError);
}

TEST_CASE("run_one on the baseline leaves training untouched and is fast") {
    const auto d = testutil::gaussian_dataset(300, 30, 2, 3.0, 7);
    MethodConfig baseline;
    baseline.method = MethodId::baseline;
    const auto record = run_one(d, "toy", baseline, 42);
    CHECK(record.status == RunStatus::ok);
    REQUIRE(record.metrics.has_value());
    CHECK(record.resample_seconds < 0.1);
    CHECK(!record.classifier_id.empty());
    CHECK(record.metrics->roc_auc > 0.8); // well separated blobs
}

TEST_CASE("run_one is deterministic for equal seeds") {
    const auto d = testutil::gaussian_dataset(200, 20, 2, 3.0, 11);
    MethodConfig config = expand_grid(MethodId::smote)[1];
    const auto a = run_one(d, "toy", config, 5);
    const auto b = run_one(d, "toy", config, 5);
    CHECK(records_equal_except_timing(a, b));
}

TEST_CASE("run_one turns resampler failures into statuses") {
    // isolated minority cluster: ADASYN has no adaptive mass
    LabeledDataset d;
    d.features = Matrix(0, 1);
    auto add = [&](double x, int label) {
        d.features.push_row(std::vector<double>{x});
        d.labels.push_back(label);
    };
    for (int i = 0; i < 40; ++i) add(i * 0.01, 0);
    for (int i = 0; i < 12; ++i) add(1000.0 + i * 0.01, 1);
    MethodConfig config = expand_grid(MethodId::adasyn)[3]; // ratio 1.0, k 5
    const auto record = run_one(d, "isolated", config, 3);
    CHECK(record.status == RunStatus::resample_error);
    CHECK(!record.message.empty());
    CHECK(!record.metrics.has_value());
}

TEST_CASE("run_one flags budget overruns as timeout") {
    const auto d = testutil::gaussian_dataset(400, 40, 2, 2.0, 13);
    MethodConfig config = expand_grid(MethodId::cnn)[0];
    RunOptions options;
    options.budget_seconds = 0.0; // everything exceeds a zero budget
    const auto record = run_one(d, "toy", config, 1, options);
    CHECK(record.status == RunStatus::timeout);
}

TEST_CASE("resampling never touches test rows") {
    const auto d = testutil::gaussian_dataset(120, 24, 2, 3.0, 17);
    const auto split = stratified_split(d, 0.75, Rng::derive(31, "split"));
    LabeledDataset train = split.train, test = split.test;
    LabeledDataset* others[] = {&test};
    standardize(train, others);

    std::set<std::vector<double>> test_rows;
    for (std::size_t r = 0; r < test.size(); ++r) {
        test_rows.insert({test.features.row(r).begin(), test.features.row(r).end()});
    }
    for (MethodId id : {MethodId::smote, MethodId::random_oversampling, MethodId::enn,
                        MethodId::tomek_links}) {
        const auto resampled = apply_resampler(train, expand_grid(id)[0], 31);
        for (std::size_t r = 0; r < resampled.size(); ++r) {
            const std::vector<double> row(resampled.features.row(r).begin(),
                                          resampled.features.row(r).end());
            CHECK(!test_rows.count(row));
        }
    }
}

TEST_CASE("run_benchmark crosses datasets with configs") {
    const std::vector<NamedDataset> datasets = {
        {"a", testutil::gaussian_dataset(80, 16, 2, 3.0, 19)},
        {"b", testutil::gaussian_dataset(60, 12, 2, 3.0, 23)},
    };
    const std::vector<MethodId> baseline_only = {MethodId::baseline};
    auto records = run_benchmark({datasets.data(), 1}, baseline_only, 1, 1);
    CHECK(records.size() == 1);

    const std::vector<MethodId> two = {MethodId::baseline, MethodId::tomek_links};
    records = run_benchmark(datasets, two, 1, 1);
    CHECK(records.size() == 4);
}

TEST_CASE("run_benchmark results do not depend on parallelism") {
    const std::vector<NamedDataset> datasets = {
        {"a", testutil::gaussian_dataset(90, 18, 2, 3.0, 29)},
    };
    const std::vector<MethodId> methods = {MethodId::baseline, MethodId::smote,
                                           MethodId::random_undersampling};
    const auto serial = run_benchmark(datasets, methods, 7, 1);
    const auto parallel = run_benchmark(datasets, methods, 7, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(records_equal_except_timing(serial[i], parallel[i]));
    }
}

TEST_CASE("records survive a JSONL round trip") {
    const std::vector<NamedDataset> datasets = {
        {"roundtrip", testutil::gaussian_dataset(70, 14, 2, 3.0, 37)},
    };
    const std::vector<MethodId> methods = {MethodId::baseline, MethodId::random_oversampling};
    const auto records = run_benchmark(datasets, methods, 3, 1);

    const std::string path = "/tmp/imbench_records_test.jsonl";
    write_records_jsonl(records, path);
    const auto loaded = read_records_jsonl(path);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records_equal_except_timing(records[i], loaded[i]));
        CHECK(loaded[i].resample_seconds == records[i].resample_seconds);
    }
    std::remove(path.c_str());
}

TEST_CASE("records CSV has one line per record plus header") {
    const std::vector<NamedDataset> datasets = {
        {"csv", testutil::gaussian_dataset(50, 10, 2, 3.0, 41)},
    };
    const std::vector<MethodId> methods = {MethodId::baseline};
    const auto records = run_benchmark(datasets, methods, 3, 1);
    const std::string path = "/tmp/imbench_records_test.csv";
    write_records_csv(records, path);
    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == records.size() + 1);
    std::remove(path.c_str());
}

TEST_CASE("load_benchmark_config parses the documented schema") {
    const std::string path = "/tmp/imbench_config_test.json";
    {
        std::ofstream out(path);
        out << R"({
            "datasets": [{"id": "d1", "path": "d1.csv", "label_column": "y",
                          "positive_label": "pos"}],
            "methods": ["smote", "Tomek Links"],
            "seed": 9, "parallelism": 2, "budget_seconds": 30.5,
            "output_dir": "out"
        })";
    }
    const auto cfg = load_benchmark_config(path);
    CHECK(cfg.datasets.size() == 1);
    CHECK(cfg.datasets[0].label_column == "y");
    CHECK(cfg.methods == std::vector<MethodId>{MethodId::smote, MethodId::tomek_links});
    CHECK(cfg.seed == 9);
    CHECK(cfg.parallelism == 2);
    CHECK(cfg.budget_seconds == doctest::Approx(30.5));
    CHECK(cfg.output_dir == "out");
    std::remove(path.c_str());
}
