#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "imbench/dataset.hpp"
#include "imbench/errors.hpp"
#include "test_util.hpp"

using namespace imbench;

namespace {

std::string write_temp_csv(const char* name, const char* content) {
    const std::string path = std::string("/tmp/imbench_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_csv maps positive label to minority") {
    const auto path = write_temp_csv("labels.csv", "x,y,cls\n1,2,a\n3,4,b\n5,6,a\n");
    const auto loaded = load_csv(path, "cls", "a");
    CHECK(loaded.dataset.labels == std::vector<int>{1, 0, 1});
    CHECK(loaded.dataset.features.rows() == 3);
    CHECK(loaded.dataset.features.cols() == 2);
    CHECK(loaded.dataset.feature_names == std::vector<std::string>{"x", "y"});
    CHECK(loaded.imputed_cells == 0);
}

TEST_CASE("load_csv imputes empty numeric cells with the column mean") {
    const auto path = write_temp_csv("impute.csv", "a,b,cls\n2.0,1,x\n,1,y\n4.0,1,x\n");
    const auto loaded = load_csv(path, "cls", "x");
    CHECK(loaded.imputed_cells == 1);
    CHECK(loaded.dataset.features(1, 0) == doctest::Approx(3.0));
}

TEST_CASE("load_csv rejects single-class files") {
    const auto path = write_temp_csv("single.csv", "x,cls\n1,a\n2,a\n3,a\n");
    CHECK_THROWS_AS(load_csv(path, "cls", "a"), InvalidDatasetError);
}

TEST_CASE("load_csv reports the offending cell on parse failure") {
    const auto path = write_temp_csv("bad.csv", "x,cls\n1,a\nfoo,b\n");
    CHECK_THROWS_WITH_AS(load_csv(path, "cls", "a"),
                         doctest::Contains("row 3"), ParseError);
}

TEST_CASE("load_csv accepts a numeric label column index") {
    const auto path = write_temp_csv("byindex.csv", "x,y,z\n1,2,1\n3,4,0\n5,6,1\n");
    const auto loaded = load_csv(path, "2", "1");
    CHECK(loaded.dataset.labels == std::vector<int>{1, 0, 1});
}

TEST_CASE("imbalance_stats reproduces published ratios at 3 decimals") {
    auto ratio_of = [](std::size_t n_maj, std::size_t n_min) {
        LabeledDataset d;
        d.features = Matrix(n_maj + n_min, 0);
        d.labels.assign(n_maj, kMajorityLabel);
        d.labels.insert(d.labels.end(), n_min, kMinorityLabel);
        return imbalance_stats(d);
    };
    CHECK(std::round(ratio_of(284315, 492).ratio * 1000) / 1000 == doctest::Approx(577.876));
    CHECK(std::round(ratio_of(125975, 156).ratio * 1000) / 1000 == doctest::Approx(807.532));
    const auto balanced = ratio_of(100, 100);
    CHECK(balanced.ratio == doctest::Approx(1.0));
    CHECK(balanced.minority_prevalence == doctest::Approx(0.5));
}

TEST_CASE("imbalance_stats identity ratio = (1-p)/p") {
    for (auto [n_maj, n_min] : {std::pair<std::size_t, std::size_t>{17, 3},
                                {1000, 10},
                                {5, 4}}) {
        LabeledDataset d;
        d.features = Matrix(n_maj + n_min, 0);
        d.labels.assign(n_maj, kMajorityLabel);
        d.labels.insert(d.labels.end(), n_min, kMinorityLabel);
        const auto s = imbalance_stats(d);
        CHECK(s.ratio ==
              doctest::Approx((1.0 - s.minority_prevalence) / s.minority_prevalence)
                  .epsilon(1e-12));
    }
}

TEST_CASE("imbalance_stats rejects an empty class") {
    LabeledDataset d;
    d.features = Matrix(3, 0);
    d.labels = {1, 1, 1};
    CHECK_THROWS_AS(imbalance_stats(d), InvalidDatasetError);
}

TEST_CASE("stratified_split keeps exact proportions when they divide evenly") {
    const auto d = testutil::gaussian_dataset(8, 4, 2, 3.0, 7);
    const auto split = stratified_split(d, 0.75, 42);
    CHECK(split.train.majority_count() == 6);
    CHECK(split.train.minority_count() == 3);
    CHECK(split.test.majority_count() == 2);
    CHECK(split.test.minority_count() == 1);
}

TEST_CASE("stratified_split is deterministic and partitions the rows") {
    const auto d = testutil::gaussian_dataset(30, 9, 3, 3.0, 11);
    const auto a = stratified_split(d, 0.6, 99);
    const auto b = stratified_split(d, 0.6, 99);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);

    std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
    all.insert(a.test_indices.begin(), a.test_indices.end());
    CHECK(all.size() == d.size());
    CHECK(a.train_indices.size() + a.test_indices.size() == d.size());
}

TEST_CASE("stratified_split per-class counts stay within one of the ideal") {
    for (std::uint64_t seed : {1, 2, 3}) {
        for (double fraction : {0.5, 0.66, 0.75, 0.9}) {
            const auto d = testutil::gaussian_dataset(103, 17, 2, 3.0, seed);
            const auto split = stratified_split(d, fraction, seed);
            CHECK(std::fabs(static_cast<double>(split.train.majority_count()) -
                            fraction * 103.0) < 1.0);
            CHECK(std::fabs(static_cast<double>(split.train.minority_count()) -
                            fraction * 17.0) < 1.0);
        }
    }
}

TEST_CASE("stratified_split keeps minority in the test set on skewed data") {
    const auto d = testutil::gaussian_dataset(1000, 10, 2, 3.0, 5);
    const auto split = stratified_split(d, 0.75, 5);
    CHECK(split.test.minority_count() >= 1);
    const double source_prevalence = 10.0 / 1010.0;
    const double ideal = source_prevalence * static_cast<double>(split.test.size());
    CHECK(std::fabs(static_cast<double>(split.test.minority_count()) - ideal) < 1.0);
}

TEST_CASE("stratified_split rejects classes that cannot reach both sides") {
    LabeledDataset d = testutil::make_dataset({{0}, {1}, {2}}, {0, 0, 1});
    CHECK_THROWS_AS(stratified_split(d, 0.5, 1), InvalidSplitError);
}

TEST_CASE("standardize maps train columns to mean 0 std 1 and reuses params") {
    auto train = testutil::make_dataset({{0, 5}, {2, 5}}, {0, 1});
    auto test = testutil::make_dataset({{4, 5}}, {1});
    LabeledDataset* others[] = {&test};
    const auto params = standardize(train, others);

    CHECK(train.features(0, 0) == doctest::Approx(-1.0));
    CHECK(train.features(1, 0) == doctest::Approx(1.0));
    // constant column untouched
    CHECK(train.features(0, 1) == doctest::Approx(5.0));
    CHECK(params.stddev[1] == doctest::Approx(0.0));
    // test value 4 under train mean 1 / std 1
    CHECK(test.features(0, 0) == doctest::Approx(3.0));
    CHECK(test.features(0, 1) == doctest::Approx(5.0));
}

TEST_CASE("standardize normalizes every non-constant column of random data") {
    auto train = testutil::gaussian_dataset(200, 40, 4, 2.0, 31);
    const auto params = fit_standardization(train);
    apply_standardization(params, train);
    for (std::size_t c = 0; c < train.features.cols(); ++c) {
        double sum = 0;
        for (std::size_t r = 0; r < train.size(); ++r) sum += train.features(r, c);
        const double mean = sum / static_cast<double>(train.size());
        double ss = 0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            const double diff = train.features(r, c) - mean;
            ss += diff * diff;
        }
        const double stddev = std::sqrt(ss / static_cast<double>(train.size()));
        CHECK(std::fabs(mean) < 1e-9);
        CHECK(std::fabs(stddev - 1.0) < 1e-9);
    }
}
