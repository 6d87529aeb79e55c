#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "imbench/dataset.hpp"
#include "imbench/errors.hpp"
#include "imbench/oversampling.hpp"
#include "imbench/rng.hpp"
#include "test_util.hpp"

using namespace imbench;

namespace {

// checks the shared output contract of every oversampler
void check_oversample_contract(const LabeledDataset& in, const LabeledDataset& out,
                               double target_ratio) {
    // input rows pass through unchanged and in order
    REQUIRE(out.size() >= in.size());
    for (std::size_t r = 0; r < in.size(); ++r) {
        CHECK(out.labels[r] == in.labels[r]);
        for (std::size_t c = 0; c < in.features.cols(); ++c) {
            CHECK(out.features(r, c) == in.features(r, c));
        }
    }
    for (std::size_t r = in.size(); r < out.size(); ++r) {
        CHECK(out.labels[r] == kMinorityLabel);
    }
    CHECK(out.majority_count() == in.majority_count());
    const auto required = static_cast<std::size_t>(
        std::ceil(target_ratio * static_cast<double>(in.majority_count())));
    CHECK(out.minority_count() == required);
}

// every appended row lies within 1e-9 of a segment between two minority rows
void check_minority_segments(const LabeledDataset& in, const LabeledDataset& out) {
    const auto minority = in.indices_of(kMinorityLabel);
    for (std::size_t r = in.size(); r < out.size(); ++r) {
        double best = 1e300;
        for (std::size_t a = 0; a < minority.size(); ++a) {
            for (std::size_t b = a; b < minority.size(); ++b) {
                best = std::min(best, testutil::segment_distance(
                                          out.features.row(r), in.features.row(minority[a]),
                                          in.features.row(minority[b])));
            }
        }
        CHECK(best < 1e-9);
    }
}

} // namespace

TEST_CASE("smote_interpolate follows the segment formula") {
    const std::vector<double> base = {0, 0}, neighbor = {1, 1};
    CHECK(smote_interpolate(base, neighbor, 0.5) == std::vector<double>{0.5, 0.5});
    CHECK(smote_interpolate(base, neighbor, 0.0) == base);
    CHECK(smote_interpolate(base, neighbor, 1.0) == neighbor);
    CHECK(smote_interpolate(base, base, 0.77) == base);
}

TEST_CASE("random_oversample duplicates existing minority rows to the target") {
    const auto d = testutil::gaussian_dataset(10, 2, 2, 3.0, 3);
    const auto out = random_oversample(d, 1.0, 7);
    check_oversample_contract(d, out, 1.0);
    CHECK(out.minority_count() == 10);

    const auto half = random_oversample(d, 0.5, 7);
    CHECK(half.minority_count() == 5);

    // appended rows are copies of original minority rows
    const auto minority = d.indices_of(kMinorityLabel);
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        bool found = false;
        for (std::size_t m : minority) {
            if (std::equal(out.features.row(r).begin(), out.features.row(r).end(),
                           d.features.row(m).begin())) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("random_oversample rejects a ratio below the current one") {
    const auto d = testutil::gaussian_dataset(10, 8, 2, 3.0, 3);
    CHECK_THROWS_AS(random_oversample(d, 0.5, 1), ResampleError);
}

TEST_CASE("smote generates convex combinations of minority points") {
    const auto d = testutil::make_dataset({{5, 5}, {6, 5}, {5, 6}, {6, 6}, {0, 0}, {1, 1}},
                                          {0, 0, 0, 0, 1, 1});
    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 1;
    const auto out = smote(d, p, 9);
    check_oversample_contract(d, out, 1.0);
    check_minority_segments(d, out);
}

TEST_CASE("smote on identical minority points emits that point") {
    const auto d = testutil::make_dataset({{9, 9}, {8, 8}, {7, 9}, {2, 2}, {2, 2}},
                                          {0, 0, 0, 1, 1});
    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 1;
    const auto out = smote(d, p, 4);
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        CHECK(out.features(r, 0) == doctest::Approx(2.0));
        CHECK(out.features(r, 1) == doctest::Approx(2.0));
    }
}

TEST_CASE("smote synthetics stay inside the minority bounding box") {
    const auto d = testutil::gaussian_dataset(40, 12, 3, 3.0, 15);
    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 5;
    const auto out = smote(d, p, 21);
    const auto minority = d.indices_of(kMinorityLabel);
    for (std::size_t c = 0; c < d.features.cols(); ++c) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t m : minority) {
            lo = std::min(lo, d.features(m, c));
            hi = std::max(hi, d.features(m, c));
        }
        for (std::size_t r = d.size(); r < out.size(); ++r) {
            CHECK(out.features(r, c) >= lo - 1e-12);
            CHECK(out.features(r, c) <= hi + 1e-12);
        }
    }
}

TEST_CASE("smote rejects degenerate minorities") {
    const auto lone = testutil::make_dataset({{0}, {1}, {2}}, {0, 0, 1});
    OversampleParams p;
    CHECK_THROWS_AS(smote(lone, p, 1), ResampleError);

    const auto two = testutil::make_dataset({{0}, {1}, {2}, {3}}, {0, 0, 1, 1});
    p.k_neighbors = 5; // only 1 minority neighbour available
    CHECK_THROWS_AS(smote(two, p, 1), ResampleError);
}

TEST_CASE("smote is deterministic") {
    const auto d = testutil::gaussian_dataset(30, 10, 2, 3.0, 2);
    OversampleParams p;
    p.k_neighbors = 3;
    const auto a = smote(d, p, 55);
    const auto b = smote(d, p, 55);
    CHECK(a.features.data() == b.features.data());
    const auto c = smote(d, p, 56);
    CHECK(a.features.data() != c.features.data());
}

TEST_CASE("borderline_smote classifies NOISE, DANGER and SAFE correctly") {
    // minority at (0,0) swamped by majority -> NOISE; minority pair near the
    // boundary -> DANGER; tight minority cluster far away -> SAFE
    LabeledDataset d;
    d.features = Matrix(0, 2);
    auto add = [&](double x, double y, int label) {
        d.features.push_row(std::vector<double>{x, y});
        d.labels.push_back(label);
    };
    // noise point surrounded by 5 majority
    add(0, 0, 1);
    for (double a = 0; a < 5; ++a) add(0.1 * std::cos(a), 0.1 * std::sin(a), 0);
    // boundary pair: half their m=4 neighbourhood majority
    add(5, 0, 1);
    add(5.2, 0, 1);
    add(5.4, 0, 0);
    add(5.6, 0, 0);
    add(4.6, 0, 0);
    // safe cluster far away
    add(20, 20, 1);
    add(20.1, 20, 1);
    add(20, 20.1, 1);
    add(20.1, 20.1, 1);

    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 2;
    p.m_danger_neighbors = 4;
    p.kind = OversampleParams::BorderlineKind::borderline1;
    const auto out = borderline_smote(d, p, 17);
    check_oversample_contract(d, out, 1.0);

    // all synthetics must be seeded at the two DANGER points near x=5
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        CHECK(out.features(r, 0) > 4.0);
        CHECK(out.features(r, 0) < 6.0);
    }
}

TEST_CASE("borderline_smote errors when no minority point is in danger") {
    // minority cluster far from the majority: everything SAFE
    const auto d = testutil::make_dataset({{0, 0},
                                           {0.3, 0},
                                           {0, 0.3},
                                           {0.3, 0.3},
                                           {0.6, 0},
                                           {50, 50},
                                           {50.3, 50},
                                           {50, 50.3}},
                                          {0, 0, 0, 0, 0, 1, 1, 1});
    OversampleParams p;
    p.k_neighbors = 2;
    p.m_danger_neighbors = 3;
    CHECK_THROWS_WITH_AS(borderline_smote(d, p, 1), doctest::Contains("no borderline"),
                         ResampleError);
}

TEST_CASE("borderline_smote kind 2 interpolates at most halfway toward majority") {
    // a DANGER minority trio squeezed by majority
    const auto d = testutil::make_dataset(
        {{0, 0}, {0.5, 0}, {0.25, 0.4}, {1.0, 0}, {1.5, 0}, {-0.5, 0}, {10, 10}, {10.5, 10}},
        {1, 1, 1, 0, 0, 0, 0, 0});
    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 2;
    p.m_danger_neighbors = 4;
    p.kind = OversampleParams::BorderlineKind::borderline2;
    const auto out = borderline_smote(d, p, 23);
    check_oversample_contract(d, out, 1.0);
    // synthetics live on segments from a minority base toward any neighbour
    const auto minority = d.indices_of(kMinorityLabel);
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        double best = 1e300;
        for (std::size_t m : minority) {
            for (std::size_t o = 0; o < d.size(); ++o) {
                double dist = testutil::segment_distance(out.features.row(r),
                                                         d.features.row(m), d.features.row(o));
                // a majority endpoint only contributes its near half
                if (d.labels[o] == kMajorityLabel) {
                    std::vector<double> mid(d.features.cols());
                    for (std::size_t c = 0; c < mid.size(); ++c) {
                        mid[c] = 0.5 * (d.features(m, c) + d.features(o, c));
                    }
                    dist = testutil::segment_distance(out.features.row(r), d.features.row(m),
                                                      mid);
                }
                best = std::min(best, dist);
            }
        }
        CHECK(best < 1e-9);
    }
}

TEST_CASE("svm_smote seeds synthetics from boundary minority points") {
    // a tight minority cluster far from the majority plus one overlapping
    // minority point: only the overlap point sits inside the margin
    LabeledDataset d;
    d.features = Matrix(0, 1);
    auto add = [&](double x, int label) {
        d.features.push_row(std::vector<double>{x});
        d.labels.push_back(label);
    };
    for (double x : {0.0, 0.1, -0.1, 0.2, -0.2, 0.15}) add(x, 0);
    add(0.0, 1); // overlapping minority point
    for (double x : {10.0, 10.1, 10.2}) add(x, 1);

    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 2;
    p.svm_reg_c = 1.0;
    const auto out = svm_smote(d, p, 29);
    check_oversample_contract(d, out, 1.0);
    check_minority_segments(d, out);

    // every synthetic lies on a segment whose one endpoint is the overlap point
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        double best = 1e300;
        for (std::size_t m : d.indices_of(kMinorityLabel)) {
            best = std::min(best, testutil::segment_distance(out.features.row(r),
                                                             d.features.row(6),
                                                             d.features.row(m)));
        }
        CHECK(best < 1e-9);
    }
}

TEST_CASE("svm_smote errors without minority support vectors") {
    // perfectly separated, wide margin; with C large the slab is narrow, so
    // remote minority points are not margin-flagged
    LabeledDataset d;
    d.features = Matrix(0, 1);
    auto add = [&](double x, int label) {
        d.features.push_row(std::vector<double>{x});
        d.labels.push_back(label);
    };
    for (int i = 0; i < 50; ++i) add(-100.0 - i * 0.01, 0);
    for (int i = 0; i < 50; ++i) add(100.0 + i * 0.01, 1);
    OversampleParams p;
    p.k_neighbors = 3;
    p.svm_reg_c = 1000.0;
    p.svm_epochs = 400;
    CHECK_THROWS_AS(svm_smote(d, p, 31), ResampleError);
}

TEST_CASE("kmeans_smote fills only minority-dominated clusters") {
    LabeledDataset d;
    d.features = Matrix(0, 2);
    auto add = [&](double x, double y, int label) {
        d.features.push_row(std::vector<double>{x, y});
        d.labels.push_back(label);
    };
    // pure minority cluster near the origin, pure majority cluster at (50, 50)
    for (double dx : {0.0, 0.4, 0.8, 1.2}) add(dx, 0, 1);
    for (double dx : {0.0, 0.3, 0.6, 0.9, 1.2, 1.5}) add(50 + dx, 50, 0);

    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 2;
    p.n_clusters = 2;
    const auto out = kmeans_smote(d, p, 37);
    check_oversample_contract(d, out, 1.0);
    check_minority_segments(d, out);
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        CHECK(out.features(r, 0) < 10.0); // all inside the minority cluster
    }
}

TEST_CASE("kmeans_smote allocates proportionally to sparsity") {
    LabeledDataset d;
    d.features = Matrix(0, 1);
    auto add = [&](double x, int label) {
        d.features.push_row(std::vector<double>{x});
        d.labels.push_back(label);
    };
    // sparse minority pair (spread 2), dense minority pair (spread 1),
    // majority far away
    add(0.0, 1);
    add(2.0, 1);
    add(100.0, 1);
    add(101.0, 1);
    for (double x : {200, 201, 202, 203, 204, 205}) add(x, 0);

    OversampleParams p;
    p.target_ratio = 1.0; // G = 6 - 4 = 2
    p.k_neighbors = 1;
    p.n_clusters = 3;
    p.sparsity_exponent = 1.0;
    const auto out = kmeans_smote(d, p, 41);
    check_oversample_contract(d, out, 1.0);

    std::size_t in_sparse = 0, in_dense = 0;
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        const double x = out.features(r, 0);
        if (x <= 2.0) ++in_sparse;
        if (x >= 100.0 && x <= 101.0) ++in_dense;
    }
    CHECK(in_sparse + in_dense == 2);
    // 2 synthetics at weights 2:1 -> quotas 1.33/0.67 -> 1 each after the
    // largest-remainder pass, remainder already to the sparser cluster
    CHECK(in_sparse >= 1);
}

TEST_CASE("kmeans_smote errors when no cluster is minority-dominated") {
    const auto d = testutil::gaussian_dataset(30, 3, 2, 0.1, 43); // minority drowned
    OversampleParams p;
    p.k_neighbors = 1;
    p.n_clusters = 2;
    CHECK_THROWS_WITH_AS(kmeans_smote(d, p, 1), doctest::Contains("no minority-dominated"),
                         ResampleError);
}

TEST_CASE("adasyn allocates everything to the difficult point") {
    // m1 sits among majority (difficulty 1), m2's nearest neighbour is m1
    // (difficulty 0), so every synthetic is based at m1 toward m2
    const auto d = testutil::make_dataset({{0.0}, {0.05}, {-0.05}, {0.01}, {3.0}},
                                          {0, 0, 0, 1, 1});
    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 1;
    const auto out = adasyn(d, p, 47);
    check_oversample_contract(d, out, 1.0);
    check_minority_segments(d, out);
    // bases at m1 = 0.01 toward m2 = 3.0: synthetics in [0.01, 3.0]
    for (std::size_t r = d.size(); r < out.size(); ++r) {
        CHECK(out.features(r, 0) >= 0.01 - 1e-12);
        CHECK(out.features(r, 0) <= 3.0 + 1e-12);
    }
}

TEST_CASE("adasyn errors when no minority point has majority neighbours") {
    const auto d = testutil::make_dataset(
        {{0, 0}, {0.1, 0}, {0.2, 0}, {50, 50}, {50.1, 50}, {50.2, 50}}, {1, 1, 1, 0, 0, 0});
    OversampleParams p;
    p.k_neighbors = 2;
    CHECK_THROWS_WITH_AS(adasyn(d, p, 1), doctest::Contains("no adaptive"), ResampleError);
}

TEST_CASE("oversamplers are deterministic across the family") {
    const auto d = testutil::gaussian_dataset(60, 20, 2, 2.0, 51);
    OversampleParams p;
    p.target_ratio = 1.0;
    p.k_neighbors = 3;
    p.m_danger_neighbors = 5;
    for (int which = 0; which < 3; ++which) {
        auto run = [&](std::uint64_t seed) {
            switch (which) {
            case 0: return smote(d, p, seed);
            case 1: return borderline_smote(d, p, seed);
            default: return adasyn(d, p, seed);
            }
        };
        const auto a = run(99), b = run(99);
        CHECK(a.features.data() == b.features.data());
        CHECK(a.labels == b.labels);
    }
}
