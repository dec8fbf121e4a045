#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mirate/errors.hpp"
#include "mirate/probe.hpp"
#include "mirate/rng.hpp"
#include "mirate/synthetic.hpp"

namespace mirate {
namespace {

std::vector<int> balanced_labels(std::size_t n, int classes) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
    return labels;
}

SampleMatrix noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    CounterRng rng(seed);
    SampleMatrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

TEST(DrawProbeSubset, ExhaustiveSubset) {
    const auto idx = draw_probe_subset(10, 10, 3);
    ASSERT_EQ(idx.size(), 10U);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(idx[i], i);
}

TEST(DrawProbeSubset, DeterministicAndSeedSensitive) {
    const auto a = draw_probe_subset(60000, 1000, 42);
    EXPECT_EQ(a, draw_probe_subset(60000, 1000, 42));
    EXPECT_NE(a, draw_probe_subset(60000, 1000, 43));
    EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 1000U);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_LT(a.back(), 60000U);
}

TEST(DrawProbeSubset, TooLarge) {
    EXPECT_THROW(draw_probe_subset(5, 6, 1), ParameterError);
}

TEST(LabelsToReal, ZeroJitter) {
    const std::vector<int> labels{0, 1, 2};
    EXPECT_EQ(labels_to_real(labels, 0.0, 1), (SampleMatrix{{0.0}, {1.0}, {2.0}}));
}

TEST(LabelsToReal, JitterSeparatesTies) {
    const std::vector<int> labels{5, 5, 5};
    const auto m = labels_to_real(labels, 1e-10, 9);
    std::set<double> values(m.values().begin(), m.values().end());
    EXPECT_EQ(values.size(), 3U);
    for (double v : values) {
        EXPECT_GE(v, 5.0);
        EXPECT_LT(v, 5.0 + 2e-10);
    }
}

TEST(LabelsToReal, EmptyInput) {
    const auto m = labels_to_real({}, 1e-10, 1);
    EXPECT_EQ(m.rows(), 0U);
    EXPECT_THROW(ksg_mi(m, m, 4), ParameterError);
}

TEST(TileFeatures, Identity) {
    const SampleMatrix m{{1.0, 2.0}, {3.0, 4.0}};
    EXPECT_EQ(tile_features(m, 1), m);
}

TEST(TileFeatures, Construction) {
    const SampleMatrix m{{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
    const auto t = tile_features(m, 2);
    ASSERT_EQ(t.rows(), 2U);
    ASSERT_EQ(t.cols(), 6U);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(t(r, c), t(r, c + 3));
    }
}

TEST(TileFeatures, LeavesEstimateUnchanged) {
    auto [x, y] = gen_gaussian_pair(500, 0.7, 4);
    const auto xj = add_jitter(x, kDefaultJitter, 1);
    const auto yj = add_jitter(y, kDefaultJitter, 2);
    EXPECT_NEAR(ksg_mi(tile_features(xj, 2), tile_features(yj, 2)).value, ksg_mi(xj, yj).value,
                1e-9);
}

TEST(MakeProbeSubset, AlignsRowsAndLabels) {
    SampleMatrix x(50, 2);
    std::vector<int> labels(50);
    for (std::size_t i = 0; i < 50; ++i) {
        x(i, 0) = static_cast<double>(i);
        labels[i] = static_cast<int>(i % 3);
    }
    const auto p = make_probe_subset(x, labels, 20, 5);
    ASSERT_EQ(p.indices.size(), 20U);
    for (std::size_t j = 0; j < 20; ++j) {
        EXPECT_EQ(p.x_probe(j, 0), static_cast<double>(p.indices[j]));
        EXPECT_EQ(p.labels[j], labels[p.indices[j]]);
        EXPECT_NEAR(p.y_probe(j, 0), labels[p.indices[j]], 1e-9);
    }
    EXPECT_EQ(p.x_probe, make_probe_subset(x, labels, 20, 5).x_probe);
}

TEST(ComputeReference, IndependentInputsNearZero) {
    const auto labels = balanced_labels(1000, 10);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        acc += compute_reference(noise(1000, 3, 50 + s), labels, 4, 1, s).ixy.value;
    }
    EXPECT_NEAR(acc / 5.0, 0.0, 0.05);
}

TEST(ComputeReference, TilingFactorOneVersusThree) {
    auto data = gen_blobs(100, 4, 5, 2.0, 8);
    const auto a = compute_reference(data.train_x, data.train_labels, 4, 1, 21);
    const auto b = compute_reference(data.train_x, data.train_labels, 4, 3, 21);
    EXPECT_EQ(b.tiling_factor, 3);
    EXPECT_NEAR(a.ixy.value, b.ixy.value, 1e-9);
    EXPECT_GT(a.ixy.value, 0.0);
}

TEST(ComputeIhy, OneHotPredictionsReachLabelEntropy) {
    const auto labels = balanced_labels(1000, 10);
    SampleMatrix onehot(1000, 10);
    for (std::size_t i = 0; i < 1000; ++i) onehot(i, static_cast<std::size_t>(labels[i])) = 1.0;
    const auto y = labels_to_real(labels, kDefaultJitter, 77);
    const auto est = compute_ihy(onehot, y, 4, 78);
    EXPECT_NEAR(est.value, std::log(10.0), 0.15);
    EXPECT_LE(est.value, std::log(10.0) + 0.3);
    EXPECT_EQ(est.jitter_seed, 78U);
}

TEST(ComputeIhy, NoiseActivationsNearZero) {
    const auto labels = balanced_labels(1000, 10);
    const auto y = labels_to_real(labels, kDefaultJitter, 3);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) acc += compute_ihy(noise(1000, 4, 90 + s), y, 4, s).value;
    EXPECT_NEAR(acc / 5.0, 0.0, 0.05);
}

TEST(ComputeIhy, RowMismatch) {
    EXPECT_THROW(compute_ihy(SampleMatrix(10, 2), SampleMatrix(9, 1), 4, 1), ContractError);
}

TEST(MiCurve, ConstantInputIsNearZero) {
    const SampleMatrix x(400, 1, 0.0);
    const auto y = labels_to_real(balanced_labels(400, 4), 0.0, 1);
    const std::vector<std::size_t> sizes{100};
    const auto pts = mi_vs_sample_size(x, y, sizes, 2, 4, 3);
    ASSERT_EQ(pts.size(), 1U);
    EXPECT_NEAR(pts[0].mean, 0.0, 0.15);
    EXPECT_EQ(pts[0].repeats, 2);
}

TEST(MiCurve, SpreadShrinksWithSampleSize) {
    auto [x, y] = gen_gaussian_pair(10000, 0.9, 5);
    const std::vector<std::size_t> sizes{100, 500, 2000};
    const auto pts = mi_vs_sample_size(x, y, sizes, 10, 4, 6);
    ASSERT_EQ(pts.size(), 3U);
    EXPECT_GT(pts[0].std, pts[1].std);
    EXPECT_GT(pts[1].std, pts[2].std);
    const double tol = 3.0 * pts[2].std / std::sqrt(10.0);
    for (const auto& p : pts) {
        const double band = 3.0 * p.std / std::sqrt(10.0) + tol;
        EXPECT_NEAR(p.mean, pts[2].mean, band) << "size " << p.sample_size;
    }
}

TEST(MiCurve, ParameterErrors) {
    auto [x, y] = gen_gaussian_pair(100, 0.5, 1);
    const std::vector<std::size_t> too_big{200};
    EXPECT_THROW(mi_vs_sample_size(x, y, too_big, 2, 4, 1), ParameterError);
    const std::vector<std::size_t> ok{50};
    EXPECT_THROW(mi_vs_sample_size(x, y, ok, 1, 4, 1), ParameterError);
}

TEST(MiCurve, CsvLayout) {
    const std::vector<MiCurvePoint> pts{{100, 1.5, 0.25, 10}};
    std::ostringstream os;
    write_curve_csv(os, pts);
    EXPECT_EQ(os.str(), "sample_size,mean_nats,std_nats,repeats\n100,1.5,0.25,10\n");
}

}  // namespace
}  // namespace mirate
