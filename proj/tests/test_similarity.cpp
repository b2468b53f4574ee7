#include <gtest/gtest.h>

#include <random>

#include "lnip/errors.hpp"
#include "lnip/similarity.hpp"

using namespace lnip;

namespace {

double dist(DistanceMetric m, std::vector<double> a, std::vector<double> b) { return distance(m, a, b); }

std::vector<double> random_counts(std::mt19937& rng, std::size_t n) {
    // sparse-ish counts so zero-denominator terms show up
    std::uniform_int_distribution<int> v(0, 40);
    std::vector<double> out(n);
    for (auto& x : out) x = rng() % 3 == 0 ? 0.0 : v(rng);
    return out;
}

}  // namespace

TEST(Distance, HandValues) {
    EXPECT_NEAR(dist(DistanceMetric::D1, {1, 0}, {0, 1}), 1.0, 1e-12);
    EXPECT_NEAR(dist(DistanceMetric::Euclidean, {3, 4}, {0, 0}), 5.0, 1e-12);
    EXPECT_NEAR(dist(DistanceMetric::Manhattan, {1, 2}, {3, 5}), 5.0, 1e-12);
    EXPECT_NEAR(dist(DistanceMetric::Canberra, {1, 0}, {0, 1}), 2.0, 1e-12);
    EXPECT_NEAR(dist(DistanceMetric::ChiSquare, {2, 0}, {0, 2}), 2.0, 1e-12);
}

TEST(Distance, ZeroDenominatorTermsContributeNothing) {
    EXPECT_EQ(dist(DistanceMetric::Canberra, {0, 0, 3}, {0, 0, 1}), 0.5);
    EXPECT_EQ(dist(DistanceMetric::ChiSquare, {0, 4}, {0, 0}), 2.0);
    EXPECT_EQ(dist(DistanceMetric::D1, {0, 0}, {0, 0}), 0.0);
}

TEST(Distance, Properties) {
    std::mt19937 rng(31);
    for (int t = 0; t < 300; ++t) {
        const auto a = random_counts(rng, 64), b = random_counts(rng, 64);
        for (const auto m : kAllMetrics) {
            const double ab = distance(m, a, b);
            EXPECT_GE(ab, 0.0);
            EXPECT_EQ(ab, distance(m, b, a)) << metric_name(m);
            EXPECT_EQ(distance(m, a, a), 0.0) << metric_name(m);
        }
    }
}

TEST(Distance, LengthMismatch) {
    EXPECT_THROW(dist(DistanceMetric::D1, {1, 2}, {1}), InvalidInput);
}

TEST(Distance, FeatureVectorsCheckKind) {
    const FeatureVector a{DescriptorKind::Lbp, std::vector<std::uint32_t>(256, 1)};
    const FeatureVector b{DescriptorKind::LnipSign, std::vector<std::uint32_t>(256, 1)};
    const FeatureVector c{DescriptorKind::Lbp, std::vector<std::uint32_t>(256, 3)};
    EXPECT_THROW(distance(DistanceMetric::D1, a, b), InvalidInput);
    EXPECT_NEAR(distance(DistanceMetric::Manhattan, a, c), 512.0, 1e-12);
}

TEST(Weights, Normalization) {
    const FeatureVector f{DescriptorKind::Lbp, {1, 3, 0, 4}};
    EXPECT_EQ(as_weights(f), (std::vector<double>{1, 3, 0, 4}));
    EXPECT_EQ(as_weights(f, true), (std::vector<double>{0.125, 0.375, 0, 0.5}));
    const FeatureVector zero{DescriptorKind::Lbp, {0, 0}};
    EXPECT_EQ(as_weights(zero, true), (std::vector<double>{0, 0}));
}

TEST(Metric, Names) {
    for (const auto m : kAllMetrics) EXPECT_EQ(parse_metric(metric_name(m)), m);
    EXPECT_EQ(parse_metric("chi-square"), DistanceMetric::ChiSquare);
    EXPECT_THROW(parse_metric("cosine"), InvalidInput);
}
