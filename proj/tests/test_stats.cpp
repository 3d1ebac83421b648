#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "glap/random.hpp"
#include "glap/stats.hpp"

using namespace glap;
using namespace glap::stats;

TEST(Stats, NormalCdfReferenceValues) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145705, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0), 6.220960574271785e-16, 1e-28);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-6.0, 6.0);
    EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-15);
  }
}

TEST(Stats, NormalQuantileInvertsCdf) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  for (double p : {1e-10, 0.001, 0.02, 0.3, 0.7, 0.99, 1.0 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 * std::max(p, 1e-3));
  }
  EXPECT_THROW(normal_quantile(0.0), PreconditionError);
}

TEST(Stats, KsSinglePointAtCentre) {
  const std::vector<double> x{0.0};
  EXPECT_DOUBLE_EQ(ks_statistic(x, 1.0), 0.5);
}

TEST(Stats, KsOfExactQuantilesIsHalfStep) {
  const std::size_t m = 1000;
  std::vector<double> x;
  for (std::size_t i = 0; i < m; ++i) x.push_back(normal_quantile((i + 0.5) / m));
  EXPECT_LE(ks_statistic(x, 1.0), 0.5 / m + 1e-12);
}

TEST(Stats, KsIsScaleInvariant) {
  Rng rng(3);
  std::vector<double> x, y;
  for (int i = 0; i < 500; ++i) {
    x.push_back(rng.normal());
    y.push_back(2.5 * x.back());
  }
  EXPECT_NEAR(ks_statistic(x, 1.0), ks_statistic(y, 2.5), 1e-12);
  EXPECT_LT(ks_statistic(x, 1.0), ks_threshold(500, 0.01));
  EXPECT_GT(ks_statistic(x, 3.0), ks_threshold(500, 0.01));
}

TEST(Stats, CorrelationBoundsAndInvariance) {
  std::vector<std::pair<double, double>> up, down, affine;
  Rng rng(4);
  std::vector<std::pair<double, double>> random;
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform() + 0.3 * x;
    up.emplace_back(x, 2.0 * x + 1.0);
    down.emplace_back(x, -x);
    random.emplace_back(x, y);
    affine.emplace_back(3.0 * x - 7.0, 0.5 * y + 2.0);
  }
  EXPECT_NEAR(correlation(up), 1.0, 1e-12);
  EXPECT_NEAR(correlation(down), -1.0, 1e-12);
  EXPECT_NEAR(correlation(random), correlation(affine), 1e-12);
  const std::vector<std::pair<double, double>> flat{{1.0, 2.0}, {1.0, 3.0}};
  EXPECT_THROW(correlation(flat), PreconditionError);
}

TEST(Stats, IndependentStreamsAreUncorrelated) {
  const std::size_t m = 20000;
  Rng a(derive_seed(42, 0)), b(derive_seed(42, 1));
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = 0; i < m; ++i) xy.emplace_back(a.normal(), b.normal());
  EXPECT_LT(std::abs(correlation(xy)), 4.0 / std::sqrt(static_cast<double>(m)));
}

TEST(Stats, SummaryExamples) {
  const auto c = summarize(std::vector<double>{1.0, 1.0, 1.0});
  EXPECT_EQ(c.mean, 1.0);
  EXPECT_EQ(c.variance, 0.0);
  const auto two = summarize(std::vector<double>{0.0, 2.0});
  EXPECT_EQ(two.mean, 1.0);
  EXPECT_EQ(two.variance, 2.0);
  EXPECT_EQ(two.min, 0.0);
  EXPECT_EQ(two.max, 2.0);
}

TEST(Stats, UniformVarianceAndTranslation) {
  Rng rng(5);
  const std::size_t m = 100000;
  std::vector<double> x, shifted;
  for (std::size_t i = 0; i < m; ++i) {
    x.push_back(rng.uniform());
    shifted.push_back(x.back() + 10.0);
  }
  const auto s = summarize(x);
  // Var of the sample variance for U(0,1): (1/80 - 1/144) / m
  const double se = std::sqrt((1.0 / 80.0 - 1.0 / 144.0) / m);
  EXPECT_NEAR(s.variance, 1.0 / 12.0, 4.0 * se);
  EXPECT_NEAR(s.excess_kurtosis, -1.2, 0.05);
  const auto t = summarize(shifted);
  EXPECT_NEAR(t.mean - s.mean, 10.0, 1e-9);
  EXPECT_NEAR(t.variance, s.variance, 1e-9);
}

TEST(Stats, QuantileAndSlope) {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(median(x), 2.5);
  EXPECT_EQ(quantile(x, 0.0), 1.0);
  EXPECT_EQ(quantile(x, 1.0), 4.0);
  const std::vector<double> e{0.1, 0.01, 0.001};
  const std::vector<double> y{2e-3, 2e-5, 2e-7};
  EXPECT_NEAR(loglog_slope(e, y), 2.0, 1e-12);
}
