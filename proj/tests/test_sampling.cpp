#include <gtest/gtest.h>

#include <cmath>

#include "glap/geometry.hpp"
#include "glap/sampling.hpp"

using namespace glap;
using namespace glap::sampling;

namespace {

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;
  double sd = 0.0;
  double sd2 = 0.0;
};

Moments first_coordinate_moments(const SampleBatch& b) {
  const double n = static_cast<double>(b.size());
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double x = b.coords[i * b.dim];
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
  }
  Moments m;
  m.mean = s1 / n;
  m.m2 = s2 / n;
  m.sd = std::sqrt((m.m2 - m.mean * m.mean) / n);
  m.sd2 = std::sqrt((s4 / n - m.m2 * m.m2) / n);
  return m;
}

std::vector<Density> sample_densities() {
  const auto I = geometry::interval(-1.0, 1.0);
  const auto disk = geometry::ball(Vec{0.0, 0.0}, 1.0);
  const auto sq = geometry::box(Vec{0.0, 0.0}, Vec{1.0, 2.0});
  return {
      uniform(I),
      linear(I, 1.0, Vec{1.0}),
      uniform(disk),
      linear(disk, 2.0, Vec{0.5, -1.0}),
      product(sq, {{1.0, 1.0}, {0.5, 0.0, 1.0}}),
      uniform(geometry::ball(Vec{0.1, 0.2, 0.3}, 0.8)),
  };
}

}  // namespace

TEST(Sampling, UniformIntervalMoments) {
  const auto g = uniform(geometry::interval(-1.0, 1.0));
  const auto b = sample(g, 100000, 7);
  const auto m = first_coordinate_moments(b);
  EXPECT_LT(std::abs(m.mean), 4.0 * m.sd);
  EXPECT_LT(std::abs(m.m2 - 1.0 / 3.0), 4.0 * m.sd2);
}

TEST(Sampling, LinearDensityMean) {
  const auto g = linear(geometry::interval(-1.0, 1.0), 1.0, Vec{1.0});
  EXPECT_NEAR(g(Vec{0.0}), 0.5, 1e-12);
  EXPECT_NEAR(g(Vec{0.6}), 0.8, 1e-12);
  const auto b = sample(g, 100000, 7);
  const auto m = first_coordinate_moments(b);
  EXPECT_LT(std::abs(m.mean - 1.0 / 3.0), 4.0 * m.sd);
}

TEST(Sampling, SingleDrawIsReproducible) {
  const auto g = uniform(geometry::ball(Vec{0.0, 0.0}, 1.0));
  const auto a = sample(g, 1, 123);
  const auto b = sample(g, 1, 123);
  EXPECT_EQ(a.coords, b.coords);
}

TEST(Sampling, BatchesAreBitwiseDeterministic) {
  for (const auto& g : sample_densities()) {
    const auto a = sample(g, 2000, 99, 3);
    const auto b = sample(g, 2000, 99, 3);
    EXPECT_EQ(a.coords, b.coords) << g.type();
  }
}

TEST(Sampling, PointsStayInsideDomain) {
  for (const auto& g : sample_densities()) {
    const auto b = sample(g, 20000, 5);
    int outside = 0;
    for (std::size_t i = 0; i < b.size(); ++i) outside += g.domain().contains(b.point(i)) ? 0 : 1;
    EXPECT_EQ(outside, 0) << g.type();
    EXPECT_EQ(b.size(), 20000u);
  }
}

TEST(Sampling, ReplicationsAreUncorrelated) {
  const auto g = uniform(geometry::interval(-1.0, 1.0));
  const std::size_t n = 50000;
  for (std::uint64_t r = 0; r < 4; ++r) {
    const auto a = sample(g, n, 42, r);
    const auto b = sample(g, n, 42, r + 1);
    double sab = 0.0, saa = 0.0, sbb = 0.0, ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += a.coords[i];
      mb += b.coords[i];
    }
    ma /= n;
    mb /= n;
    for (std::size_t i = 0; i < n; ++i) {
      sab += (a.coords[i] - ma) * (b.coords[i] - mb);
      saa += (a.coords[i] - ma) * (a.coords[i] - ma);
      sbb += (b.coords[i] - mb) * (b.coords[i] - mb);
    }
    EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 4.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST(Density, MassIsOneByMonteCarlo) {
  std::uint64_t seed = 300;
  for (const auto& g : sample_densities()) {
    const auto box = *g.domain().bounding_box();
    const auto est = quadrature::mc_integrate([&](const Vec& x) { return g(x); }, box, 200000,
                                              ++seed);
    EXPECT_LE(std::abs(est.value - 1.0), 4.0 * est.std_error + 1e-12) << g.type();
  }
}

TEST(Density, ZeroOutsideAndNonnegativeInside) {
  Rng rng(8);
  for (const auto& g : sample_densities()) {
    const auto box = *g.domain().bounding_box();
    for (int k = 0; k < 2000; ++k) {
      Vec x(g.dim());
      for (std::size_t i = 0; i < g.dim(); ++i) x[i] = rng.uniform(box.lo[i] - 0.5, box.hi[i] + 0.5);
      if (g.domain().contains(x)) {
        EXPECT_GE(g(x), 0.0);
      } else {
        EXPECT_EQ(g(x), 0.0);
      }
    }
  }
}

TEST(Density, GradientMatchesFiniteDifferences) {
  Rng rng(9);
  const double h = 1e-5;
  for (const auto& g : sample_densities()) {
    const auto box = *g.domain().bounding_box();
    int probes = 0;
    while (probes < 100) {
      Vec x(g.dim());
      for (std::size_t i = 0; i < g.dim(); ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
      if (!g.domain().contains(x)) continue;
      ++probes;
      const Vec grad = density_gradient(g, x);
      for (std::size_t i = 0; i < g.dim(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (g.extended(xp) - g.extended(xm)) / (2.0 * h);
        EXPECT_NEAR(grad[i], fd, 1e-5 * std::max(1.0, std::abs(fd))) << g.type();
      }
    }
  }
}

TEST(Density, GradientExamples) {
  const auto I = geometry::interval(-1.0, 1.0);
  EXPECT_EQ(density_gradient(uniform(I), Vec{0.3})[0], 0.0);
  const auto lin = linear(I, 1.0, Vec{1.0});
  for (double x : {-0.9, -0.1, 0.0, 0.7}) EXPECT_NEAR(density_gradient(lin, Vec{x})[0], 0.5, 1e-12);
  const auto sq = geometry::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  const auto g = product(sq, {{1.0, 1.0}, {1.0, 0.0, 3.0}});
  // mass (3/2)(2) = 3
  const Vec x{0.2, 0.6};
  const double g1 = 1.2, g2 = 1.0 + 3.0 * 0.36;
  const Vec grad = density_gradient(g, x);
  EXPECT_NEAR(grad[0], 1.0 * g2 / 3.0, 1e-10);
  EXPECT_NEAR(grad[1], g1 * 6.0 * 0.6 / 3.0, 1e-10);
  EXPECT_THROW(density_gradient(g, Vec{1.5, 0.5}), PreconditionError);
}

TEST(Density, Preconditions) {
  const auto I = geometry::interval(-1.0, 1.0);
  EXPECT_THROW(linear(I, 0.0, Vec{1.0}), PreconditionError);
  EXPECT_THROW(uniform(geometry::half_space(Vec{0.0}, Vec{1.0})), PreconditionError);
  const auto c = constant(geometry::half_space(Vec{0.0}, Vec{1.0}), 1.0);
  EXPECT_FALSE(c.sampleable());
  EXPECT_THROW(sample(c, 10, 1), PreconditionError);
  EXPECT_THROW(sample(uniform(I), 0, 1), PreconditionError);
}
