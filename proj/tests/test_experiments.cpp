#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "glap/experiments.hpp"

using namespace glap;
using namespace glap::experiments;

namespace {

const auto I = geometry::interval(-1.0, 1.0);

TestFunction poly1(std::vector<double> c) {
  return functions::polynomial(Polynomial::univariate(1, 0, std::move(c)));
}

Experiment base(Kind kind) {
  Experiment ex;
  ex.kind = kind;
  ex.kernel = kernels::indicator_ball(1);
  ex.density = sampling::uniform(I);
  ex.function = poly1({0.0, 1.0, 1.0});
  ex.points = {Vec{0.0}};
  ex.schedule = make_schedule(1, 1.0, 0.25, 1.0);
  ex.n_list = {2000};
  ex.replications = 40;
  return ex;
}

}  // namespace

TEST(Schedule, ValidityWindows) {
  // d = 1, theta = 1: clt needs 1/5 < gamma < 1, lln needs gamma < 1/3
  auto s = make_schedule(1, 1.0, 0.25, 1.0);
  EXPECT_TRUE(s.clt_valid);
  EXPECT_TRUE(s.lln_valid);
  EXPECT_FALSE(make_schedule(1, 1.0, 0.2, 1.0).clt_valid);
  EXPECT_FALSE(make_schedule(1, 1.0, 1.0, 1.0).clt_valid);
  EXPECT_FALSE(make_schedule(1, 1.0, 1.0 / 3.0, 1.0).lln_valid);
  EXPECT_TRUE(make_schedule(2, 0.0, 0.25, 1.0).bounded_above);
  EXPECT_FALSE(make_schedule(2, 0.5, 0.25, 1.0).bounded_above);
  EXPECT_NEAR(s.eps(10000), 0.1, 1e-15);
  EXPECT_THROW(make_schedule(1, 1.0, -0.1, 1.0), PreconditionError);
  EXPECT_THROW(make_schedule(1, 1.5, 0.2, 1.0), PreconditionError);
}

TEST(Runner, ParallelMapIsOrderedAndThreadIndependent) {
  auto sq = [](std::size_t i) { return static_cast<double>(i * i); };
  const auto a = parallel_map(50, 1, sq);
  const auto b = parallel_map(50, 4, sq);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[7], 49.0);
  auto boom = [](std::size_t i) -> int {
    if (i == 3) throw std::runtime_error("boom");
    return 0;
  };
  EXPECT_THROW(parallel_map(10, 3, boom), std::runtime_error);
}

TEST(Runner, ResultsDoNotDependOnThreadCount) {
  auto ex = base(Kind::clt);
  ex.threads = 1;
  const auto a = run(ex);
  ex.threads = 3;
  const auto b = run(ex);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].value, b.records[i].value);
}

TEST(Experiments, CltRecordsAndDiagnostics) {
  const auto r = run(base(Kind::clt));
  EXPECT_EQ(r.records.size(), 40u);
  EXPECT_NEAR(r.diagnostic("s2"), 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(r.diagnostic("limit"), 1.0 / 3.0, 1e-8);
  ASSERT_TRUE(r.summaries[0].ks.has_value());
}

TEST(Experiments, CltDegenerateVariance) {
  auto ex = base(Kind::clt);
  ex.function = poly1({0.0, 0.0, 1.0});
  const auto r = run(ex);
  EXPECT_EQ(r.diagnostic("s2"), 0.0);
  EXPECT_FALSE(r.notes.empty());
  EXPECT_FALSE(r.summaries[0].ks.has_value());
}

TEST(Experiments, InvalidSchedulesAreRejected) {
  auto ex = base(Kind::clt);
  ex.schedule = make_schedule(1, 1.0, 0.15, 1.0);
  EXPECT_THROW(run(ex), PreconditionError);
  ex.kind = Kind::lln;
  ex.schedule = make_schedule(1, 1.0, 0.5, 1.0);
  EXPECT_THROW(run(ex), PreconditionError);
  ex = base(Kind::lln);
  ex.points = {Vec{1.5}};
  EXPECT_THROW(run(ex), PreconditionError);
  ex = base(Kind::corr);
  EXPECT_THROW(run(ex), PreconditionError);
}

TEST(Experiments, LlnMedianErrorsShrink) {
  auto ex = base(Kind::lln);
  ex.function = poly1({0.0, 0.0, 1.0});
  ex.schedule = make_schedule(1, 1.0, 0.2, 1.0);
  ex.n_list = {500, 50000};
  ex.replications = 30;
  const auto r = run(ex);
  EXPECT_LT(*r.summaries[1].median_error, *r.summaries[0].median_error);
  EXPECT_NEAR(r.diagnostic("limit"), 1.0 / 3.0, 1e-8);
}

TEST(Experiments, RateHolderSlope) {
  auto ex = base(Kind::rate);
  ex.function = functions::holder(Vec{0.0}, 0.5);
  ex.schedule = make_schedule(1, 0.5, 0.25, 1.0);
  ex.eps_list = {0.2, 0.1, 0.05, 0.025};
  const auto r = run(ex);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.diagnostic("slope"), 0.5, 1e-6);
}

TEST(Experiments, RateExactForQuadratics) {
  auto ex = base(Kind::rate);
  ex.function = poly1({1.0, -2.0, 3.0});
  const auto r = run(ex);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Experiments, CorrelationOfDistantPoints) {
  auto ex = base(Kind::corr);
  ex.points = {Vec{-0.5}, Vec{0.5}};
  ex.schedule = make_schedule(1, 1.0, 0.25, 1.0);
  ex.n_list = {2000};
  ex.replications = 60;
  const auto r = run(ex);
  ASSERT_TRUE(r.summaries[0].corr.has_value());
  // eps = 0.15: the two windows are disjoint, correlation only through n
  EXPECT_LT(std::abs(*r.summaries[0].corr), 4.0 / std::sqrt(60.0));
  for (const auto& rec : r.records) EXPECT_TRUE(rec.value2.has_value());
}

TEST(Experiments, BoundaryNeumannHalfLine) {
  auto ex = base(Kind::boundary);
  ex.density = sampling::uniform(geometry::interval(0.0, 1.0));
  ex.points = {Vec{0.0}};
  ex.function = poly1({0.0, 0.0, 1.0});
  const auto r = run(ex);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.diagnostic("limit"), 1.0 / 3.0, 1e-8);
  EXPECT_EQ(r.diagnostic("correction"), 0.0);
}

TEST(Experiments, BoundaryDivergentRegime) {
  auto ex = base(Kind::boundary);
  ex.density = sampling::uniform(geometry::interval(0.0, 1.0));
  ex.points = {Vec{0.0}};
  ex.function = poly1({0.0, 1.0});
  const auto r = run(ex);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.diagnostic("cone_residual"), 0.5, 1e-8);
  EXPECT_EQ(r.summaries[0].verdict, "divergent");
}

TEST(Experiments, MomentsOfIndicatorOnLine) {
  Experiment ex;
  ex.kind = Kind::moments;
  ex.kernel = kernels::indicator_ball(1);
  const auto r = run(ex);
  EXPECT_TRUE(r.pass);
  // M1 = int_{-1}^{1} x^2 dx
  EXPECT_NEAR(r.records[0].value, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.records[2].value, 0.0, 1e-12);
}

TEST(Experiments, AdmissibleVerdictsAgreeForPowerLaw) {
  Experiment ex;
  ex.kind = Kind::admissible;
  ex.kernel = kernels::power_law(1, 1.0, 0.0, 4.0);
  const auto r = run(ex);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.records.size(), kernels::fourth_moment_pairs().size());
}

TEST(Experiments, MinEigenvalue) {
  Mat a(2);
  a(0, 0) = 2.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  EXPECT_NEAR(experiments::detail::min_eigenvalue(a), 1.0, 1e-12);
}

TEST(Experiments, LinearizedVarianceMatchesMinusForm) {
  const auto g = sampling::linear(I, 1.0, Vec{1.0});
  const auto v = linearized_variance(kernels::indicator_ball(1), poly1({0.0, 1.0}), g, Vec{0.0}, 1.0,
                                     50, 4000, 42, 1);
  EXPECT_NEAR(v.minus, 2.0 / 9.0, 1e-9);
  EXPECT_NEAR(v.plus, 4.0 / 9.0, 1e-9);
  EXPECT_LT(std::abs(v.empirical - v.minus), 4.0 * v.std_error);
  EXPECT_GT(std::abs(v.empirical - v.plus), 4.0 * v.std_error);
}

TEST(Experiments, ConventionFactorHalfOnCurvedBoundary) {
  // f = x1 + kappa x2 with grad f orthogonal to the half-plane first moment
  Experiment ex;
  ex.kind = Kind::boundary;
  ex.kernel = kernels::tilted_gaussian(2);
  ex.density = sampling::uniform(geometry::ball(Vec{0.0, 0.0}, 1.0));
  ex.function = functions::polynomial(Polynomial::affine(0.0, Vec{1.0, 0.156664267164438}));
  ex.points = {Vec{0.0, -1.0}};
  ex.eps_list = {0.2, 0.1, 0.05};
  ex.convention_factor = 0.5;
  const auto half = run(ex);
  EXPECT_TRUE(half.pass);
  EXPECT_EQ(half.diagnostic("decreasing"), 1.0);
  EXPECT_NEAR(half.diagnostic("correction"), 0.0187004193938, 1e-9);
  ex.convention_factor = 1.0;
  const auto one = run(ex);
  EXPECT_FALSE(one.pass);
  EXPECT_EQ(one.diagnostic("decreasing"), 0.0);
}
