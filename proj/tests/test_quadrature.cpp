#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "glap/geometry.hpp"
#include "glap/quadrature.hpp"

using namespace glap;
using namespace glap::quadrature;

namespace {

constexpr double kPi = std::numbers::pi;

RayClip unit_ball_clip() {
  return [](const Vec&) { return IntervalSet({0.0, 1.0}); };
}

}  // namespace

TEST(Integrate1d, PolynomialExact) {
  auto r = integrate_1d([](double t) { return t * t; }, -1.0, 1.0, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-14);
}

TEST(Integrate1d, BreakpointsHandleKinks) {
  auto r = integrate_1d([](double t) { return std::abs(t - 0.3); }, -1.0, 1.0, 1e-12,
                        std::vector<double>{0.3});
  EXPECT_NEAR(r.value, 0.5 * (1.3 * 1.3 + 0.7 * 0.7), 1e-13);
}

TEST(Integrate1d, FlagsNonConvergence) {
  // Highly oscillatory integrand with a tiny depth budget.
  auto r = integrate_1d([](double t) { return std::sin(1e4 * t); }, 0.0, 1.0, 1e-14, {}, 2);
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(value_or_throw(r, "oscillatory"), NonConvergence);
}

TEST(Integrate, IndicatorSecondMomentOnLine) {
  IntegralTask task;
  task.dim = 1;
  task.integrand = [](const Vec& t) { return t[0] * t[0]; };
  task.truncation_radius = 5.0;
  task.clips = {unit_ball_clip()};
  task.tolerance = 1e-12;
  auto r = integrate(task);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-10);
}

TEST(Integrate, HalfDiskFirstMoment) {
  IntegralTask task;
  task.dim = 2;
  task.integrand = [](const Vec& t) { return t[1]; };
  task.region = AngularRegion::half(Mat::identity(2));
  task.truncation_radius = 3.0;
  task.clips = {unit_ball_clip()};
  auto r = integrate(task);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-8);
}

TEST(Integrate, ZeroIntegrandIsExactlyZero) {
  for (std::size_t d = 1; d <= 4; ++d) {
    IntegralTask task;
    task.dim = d;
    task.integrand = [](const Vec&) { return 0.0; };
    task.truncation_radius = 2.0;
    auto r = integrate(task);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.converged);
  }
}

TEST(Integrate, GaussianSecondMomentsByDimension) {
  // int e^{-|t|^2} t_1^2 dt = pi^{d/2} / 2.
  for (std::size_t d = 1; d <= 3; ++d) {
    IntegralTask task;
    task.dim = d;
    task.integrand = [](const Vec& t) { return std::exp(-norm_sq(t)) * t[0] * t[0]; };
    task.truncation_radius = 7.0;
    task.tolerance = 1e-9;
    auto r = integrate(task);
    EXPECT_TRUE(r.converged) << d;
    EXPECT_NEAR(r.value, std::pow(kPi, 0.5 * static_cast<double>(d)) / 2.0, 1e-8) << d;
  }
}

TEST(Integrate, UnitBallVolumes) {
  for (std::size_t d = 1; d <= 4; ++d) {
    IntegralTask task;
    task.dim = d;
    task.integrand = [](const Vec&) { return 1.0; };
    task.truncation_radius = 1.0;
    task.tolerance = 1e-9;
    auto r = integrate(task);
    EXPECT_NEAR(r.value, ball_volume(d), 1e-8) << d;
  }
}

TEST(Integrate, WedgeAreaOfUnitDisk) {
  const auto cone = geometry::Cone::wedge(Vec{1.0, 1.0}, kPi / 3.0);
  IntegralTask task;
  task.dim = 2;
  task.integrand = [](const Vec&) { return 1.0; };
  task.region = cone.angular_region();
  task.truncation_radius = 1.0;
  EXPECT_NEAR(integrate(task).value, kPi / 6.0, 1e-9);
}

TEST(Integrate, ConeAdditivity) {
  auto f = [](const Vec& t) {
    return std::exp(-norm_sq(t)) * (1.0 + 0.5 * t[0] * std::exp(-t[0] * t[0])) * t[0] * t[1];
  };
  for (std::size_t d = 2; d <= 3; ++d) {
    Vec u(d);
    u[0] = 0.3;
    u[1] = -1.0;
    if (d == 3) u[2] = 0.5;
    IntegralTask task;
    task.dim = d;
    task.integrand = f;
    task.truncation_radius = 7.0;
    task.tolerance = 1e-8;
    const double whole = integrate(task).value;
    task.region = geometry::Cone::half_space(u).angular_region();
    const double up = integrate(task).value;
    task.region = geometry::Cone::half_space(-u).angular_region();
    const double down = integrate(task).value;
    EXPECT_NEAR(up + down, whole, 2e-8) << d;
  }
}

TEST(Integrate, Linearity) {
  auto phi = [](const Vec& t) { return std::exp(-norm_sq(t)) * t[0] * t[0]; };
  auto psi = [](const Vec& t) { return std::exp(-2.0 * norm_sq(t)) * (1.0 + t[1]); };
  IntegralTask task;
  task.dim = 2;
  task.truncation_radius = 7.0;
  task.integrand = phi;
  const auto a = integrate(task);
  task.integrand = psi;
  const auto b = integrate(task);
  task.integrand = [&](const Vec& t) { return 1.5 * phi(t) - 0.7 * psi(t); };
  const auto c = integrate(task);
  EXPECT_NEAR(c.value, 1.5 * a.value - 0.7 * b.value,
              c.error + 1.5 * a.error + 0.7 * b.error + 1e-12);
}

TEST(Integrate, SingularOriginIsGraded) {
  // int_{|t|<1} |t|^{-1/2} dt in d = 1 equals 4.
  IntegralTask task;
  task.dim = 1;
  task.integrand = [](const Vec& t) { return 1.0 / std::sqrt(std::abs(t[0])); };
  task.truncation_radius = 1.0;
  task.singular_origin = true;
  auto r = integrate(task);
  EXPECT_NEAR(r.value, 4.0, 1e-7);
}

TEST(IntegrateSubspace, OddIntegrandsVanish) {
  IntegralTask task;
  task.dim = 2;
  task.truncation_radius = 7.0;
  task.integrand = [](const Vec& x) { return std::exp(-norm_sq(x)) * x[0] * x[0] * x[0]; };
  EXPECT_NEAR(integrate_subspace(task, {Vec{1.0, 0.0}}).value, 0.0, 1e-12);
  task.integrand = [](const Vec& x) { return (norm(x) <= 1.0 ? 1.0 : 0.0) * x[0] * x[0] * x[0]; };
  EXPECT_NEAR(integrate_subspace(task, {Vec{1.0, 0.0}}).value, 0.0, 1e-12);
}

TEST(IntegrateSubspace, TiltedGaussianCubicOnLine) {
  // Oracle: 30-digit adaptive quadrature of e^{-x^2}(1 - x e^{-x^2}/2) x^3 over R.
  IntegralTask task;
  task.dim = 2;
  task.truncation_radius = 7.0;
  task.tolerance = 1e-10;
  task.integrand = [](const Vec& t) {
    const Vec m = -t;
    return std::exp(-norm_sq(m)) * (1.0 + 0.5 * m[0] * std::exp(-m[0] * m[0])) * t[0] * t[0] *
           t[0];
  };
  auto r = integrate_subspace(task, {Vec{1.0, 0.0}});
  EXPECT_NEAR(r.value, -0.117498200373328148550738997726, 1e-9);
}

TEST(IntegrateSubspace, PlaneInThreeDimensions) {
  // int over the plane x_3 = 0 of e^{-|x|^2} = pi.
  IntegralTask task;
  task.dim = 3;
  task.truncation_radius = 7.0;
  task.integrand = [](const Vec& x) { return std::exp(-norm_sq(x)); };
  auto r = integrate_subspace(task, {Vec{1.0, 0.0, 0.0}, Vec{0.0, 1.0, 0.0}});
  EXPECT_NEAR(r.value, kPi, 1e-8);
}

TEST(McIntegrate, ConstantIsExact) {
  auto r = mc_integrate([](const Vec&) { return 1.0; }, Box{Vec{0.0}, Vec{1.0}}, 1000, 5);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.std_error, 0.0);
}

TEST(McIntegrate, SecondMomentAgreesWithQuadrature) {
  auto f = [](const Vec& t) { return t[0] * t[0]; };
  auto r = mc_integrate(f, Box{Vec{-1.0}, Vec{1.0}}, 1'000'000, 3);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 4.0 * r.std_error);
}

TEST(McIntegrate, Deterministic) {
  auto f = [](const Vec& t) { return std::sin(t[0]) * t[1]; };
  const Box box{Vec{0.0, 0.0}, Vec{1.0, 2.0}};
  auto a = mc_integrate(f, box, 5000, 77);
  auto b = mc_integrate(f, box, 5000, 77);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_THROW(mc_integrate(f, box, 999, 77), PreconditionError);
}

TEST(IntervalSet, UniteAndIntersect) {
  IntervalSet s({0.0, 1.0});
  s.unite({2.0, 3.0});
  s.unite({0.5, 2.5});
  ASSERT_EQ(s.parts().size(), 1u);
  EXPECT_EQ(s.parts()[0].hi, 3.0);
  s.intersect(IntervalSet({1.0, 1.5}));
  ASSERT_EQ(s.parts().size(), 1u);
  EXPECT_EQ(s.parts()[0].lo, 1.0);
}
