#include <gtest/gtest.h>

#include <cmath>

#include "glap/functions.hpp"
#include "glap/random.hpp"

using namespace glap;
using namespace glap::functions;

namespace {

std::vector<TestFunction> builtins() {
  return {
      polynomial(Polynomial::univariate(1, 0, {0.0, 1.0, 1.0})),
      polynomial(Polynomial(2, {{1.0, {2, 1}}, {-0.5, {0, 3}}, {2.0, {1, 0}}})),
      polynomial(Polynomial(3, {{1.0, {1, 1, 1}}, {0.3, {2, 0, 0}}})),
      trig(Vec{1.3}, 0.7, 0.2),
      trig(Vec{0.5, -2.0}, 1.0, 1.0),
      trig(Vec{1.0, 0.4, -0.7}),
      holder(Vec{0.0}, 0.5),
      holder(Vec{0.2, -0.1}, 1.0),
      holder(Vec{0.0, 0.0, 0.0}, 0.25),
      combine(2.0, polynomial(Polynomial::univariate(2, 1, {0.0, 0.0, 1.0})), -1.0,
              trig(Vec{1.0, 1.0})),
  };
}

}  // namespace

TEST(TestFunction, DerivativesMatchFiniteDifferences) {
  Rng rng(31);
  const double h = 1e-5;
  for (const auto& f : builtins()) {
    const std::size_t d = f.dim();
    for (int probe = 0; probe < 100; ++probe) {
      Vec x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(-1.0, 1.0);
      const Vec g = f.gradient(x);
      const Mat H = f.hessian(x);
      for (std::size_t i = 0; i < d; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (f(xp) - f(xm)) / (2.0 * h);
        EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd))) << f.name();
        const Vec gd = (f.gradient(xp) - f.gradient(xm)) / (2.0 * h);
        for (std::size_t j = 0; j < d; ++j) {
          EXPECT_NEAR(H(j, i), gd[j], 1e-5 * std::max(1.0, std::abs(gd[j]))) << f.name();
          EXPECT_EQ(H(i, j), H(j, i)) << f.name();
        }
      }
    }
  }
}

TEST(TestFunction, HolderFamily) {
  const auto f = holder(Vec{0.0}, 0.5);
  EXPECT_DOUBLE_EQ(f.theta(), 0.5);
  EXPECT_NEAR(f(Vec{0.25}), std::pow(0.25, 2.5), 1e-15);
  EXPECT_EQ(f.gradient(Vec{0.0})[0], 0.0);
  EXPECT_EQ(f.hessian(Vec{0.0})(0, 0), 0.0);
  EXPECT_EQ(holder(Vec{0.0, 0.0}, 0.0).hessian(Vec{0.0, 0.0})(1, 1), 2.0);
  EXPECT_THROW(holder(Vec{0.0}, 1.5), PreconditionError);
}

TEST(TestFunction, PolynomialBasics) {
  const Polynomial p(2, {{3.0, {2, 1}}, {1.0, {0, 0}}});
  EXPECT_EQ(p.degree(), 3);
  EXPECT_DOUBLE_EQ(p(Vec{2.0, -1.0}), -11.0);
  EXPECT_DOUBLE_EQ(p.abs_bound(Vec{-1.0, -1.0}, Vec{2.0, 1.0}), 13.0);
  const auto q = p * Polynomial::affine(1.0, Vec{0.0, 1.0});
  EXPECT_DOUBLE_EQ(q(Vec{2.0, -1.0}), 0.0);
  EXPECT_DOUBLE_EQ((2.0 * p)(Vec{1.0, 1.0}), 8.0);
  EXPECT_THROW(Polynomial(1, {{1.0, {0, 1}}}), PreconditionError);
  const auto c = constant(3, 4.0);
  EXPECT_EQ(c(Vec{1.0, 2.0, 3.0}), 4.0);
  EXPECT_EQ(norm(c.gradient(Vec{1.0, 2.0, 3.0})), 0.0);
}
