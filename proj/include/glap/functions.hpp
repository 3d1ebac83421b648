#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "glap/error.hpp"
#include "glap/polynomial.hpp"
#include "glap/vec.hpp"

namespace glap::functions {

// Test function f with exact first and second derivatives. `theta` is the
// Hoelder exponent of the Hessian (f in C^{2,theta}).
class TestFunction {
 public:
  using Scalar = std::function<double(const Vec&)>;
  using Gradient = std::function<Vec(const Vec&)>;
  using Hessian = std::function<Mat(const Vec&)>;

  TestFunction(std::string name, std::size_t dim, Scalar f, Gradient g, Hessian h, double theta)
      : name_(std::move(name)), dim_(dim), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)),
        theta_(theta) {
    require(dim >= 1 && dim <= kMaxDim, "function dimension out of range");
    require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  }

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  double theta() const { return theta_; }
  double operator()(const Vec& x) const { return f_(x); }
  Vec gradient(const Vec& x) const { return g_(x); }
  Mat hessian(const Vec& x) const { return h_(x); }

 private:
  std::string name_;
  std::size_t dim_;
  Scalar f_;
  Gradient g_;
  Hessian h_;
  double theta_;
};

inline TestFunction polynomial(Polynomial p) {
  auto shared = std::make_shared<const Polynomial>(std::move(p));
  const std::size_t d = shared->dim();
  return TestFunction(
      "polynomial", d, [shared](const Vec& x) { return (*shared)(x); },
      [shared](const Vec& x) { return shared->gradient(x); },
      [shared](const Vec& x) { return shared->hessian(x); }, 1.0);
}

inline TestFunction constant(std::size_t dim, double c) {
  return polynomial(Polynomial::constant(dim, c));
}

// amplitude * sin(omega . x + phase)
inline TestFunction trig(const Vec& omega, double amplitude = 1.0, double phase = 0.0) {
  return TestFunction(
      "trig", omega.size(),
      [=](const Vec& x) { return amplitude * std::sin(dot(omega, x) + phase); },
      [=](const Vec& x) { return (amplitude * std::cos(dot(omega, x) + phase)) * omega; },
      [=](const Vec& x) {
        const double s = -amplitude * std::sin(dot(omega, x) + phase);
        Mat h(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
          for (std::size_t j = i; j < omega.size(); ++j) h(i, j) = h(j, i) = s * omega[i] * omega[j];
        }
        return h;
      },
      1.0);
}

// |x - q|^{2 + theta}
inline TestFunction holder(const Vec& q, double theta) {
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  const double a = 2.0 + theta;
  return TestFunction(
      "holder", q.size(), [=](const Vec& x) { return std::pow(norm(x - q), a); },
      [=](const Vec& x) {
        const Vec y = x - q;
        const double r = norm(y);
        if (r == 0.0) return Vec(q.size());
        return (a * std::pow(r, theta)) * y;
      },
      [=](const Vec& x) {
        const Vec y = x - q;
        const double r = norm(y);
        const std::size_t d = q.size();
        Mat h(d);
        if (r == 0.0) {
          return theta == 0.0 ? Mat::identity(d) * 2.0 : h;
        }
        // a r^theta I + a theta r^{theta - 2} y y^T
        const double c0 = a * std::pow(r, theta);
        const double c1 = a * theta * std::pow(r, theta - 2.0);
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = i; j < d; ++j) h(i, j) = h(j, i) = c1 * y[i] * y[j] + (i == j ? c0 : 0.0);
        }
        return h;
      },
      theta);
}

// a f + b g
inline TestFunction combine(double a, const TestFunction& f, double b, const TestFunction& g) {
  require_dim(f.dim(), g.dim());
  return TestFunction(
      "combination", f.dim(), [=](const Vec& x) { return a * f(x) + b * g(x); },
      [=](const Vec& x) { return a * f.gradient(x) + b * g.gradient(x); },
      [=](const Vec& x) { return a * f.hessian(x) + b * g.hessian(x); },
      std::min(f.theta(), g.theta()));
}

}  // namespace glap::functions
