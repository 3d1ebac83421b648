#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "glap/error.hpp"
#include "glap/functions.hpp"
#include "glap/geometry.hpp"
#include "glap/kernels.hpp"
#include "glap/quadrature.hpp"
#include "glap/sampling.hpp"
#include "glap/vec.hpp"

namespace glap::operators {

using functions::TestFunction;
using geometry::BoundaryData;
using geometry::Cone;
using geometry::ConeKind;
using geometry::Domain;
using kernels::Kernel;
using sampling::Density;
using sampling::SampleBatch;

inline constexpr double kDefaultTol = 1e-8;

// Operator value with its additive breakdown. `vector` carries v_T for the
// boundary term and is empty otherwise.
struct OperatorValue {
  double value = 0.0;
  double error = 0.0;
  std::vector<std::pair<std::string, double>> components;
  Vec vector;

  double component(const std::string& name) const {
    for (const auto& [n, v] : components) {
      if (n == name) return v;
    }
    throw PreconditionError("no component named " + name);
  }

  void add(std::string name, double v, double err = 0.0) {
    components.emplace_back(std::move(name), v);
    value += v;
    error += err;
  }
};

// Outcome of combined_limit when the cancellation condition fails.
struct DivergentRegime {
  double residual = 0.0;
  std::string reason;
};

using LimitOutcome = std::variant<OperatorValue, DivergentRegime>;

inline bool divergent(const LimitOutcome& o) { return std::holds_alternative<DivergentRegime>(o); }

inline const OperatorValue& value_of(const LimitOutcome& o) {
  if (const auto* d = std::get_if<DivergentRegime>(&o)) {
    throw PreconditionError("divergent regime: " + d->reason);
  }
  return std::get<OperatorValue>(o);
}

namespace detail {

inline double quadratic_form(const Vec& a, const Mat& m, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) s += a[i] * m(i, j) * b[j];
  }
  return s;
}

inline double frobenius(const Mat& a, const Mat& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) s += a(i, j) * b(i, j);
  }
  return s;
}

inline Cone cone_or_full(const Domain& S, const Vec& p) {
  try {
    return geometry::cone_at(S, p);
  } catch (const Unsupported&) {
    return Cone::full_space(S.dim());
  }
}

// Polar parametrisation aligned with the tangent cone at p, with angular
// breakpoints where the rescaled domain has its edges.
inline quadrature::AngularRegion aligned_region(const Cone& cone) {
  using quadrature::AngularRegion;
  const std::size_t d = cone.dim();
  const double h = std::numbers::pi / 2.0;
  switch (cone.kind()) {
    case ConeKind::full_space: return AngularRegion::full(d);
    case ConeKind::half_space: {
      auto r = AngularRegion::full(frame_with_last_axis(cone.axis()));
      if (d == 2) r.first_breaks = {-h, h};
      if (d >= 3) r.first_breaks = {h};
      return r;
    }
    case ConeKind::wedge: {
      auto r = AngularRegion::full(frame_with_last_axis(cone.axis()));
      r.first_breaks = {-0.5 * cone.opening(), 0.5 * cone.opening()};
      return r;
    }
    case ConeKind::degenerate: {
      auto r = AngularRegion::full(frame_with_last_axis(cone.axis()));
      if (d == 2) r.first_breaks = {0.0};
      return r;
    }
  }
  return AngularRegion::full(d);
}

inline void require_kernel_allowed(const Kernel& k, const Cone& cone) {
  if (k.singular() && cone.kind() != ConeKind::wedge && cone.kind() != ConeKind::degenerate) {
    throw PreconditionError("singular kernels are only supported at corner or cusp points");
  }
}

// int_{(S-p)/eps} K(-t)^power w(t) g(p + eps t) dt, with the domain entering
// through exact ray clipping.
inline quadrature::Integral rescaled_integral(const Kernel& k, const Density& g, const Vec& p,
                                              double eps, int power,
                                              const std::function<double(const Vec&)>& w,
                                              double tol, double extra_radius = kernels::kInf) {
  const Domain& S = g.domain();
  const Cone cone = cone_or_full(S, p);
  quadrature::IntegralTask task;
  task.dim = k.dim();
  task.integrand = [&](const Vec& t) {
    const double kv = k(-t);
    if (kv == 0.0) return 0.0;
    return std::pow(kv, power) * w(t) * g.extended(p + eps * t);
  };
  task.region = aligned_region(cone);
  task.truncation_radius = std::min(kernels::truncation_radius(k, power, tol), extra_radius);
  task.tolerance = tol;
  task.singular_origin = k.singular();
  task.clips = {S.rescaled_clip(p, eps), [&k](const Vec& dir) { return k.support_along(-dir); }};
  return quadrature::integrate(task);
}

inline void check_common(const Kernel& k, const TestFunction& f, const Vec& p) {
  require_dim(k.dim(), f.dim());
  require_dim(k.dim(), p.size());
}

}  // namespace detail

// D_{eps,n} f(p) = (1 / (n eps^{d+2})) sum_j K((p - X_j)/eps) (f(X_j) - f(p)).
// Nonzero terms are sorted before pairwise summation, so the result does
// not depend on the order of the batch.
inline double empirical_laplacian(const Kernel& k, const TestFunction& f, const Vec& p, double eps,
                                  const SampleBatch& batch) {
  detail::check_common(k, f, p);
  require_dim(k.dim(), batch.dim);
  require(eps > 0.0, "eps must be positive");
  require(batch.size() >= 1, "sample batch is empty");
  const std::size_t d = k.dim();
  const double fp = f(p);
  const double reach = k.support_radius() * eps;
  std::vector<double> terms;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Vec x = batch.point(j);
    const Vec u = p - x;
    const double r2 = norm_sq(u);
    if (r2 > reach * reach) continue;
    if (r2 == 0.0 && k.singular()) continue;
    const double kv = k(u / eps);
    if (kv == 0.0) continue;
    const double term = kv * (f(x) - fp);
    if (term != 0.0) terms.push_back(term);
  }
  std::sort(terms.begin(), terms.end());
  const double n = static_cast<double>(batch.size());
  return quadrature::pairwise_sum(terms) / (n * std::pow(eps, static_cast<double>(d + 2)));
}

// D_eps f(p) = eps^{-2} int_{(S-p)/eps} K(-t) (f(p + eps t) - f(p)) g(p + eps t) dt,
// split into the first-order part eps^{-1} grad f . int K(-t) t g and the
// Taylor remainder.
inline OperatorValue averaging_operator(const Kernel& k, const TestFunction& f, const Density& g,
                                        const Vec& p, double eps, double tol = kDefaultTol) {
  detail::check_common(k, f, p);
  require_dim(k.dim(), g.dim());
  require(eps > 0.0, "eps must be positive");
  require(tol > 0.0, "tolerance must be positive");
  kernels::detail::require_moment_finite(k, 1.0, 2.0);
  detail::require_kernel_allowed(k, detail::cone_or_full(g.domain(), p));
  const Vec grad = f.gradient(p);
  const double fp = f(p);

  auto lin = [&](const Vec& t) { return dot(grad, t); };
  auto first = detail::rescaled_integral(k, g, p, eps, 1, lin, tol * eps);
  auto rem = [&](const Vec& t) { return f(p + eps * t) - fp - eps * dot(grad, t); };
  auto second = detail::rescaled_integral(k, g, p, eps, 1, rem, tol * eps * eps);

  OperatorValue out;
  out.add("first_order", quadrature::value_or_throw(first, "averaging operator") / eps,
          first.error / eps);
  out.add("remainder", quadrature::value_or_throw(second, "averaging operator") / (eps * eps),
          second.error / (eps * eps));
  return out;
}

namespace detail {

inline OperatorValue limit_from_moments(const TestFunction& f, const Density& g, const Vec& p,
                                        const kernels::MomentMatrix& M) {
  const Vec grad = f.gradient(p);
  const Vec dg = g.gradient_extended(p);
  const Mat H = f.hessian(p);
  OperatorValue out;
  out.add("gradient", quadratic_form(grad, M.values, dg), M.error);
  out.add("hessian", 0.5 * g.extended(p) * frobenius(H, M.values), M.error);
  return out;
}

}  // namespace detail

// Delta_K f(p) = grad f^T M grad g + (g(p)/2) <Hf, M>, M the full-space
// second-moment matrix.
inline OperatorValue limit_laplacian(const Kernel& k, const TestFunction& f, const Density& g,
                                     const Vec& p, double tol = kDefaultTol) {
  detail::check_common(k, f, p);
  require_dim(k.dim(), g.dim());
  if (geometry::cone_at(g.domain(), p).kind() != ConeKind::full_space) {
    throw PreconditionError("limit_laplacian needs an interior point");
  }
  detail::require_kernel_allowed(k, Cone::full_space(k.dim()));
  return detail::limit_from_moments(f, g, p, kernels::second_moment_matrix(k, 1, tol));
}

// Delta_{K,A(p)}: the same with moments over the cone A(p).
inline OperatorValue limit_laplacian_cone(const Kernel& k, const TestFunction& f,
                                          const Density& g, const Vec& p, const Cone& cone,
                                          double tol = kDefaultTol) {
  detail::check_common(k, f, p);
  require_dim(k.dim(), cone.dim());
  detail::require_kernel_allowed(k, cone);
  return detail::limit_from_moments(f, g, p, kernels::second_moment_matrix(k, cone, 1, tol));
}

struct BoundaryOptions {
  // Multiplies the stored true Hessian inside x'^T H x'.
  double convention_factor = 0.5;
  // g(p); 1 reproduces the bare tangent-plane integral.
  double density_at_p = 1.0;
  double tol = kDefaultTol;
};

// -w c int_{T_p} K(-x') (grad f . x') (x'^T H x') dx' over the tangent plane,
// returned as grad_T f . v_T with v_T in `vector`.
inline OperatorValue boundary_correction(const Kernel& k, const TestFunction& f, const Vec& p,
                                         const BoundaryData& bd, const BoundaryOptions& opt = {}) {
  detail::check_common(k, f, p);
  require_dim(k.dim(), bd.dim());
  require(opt.tol > 0.0, "tolerance must be positive");
  kernels::detail::require_moment_finite(k, 1.0, 2.0);
  const std::size_t d = k.dim();
  OperatorValue out;
  out.vector = Vec(d);
  if (d == 1 || bd.tangent.empty()) {
    out.add("boundary", 0.0);
    return out;
  }
  const std::size_t m = bd.tangent.size();
  auto Q = [&](const Vec& x) {
    double q = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        q += dot(x, bd.tangent[a]) * bd.hessian(a, b) * dot(x, bd.tangent[b]);
      }
    }
    return q;
  };
  double err = 0.0;
  const double scale = -opt.density_at_p * opt.convention_factor;
  for (std::size_t i = 0; i < m; ++i) {
    quadrature::IntegralTask task;
    task.dim = d;
    task.integrand = [&](const Vec& x) {
      const double kv = k(-x);
      if (kv == 0.0) return 0.0;
      return kv * dot(x, bd.tangent[i]) * Q(x);
    };
    task.truncation_radius = kernels::truncation_radius(k, 1, opt.tol);
    task.tolerance = opt.tol;
    task.singular_origin = k.singular();
    task.clips = {[&k](const Vec& dir) { return k.support_along(-dir); }};
    auto r = quadrature::integrate_subspace(task, bd.tangent);
    const double v = quadrature::value_or_throw(r, "boundary correction");
    out.vector += (scale * v) * bd.tangent[i];
    err += std::abs(scale) * r.error;
  }
  out.add("boundary", dot(f.gradient(p), out.vector), err * norm(f.gradient(p)));
  return out;
}

struct CombinedOptions {
  double convention_factor = 0.5;
  bool include_boundary_term = true;
  // |grad f(p) . int_{A(p)} K(-t) t dt| above this is a divergent regime.
  double cancel_tol = 1e-6;
  double tol = kDefaultTol;
};

// Delta_{K,S,g} f(p): Delta_K at interior points; on the boundary the cone
// operator plus grad_T f . v_T, provided grad f(p) cancels the cone's
// first moment.
inline LimitOutcome combined_limit(const Kernel& k, const TestFunction& f, const Density& g,
                                   const Vec& p, const CombinedOptions& opt = {}) {
  detail::check_common(k, f, p);
  const Domain& S = g.domain();
  require_dim(k.dim(), S.dim());
  if (!S.contains(p)) throw PreconditionError("point lies outside the domain");
  const Cone cone = geometry::cone_at(S, p);
  if (cone.kind() == ConeKind::full_space) return limit_laplacian(k, f, g, p, opt.tol);

  const double residual = dot(f.gradient(p), kernels::first_moment_vector(k, cone, opt.tol));
  if (std::abs(residual) > opt.cancel_tol) {
    return DivergentRegime{residual, "gradient does not cancel the first moment over the cone"};
  }
  OperatorValue out = limit_laplacian_cone(k, f, g, p, cone, opt.tol);
  if (opt.include_boundary_term && cone.kind() == ConeKind::half_space && k.dim() >= 2) {
    const auto bd = geometry::boundary_data_at(S, p);
    const auto bc =
        boundary_correction(k, f, p, bd, {opt.convention_factor, g.extended(p), opt.tol});
    out.add("boundary", bc.value, bc.error);
    out.vector = bc.vector;
  }
  return out;
}

// s^2 = g(p) grad f^T M^{(2)} grad f with M^{(2)}_ij = int K^2(-t) t_i t_j
// over the cone at p (all of R^d at interior points).
inline double clt_variance(const Kernel& k, const TestFunction& f, const Density& g, const Vec& p,
                           double tol = kDefaultTol) {
  detail::check_common(k, f, p);
  const Cone cone = geometry::cone_at(g.domain(), p);
  detail::require_kernel_allowed(k, cone);
  const auto M = kernels::second_moment_matrix(k, cone, 2, tol);
  const Vec grad = f.gradient(p);
  return std::max(0.0, g.extended(p) * detail::quadratic_form(grad, M.values, grad));
}

enum class VarianceSign { minus, plus };

// Variance of the linearised statistic at finite eps:
//   int K^2(-t) (grad f . t)^2 g(p + eps t) -+ eps^d (int K(-t) (grad f . t) g(p + eps t))^2.
inline double finite_eps_variance(const Kernel& k, const TestFunction& f, const Density& g,
                                  const Vec& p, double eps, VarianceSign sign = VarianceSign::minus,
                                  double tol = kDefaultTol) {
  detail::check_common(k, f, p);
  require(eps > 0.0, "eps must be positive");
  detail::require_kernel_allowed(k, detail::cone_or_full(g.domain(), p));
  const Vec grad = f.gradient(p);
  auto lin = [&](const Vec& t) { return dot(grad, t); };
  auto sq = [&](const Vec& t) { return dot(grad, t) * dot(grad, t); };
  const double A =
      quadrature::value_or_throw(detail::rescaled_integral(k, g, p, eps, 2, sq, tol), "variance");
  const double B =
      quadrature::value_or_throw(detail::rescaled_integral(k, g, p, eps, 1, lin, tol), "variance");
  const double c = std::pow(eps, static_cast<double>(k.dim())) * B * B;
  return sign == VarianceSign::minus ? A - c : A + c;
}

// grad f(p) . (1/eps) int_{(S-p)/eps, |t| < rho/eps} K(-t) t dt.
inline double cancellation_residual(const Kernel& k, const TestFunction& f, const Vec& p,
                                    const Domain& S, double eps, double rho,
                                    double tol = kDefaultTol) {
  detail::check_common(k, f, p);
  require_dim(k.dim(), S.dim());
  require(eps > 0.0 && rho > 0.0, "eps and rho must be positive");
  const Vec grad = f.gradient(p);
  const Density unit = sampling::constant(S, 1.0);
  auto lin = [&](const Vec& t) { return dot(grad, t); };
  auto r = detail::rescaled_integral(k, unit, p, eps, 1, lin, tol * eps, rho / eps);
  return quadrature::value_or_throw(r, "cancellation residual") / eps;
}

}  // namespace glap::operators
