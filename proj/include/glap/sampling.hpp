#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glap/error.hpp"
#include "glap/geometry.hpp"
#include "glap/polynomial.hpp"
#include "glap/quadrature.hpp"
#include "glap/random.hpp"
#include "glap/vec.hpp"

namespace glap::sampling {

using geometry::Domain;

// C^k with k-th derivatives Hoelder of exponent theta.
struct Smoothness {
  int k = 1;
  double theta = 1.0;
};

// Probability density g = scale * P restricted to a domain, P a polynomial.
// Densities on unbounded domains are allowed for the deterministic operators
// (a locally constant g near p, say) but cannot be sampled.
class Density {
 public:
  Density(std::string type, Domain domain, Polynomial poly, double scale)
      : type_(std::move(type)), domain_(std::move(domain)), poly_(std::move(poly)), scale_(scale) {
    require_dim(domain_.dim(), poly_.dim());
    require(scale > 0.0 && std::isfinite(scale), "density scale must be positive and finite");
    if (auto box = domain_.bounding_box()) {
      bound_ = scale_ * poly_.abs_bound(box->lo, box->hi);
    }
  }

  const std::string& type() const { return type_; }
  const Domain& domain() const { return domain_; }
  const Polynomial& polynomial() const { return poly_; }
  std::size_t dim() const { return domain_.dim(); }
  Smoothness smoothness() const { return {1, 1.0}; }
  bool sampleable() const { return bound_.has_value(); }
  // sup g over the bounding box; also the rejection constant.
  double sup_bound() const {
    if (!bound_) throw PreconditionError("density on an unbounded domain has no envelope");
    return *bound_;
  }

  double operator()(const Vec& x) const {
    require_dim(dim(), x.size());
    return domain_.contains(x) ? scale_ * poly_(x) : 0.0;
  }
  // Value of the smooth extension, ignoring the domain.
  double extended(const Vec& x) const { return scale_ * poly_(x); }
  Vec gradient_extended(const Vec& x) const { return scale_ * poly_.gradient(x); }

 private:
  std::string type_;
  Domain domain_;
  Polynomial poly_;
  double scale_;
  std::optional<double> bound_;
};

// int_S P over a bounded domain: exact on boxes, otherwise polar quadrature
// about the bounding-box centre.
inline double polynomial_mass(const Domain& S, const Polynomial& P, double tol = 1e-10) {
  const auto box = S.bounding_box();
  if (!box) throw PreconditionError("cannot normalise a density on an unbounded domain");
  if (S.kind() == "box" || S.kind() == "interval") return P.integrate_box(box->lo, box->hi);
  const Vec c = 0.5 * (box->lo + box->hi);
  quadrature::IntegralTask task;
  task.dim = S.dim();
  task.integrand = [&](const Vec& t) { return P(c + t); };
  task.truncation_radius = norm(box->hi - box->lo);
  task.tolerance = tol;
  task.clips = {[&](const Vec& dir) { return S.ray(c, dir); }};
  return quadrature::value_or_throw(quadrature::integrate(task), "density mass");
}

namespace detail {

inline Density normalised(std::string type, const Domain& S, Polynomial P) {
  const double mass = polynomial_mass(S, P);
  require(mass > 0.0, "density has nonpositive mass");
  return Density(std::move(type), S, std::move(P), 1.0 / mass);
}

inline void check_nonnegative(const Density& g, std::uint64_t seed) {
  const auto box = g.domain().bounding_box();
  if (!box) return;
  Rng rng(seed);
  for (int i = 0; i < 1000; ++i) {
    Vec x(g.dim());
    for (std::size_t a = 0; a < g.dim(); ++a) x[a] = rng.uniform(box->lo[a], box->hi[a]);
    if (g(x) < 0.0) throw PreconditionError("density is negative inside its domain");
  }
}

}  // namespace detail

// Uniform law on a bounded domain.
inline Density uniform(const Domain& S) {
  auto vol = S.volume();
  const double v = vol ? *vol : polynomial_mass(S, Polynomial::constant(S.dim(), 1.0));
  return Density("uniform", S, Polynomial::constant(S.dim(), 1.0), 1.0 / v);
}

// Constant value c on S, not normalised; for deterministic operators on
// unbounded domains ("g = c near p").
inline Density constant(const Domain& S, double c) {
  return Density("constant", S, Polynomial::constant(S.dim(), 1.0), c);
}

// g proportional to a + b . x on S.
inline Density linear(const Domain& S, double a, const Vec& b) {
  auto g = detail::normalised("linear", S, Polynomial::affine(a, b));
  detail::check_nonnegative(g, 0x11);
  return g;
}

// g proportional to prod_i p_i(x_i) on S, each p_i given by its coefficients.
inline Density product(const Domain& S, const std::vector<std::vector<double>>& factors) {
  require(factors.size() == S.dim(), "product density needs one factor per coordinate");
  Polynomial P = Polynomial::constant(S.dim(), 1.0);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    P = P * Polynomial::univariate(S.dim(), i, factors[i]);
  }
  auto g = detail::normalised("product", S, std::move(P));
  detail::check_nonnegative(g, 0x12);
  return g;
}

inline Density custom_polynomial(const Domain& S, Polynomial P) {
  auto g = detail::normalised("custom_polynomial", S, std::move(P));
  detail::check_nonnegative(g, 0x13);
  return g;
}

// grad g at an interior point.
inline Vec density_gradient(const Density& g, const Vec& x) {
  require_dim(g.dim(), x.size());
  if (!g.domain().contains(x)) throw PreconditionError("point lies outside the density's domain");
  return g.gradient_extended(x);
}

// n points stored contiguously, coordinate-major within each point.
struct SampleBatch {
  std::size_t dim = 1;
  std::vector<double> coords;
  std::uint64_t master_seed = 0;
  std::uint64_t replication = 0;

  std::size_t size() const { return coords.size() / dim; }
  Vec point(std::size_t i) const {
    return Vec(std::span<const double>(coords.data() + i * dim, dim));
  }
};

// Rejection sampler on the bounding box: propose uniformly, accept when the
// proposal is in S and u * sup_bound <= g(x). Stream seed derive_seed(master,
// replication).
inline SampleBatch sample(const Density& g, std::size_t n, std::uint64_t master_seed,
                          std::uint64_t replication = 0) {
  require(n >= 1, "sample size must be positive");
  if (!g.sampleable()) throw PreconditionError("density on an unbounded domain cannot be sampled");
  const auto box = *g.domain().bounding_box();
  const double c = g.sup_bound();
  const std::size_t d = g.dim();
  Rng rng(derive_seed(master_seed, replication));
  SampleBatch batch{d, {}, master_seed, replication};
  batch.coords.reserve(n * d);
  Vec x(d);
  while (batch.coords.size() < n * d) {
    for (std::size_t a = 0; a < d; ++a) x[a] = rng.uniform(box.lo[a], box.hi[a]);
    const double u = rng.uniform();
    if (!g.domain().contains(x)) continue;
    const double gx = g.extended(x);
    if (gx > c) throw PreconditionError("rejection envelope violated");
    if (u * c <= gx) batch.coords.insert(batch.coords.end(), x.begin(), x.end());
  }
  return batch;
}

}  // namespace glap::sampling
