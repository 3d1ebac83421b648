#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "glap/error.hpp"
#include "glap/geometry.hpp"
#include "glap/quadrature.hpp"
#include "glap/random.hpp"
#include "glap/vec.hpp"

namespace glap::kernels {

using geometry::Cone;
using quadrature::IntervalSet;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTol = 1e-8;

// |K(t)| <= C / (|t|^tau + |t|^beta), optionally cut off at a finite radius.
struct PowerLawEnvelope {
  double C = 1.0;
  double tau = 0.0;
  double beta = 0.0;
  bool compact = false;
};

struct Symmetry {
  bool even = false;          // K(-t) = K(t)
  bool radial = false;        // K(t) depends on |t| only
  bool product_form = false;  // K(t) = prod_i K_i(t_i)
  // Axis u about which K is even on the hyperplane orthogonal to u, in
  // addition to every axis when `even` holds.
  std::optional<Vec> tangential_axis;
};

class MomentCache;

class Kernel {
 public:
  using Fn = std::function<double(const Vec&)>;
  using Envelope = std::function<double(double)>;

  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double operator()(const Vec& t) const { return fn_(t); }
  double envelope(double r) const { return envelope_(r); }
  const std::optional<PowerLawEnvelope>& power_envelope() const { return power_; }
  double support_radius() const { return support_radius_; }
  bool singular() const { return singular_; }
  bool nonnegative() const { return nonnegative_; }
  const Symmetry& symmetry() const { return symmetry_; }
  std::uint64_t token() const { return token_; }
  MomentCache& cache() const { return *cache_; }

  // Whether K(x') = K(-x') for every x' orthogonal to u.
  bool even_tangential(const Vec& u) const {
    if (symmetry_.even) return true;
    if (!symmetry_.tangential_axis) return false;
    const Vec& a = *symmetry_.tangential_axis;
    return std::abs(std::abs(dot(a, u)) - norm(a) * norm(u)) <= 1e-12 * norm(u);
  }

  // Radial restriction of the support along a ray from the origin.
  IntervalSet support_along(const Vec& dir) const {
    if (clip_) return clip_(dir);
    return IntervalSet({0.0, support_radius_});
  }

  struct Spec {
    std::size_t dim = 1;
    std::string name;
    Fn fn;
    Envelope envelope;
    std::optional<PowerLawEnvelope> power;
    double support_radius = kInf;
    bool singular = false;
    bool nonnegative = false;
    Symmetry symmetry;
    std::function<IntervalSet(const Vec&)> clip;
  };

  // Built-ins use this directly; user kernels go through `custom`, which
  // validates the declared properties first.
  static Kernel from_spec(Spec s);

 private:
  Kernel() = default;

  std::size_t dim_ = 1;
  std::string name_;
  Fn fn_;
  Envelope envelope_;
  std::optional<PowerLawEnvelope> power_;
  double support_radius_ = kInf;
  bool singular_ = false;
  bool nonnegative_ = false;
  Symmetry symmetry_;
  std::function<IntervalSet(const Vec&)> clip_;
  std::uint64_t token_ = 0;
  std::shared_ptr<MomentCache> cache_;
};

// Moment values keyed by a description of (moment kind, region, power, tol).
// Filled under a mutex; a racing fill computes the same deterministic value.
class MomentCache {
 public:
  template <class Compute>
  std::vector<double> get(const std::string& key, const Compute& compute) {
    {
      std::lock_guard lock(mu_);
      if (auto it = store_.find(key); it != store_.end()) return it->second;
    }
    auto value = compute();
    std::lock_guard lock(mu_);
    return store_.emplace(key, std::move(value)).first->second;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return store_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<double>> store_;
};

inline Kernel Kernel::from_spec(Spec s) {
  static std::atomic<std::uint64_t> next_token{1};
  require(s.dim >= 1 && s.dim <= kMaxDim, "kernel dimension out of range");
  require(static_cast<bool>(s.fn), "kernel needs an evaluator");
  require(static_cast<bool>(s.envelope), "kernel needs an envelope");
  require(s.support_radius > 0.0, "support radius must be positive");
  Kernel k;
  k.dim_ = s.dim;
  k.name_ = std::move(s.name);
  k.fn_ = std::move(s.fn);
  k.envelope_ = std::move(s.envelope);
  k.power_ = s.power;
  k.support_radius_ = s.support_radius;
  k.singular_ = s.singular;
  k.nonnegative_ = s.nonnegative;
  k.symmetry_ = std::move(s.symmetry);
  k.clip_ = std::move(s.clip);
  k.token_ = next_token.fetch_add(1);
  k.cache_ = std::make_shared<MomentCache>();
  return k;
}

inline double eval_kernel(const Kernel& k, const Vec& t) {
  require_dim(k.dim(), t.size());
  if (k.singular() && norm_sq(t) == 0.0) {
    throw PreconditionError("singular kernel evaluated at the origin");
  }
  return k(t);
}

// ---------------------------------------------------------------------------
// Built-in kernels
// ---------------------------------------------------------------------------

namespace detail {

inline std::function<IntervalSet(const Vec&)> slab_clip(std::vector<double> half_widths) {
  return [hw = std::move(half_widths)](const Vec& dir) {
    double smax = kInf;
    for (std::size_t i = 0; i < hw.size(); ++i) {
      if (std::isfinite(hw[i]) && dir[i] != 0.0) smax = std::min(smax, hw[i] / std::abs(dir[i]));
    }
    return IntervalSet({0.0, smax});
  };
}

}  // namespace detail

// e^{-a|t|^2}
inline Kernel gaussian(std::size_t dim, double a = 1.0) {
  require(a > 0.0, "gaussian scale must be positive");
  Kernel::Spec s;
  s.dim = dim;
  s.name = "gaussian";
  s.fn = [a](const Vec& t) { return std::exp(-a * norm_sq(t)); };
  s.envelope = [a](double r) { return std::exp(-a * r * r); };
  s.nonnegative = true;
  s.symmetry = {true, true, true, std::nullopt};
  return Kernel::from_spec(std::move(s));
}

// Indicator of the closed ball of radius R.
inline Kernel indicator_ball(std::size_t dim, double R = 1.0) {
  require(R > 0.0, "indicator radius must be positive");
  Kernel::Spec s;
  s.dim = dim;
  s.name = "indicator_ball";
  s.fn = [R](const Vec& t) { return norm_sq(t) <= R * R ? 1.0 : 0.0; };
  s.envelope = [R](double r) { return r <= R ? 1.0 : 0.0; };
  s.power = PowerLawEnvelope{1.0, 0.0, 0.0, true};
  s.support_radius = R;
  s.nonnegative = true;
  s.symmetry = {true, true, dim == 1, std::nullopt};
  return Kernel::from_spec(std::move(s));
}

// Indicator of the box prod_i [-a_i, a_i].
inline Kernel indicator_box(std::vector<double> half_widths) {
  require(!half_widths.empty(), "indicator_box needs half widths");
  double r2 = 0.0;
  for (double a : half_widths) {
    require(a > 0.0, "box half widths must be positive");
    r2 += a * a;
  }
  const double R = std::sqrt(r2);
  Kernel::Spec s;
  s.dim = half_widths.size();
  s.name = "indicator_box";
  s.fn = [hw = half_widths](const Vec& t) {
    for (std::size_t i = 0; i < hw.size(); ++i) {
      if (std::abs(t[i]) > hw[i]) return 0.0;
    }
    return 1.0;
  };
  s.envelope = [R](double r) { return r <= R ? 1.0 : 0.0; };
  s.power = PowerLawEnvelope{1.0, 0.0, 0.0, true};
  s.support_radius = R;
  s.nonnegative = true;
  s.symmetry = {true, s.dim == 1, true, std::nullopt};
  s.clip = detail::slab_clip(std::move(half_widths));
  return Kernel::from_spec(std::move(s));
}

// (1 - |t|^2 / R^2)_+
inline Kernel epanechnikov(std::size_t dim, double R = 1.0) {
  require(R > 0.0, "epanechnikov radius must be positive");
  Kernel::Spec s;
  s.dim = dim;
  s.name = "epanechnikov";
  s.fn = [R](const Vec& t) { return std::max(0.0, 1.0 - norm_sq(t) / (R * R)); };
  s.envelope = [R](double r) { return std::max(0.0, 1.0 - r * r / (R * R)); };
  s.power = PowerLawEnvelope{1.0, 0.0, 0.0, true};
  s.support_radius = R;
  s.nonnegative = true;
  s.symmetry = {true, true, dim == 1, std::nullopt};
  return Kernel::from_spec(std::move(s));
}

// One-dimensional factor of a product kernel.
struct Factor {
  enum class Kind { gaussian, indicator, epanechnikov } kind = Kind::gaussian;
  double scale = 1.0;  // gaussian: a in e^{-a x^2}; otherwise the half width

  double operator()(double x) const {
    switch (kind) {
      case Kind::gaussian: return std::exp(-scale * x * x);
      case Kind::indicator: return std::abs(x) <= scale ? 1.0 : 0.0;
      case Kind::epanechnikov: return std::max(0.0, 1.0 - x * x / (scale * scale));
    }
    return 0.0;
  }
  bool compact() const { return kind != Kind::gaussian; }
};

inline Kernel product(std::vector<Factor> factors) {
  require(!factors.empty(), "product kernel needs factors");
  double rc2 = 0.0;
  double amin = kInf;
  std::vector<double> widths;
  for (const auto& f : factors) {
    require(f.scale > 0.0, "factor scales must be positive");
    if (f.compact()) {
      rc2 += f.scale * f.scale;
      widths.push_back(f.scale);
    } else {
      amin = std::min(amin, f.scale);
      widths.push_back(kInf);
    }
  }
  const bool all_compact = !std::isfinite(amin);
  Kernel::Spec s;
  s.dim = factors.size();
  s.name = "product";
  s.fn = [fs = factors](const Vec& t) {
    double v = 1.0;
    for (std::size_t i = 0; i < fs.size(); ++i) v *= fs[i](t[i]);
    return v;
  };
  // Gaussian coordinates carry at least |t|^2 - rc2 of the squared norm.
  s.envelope = [rc2, amin, all_compact](double r) {
    if (r * r <= rc2) return 1.0;
    return all_compact ? 0.0 : std::exp(-amin * (r * r - rc2));
  };
  if (all_compact) {
    s.power = PowerLawEnvelope{1.0, 0.0, 0.0, true};
    s.support_radius = std::sqrt(rc2);
  }
  s.nonnegative = true;
  s.symmetry = {true, false, true, std::nullopt};
  s.clip = detail::slab_clip(std::move(widths));
  return Kernel::from_spec(std::move(s));
}

// C / (|t|^tau + |t|^beta), optionally set to zero beyond `cutoff`.
// Singular at the origin when tau > 0.
inline Kernel power_law(std::size_t dim, double C, double tau, double beta, double cutoff = kInf) {
  require(C > 0.0, "power-law constant must be positive");
  require(tau >= 0.0 && beta > tau, "power-law exponents need 0 <= tau < beta");
  require(cutoff > 0.0, "power-law cutoff must be positive");
  Kernel::Spec s;
  s.dim = dim;
  s.name = "power_law";
  auto h = [C, tau, beta, cutoff](double r) {
    if (r > cutoff) return 0.0;
    return C / (std::pow(r, tau) + std::pow(r, beta));
  };
  s.fn = [h](const Vec& t) { return h(norm(t)); };
  s.envelope = h;
  s.power = PowerLawEnvelope{C, tau, beta, std::isfinite(cutoff)};
  s.support_radius = cutoff;
  s.singular = tau > 0.0;
  s.nonnegative = true;
  s.symmetry = {true, true, dim == 1, std::nullopt};
  return Kernel::from_spec(std::move(s));
}

// e^{-|t|^2} (1 + t_1 e^{-t_1^2} / 2): positive, not even, but even on every
// hyperplane orthogonal to e_1.
inline Kernel tilted_gaussian(std::size_t dim) {
  Kernel::Spec s;
  s.dim = dim;
  s.name = "tilted_gaussian";
  s.fn = [](const Vec& t) {
    return std::exp(-norm_sq(t)) * (1.0 + 0.5 * t[0] * std::exp(-t[0] * t[0]));
  };
  // max |x e^{-x^2}| = 1 / sqrt(2e) < 0.43
  s.envelope = [](double r) { return 1.25 * std::exp(-r * r); };
  s.nonnegative = true;
  s.symmetry = {false, false, false, Vec::unit(dim, 0)};
  return Kernel::from_spec(std::move(s));
}

// User kernel with declared properties, each checked on 1000 seeded probes
// in the ball of radius max(2 * support, 4). Throws PreconditionError naming
// the first property that fails.
inline Kernel custom(Kernel::Spec spec, std::uint64_t probe_seed = 0x5eed) {
  const std::size_t d = spec.dim;
  require(static_cast<bool>(spec.fn) && static_cast<bool>(spec.envelope),
          "custom kernel needs an evaluator and an envelope");
  Rng rng(probe_seed);
  const double reach = std::isfinite(spec.support_radius) ? 2.0 * spec.support_radius : 4.0;
  const double probe_r = std::max(reach, 4.0);
  auto near = [](double a, double b) {
    return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                  std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (int i = 0; i < 1000; ++i) {
    Vec t = probe_r * rng.unit_ball(d);
    if (norm_sq(t) == 0.0) continue;
    const double v = spec.fn(t);
    const double r = norm(t);
    if (!(std::abs(v) <= spec.envelope(r) * (1.0 + 1e-12))) {
      throw PreconditionError("custom kernel exceeds its envelope");
    }
    if (r > spec.support_radius && v != 0.0) {
      throw PreconditionError("custom kernel nonzero outside its support radius");
    }
    if (spec.nonnegative && v < 0.0) throw PreconditionError("custom kernel is negative");
    if (spec.symmetry.even && !near(v, spec.fn(-t))) {
      throw PreconditionError("custom kernel is not even");
    }
    if (spec.symmetry.radial) {
      Vec rot = rng.unit_ball(d);
      while (norm(rot) == 0.0) rot = rng.unit_ball(d);
      if (!near(v, spec.fn(rot * (r / norm(rot))))) {
        throw PreconditionError("custom kernel is not radial");
      }
    }
    if (spec.symmetry.product_form && d > 1) {
      // K(t) K(0) ^(d-1) = prod_i K(t_i e_i) for product kernels.
      const double k0 = spec.fn(Vec(d));
      double prod = 1.0;
      for (std::size_t j = 0; j < d; ++j) prod *= spec.fn(t[j] * Vec::unit(d, j));
      if (!near(v * std::pow(k0, static_cast<double>(d - 1)), prod)) {
        throw PreconditionError("custom kernel is not of product form");
      }
    }
    if (spec.symmetry.tangential_axis) {
      const Vec a = *spec.symmetry.tangential_axis / norm(*spec.symmetry.tangential_axis);
      const Vec x = t - dot(t, a) * a;
      if (norm_sq(x) > 0.0 && !near(spec.fn(x), spec.fn(-x))) {
        throw PreconditionError("custom kernel is not even on the declared hyperplane");
      }
    }
  }
  spec.name = spec.name.empty() ? "custom" : spec.name;
  return Kernel::from_spec(std::move(spec));
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

enum class Verdict { finite, divergent, unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::finite: return "finite";
    case Verdict::divergent: return "divergent";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

// The integral of |K|^alpha |t|^eta over R^d.
struct MomentPair {
  double alpha = 1.0;
  double eta = 0.0;
};

// Pairs whose finiteness is required for the fourth-moment condition
// int (|t|^4 + |t|) (|K|^4 + |K|) < inf.
inline std::vector<MomentPair> fourth_moment_pairs() { return {{4, 4}, {4, 1}, {1, 4}, {1, 1}}; }

// Pairs for the rate theorem: int (|t|^{2+theta} + |t|^{3+theta}) |K| < inf.
inline std::vector<MomentPair> rate_pairs(double theta) { return {{1, 2 + theta}, {1, 3 + theta}}; }

struct PairVerdict {
  MomentPair pair;
  Verdict verdict = Verdict::unknown;
  bool analytic = false;
  // Numeric diagnostics: ratio of the last two shell contributions at the
  // origin and at infinity (NaN when not computed).
  double inner_ratio = std::numeric_limits<double>::quiet_NaN();
  double outer_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct AdmissibilityReport {
  std::vector<PairVerdict> pairs;
  bool all_finite() const {
    for (const auto& p : pairs) {
      if (p.verdict != Verdict::finite) return false;
    }
    return true;
  }
};

inline Verdict analytic_verdict(const PowerLawEnvelope& env, std::size_t d, MomentPair pr) {
  const double dd = static_cast<double>(d);
  const bool origin_ok = pr.alpha * env.tau - pr.eta < dd;
  const bool tail_ok = env.compact || pr.alpha * env.beta - pr.eta > dd;
  return origin_ok && tail_ok ? Verdict::finite : Verdict::divergent;
}

struct NumericOptions {
  int shells = 40;             // dyadic shells on each side of r = 1
  double finite_below = 0.95;  // last-shell ratio under which the tail converges
  double divergent_above = 0.99;
  double tol = 1e-8;  // relative to the magnitude of each shell
};

// Growing-radius test: integrates |K|^alpha |t|^eta over the dyadic shells
// 2^k <= |t| <= 2^{k+1} (outwards) and 2^{-k-1} <= |t| <= 2^{-k} (inwards)
// and classifies each end by the ratio of its last two shell contributions.
inline PairVerdict numeric_verdict(const Kernel& k, MomentPair pr, const NumericOptions& opt = {}) {
  PairVerdict out{pr, Verdict::unknown, false};
  const std::size_t d = k.dim();
  auto integrand = [&](const Vec& t) {
    return std::pow(std::abs(k(t)), pr.alpha) * std::pow(norm(t), pr.eta);
  };
  auto shell = [&](double lo, double hi) {
    // Relative accuracy: the scale comes from probing the coordinate axes.
    double peak = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      for (double r : {lo, 0.5 * (lo + hi), hi}) {
        for (double sg : {-1.0, 1.0}) peak = std::max(peak, integrand(sg * r * Vec::unit(d, a)));
      }
    }
    const double scale = peak * quadrature::ball_volume(d) * std::pow(hi, static_cast<double>(d));
    quadrature::IntegralTask task;
    task.dim = d;
    task.integrand = integrand;
    task.truncation_radius = hi;
    task.tolerance = scale > 0.0 ? opt.tol * scale : 1e-300;
    task.clips = {[lo](const Vec&) { return IntervalSet({lo, kInf}); },
                  [&k](const Vec& dir) { return k.support_along(dir); }};
    auto r = quadrature::integrate(task);
    return r.value;
  };
  auto classify = [&](bool outward, double& ratio) {
    double prev = 0.0, last = 0.0;
    for (int j = 0; j < opt.shells; ++j) {
      const double a = outward ? std::ldexp(1.0, j) : std::ldexp(1.0, -j - 1);
      const double v = shell(a, 2.0 * a);
      prev = last;
      last = v;
    }
    if (last == 0.0) {
      ratio = 0.0;
      return Verdict::finite;
    }
    ratio = prev > 0.0 ? last / prev : kInf;
    if (ratio < opt.finite_below) return Verdict::finite;
    if (ratio > opt.divergent_above) return Verdict::divergent;
    return Verdict::unknown;
  };
  const Verdict inner = classify(false, out.inner_ratio);
  const Verdict outer = classify(true, out.outer_ratio);
  if (inner == Verdict::divergent || outer == Verdict::divergent) {
    out.verdict = Verdict::divergent;
  } else if (inner == Verdict::finite && outer == Verdict::finite) {
    out.verdict = Verdict::finite;
  }
  return out;
}

// Analytic verdicts for power-law envelopes, numeric shell verdicts
// otherwise; inconclusive numerics are reported as unknown.
inline AdmissibilityReport check_admissibility(const Kernel& k, const std::vector<MomentPair>& pairs,
                                               const NumericOptions& opt = {}) {
  require(!pairs.empty(), "admissibility check needs at least one pair");
  AdmissibilityReport rep;
  for (const auto& pr : pairs) {
    require(pr.alpha > 0.0 && pr.eta >= 0.0, "moment pairs need alpha > 0 and eta >= 0");
    if (k.power_envelope()) {
      rep.pairs.push_back({pr, analytic_verdict(*k.power_envelope(), k.dim(), pr), true});
    } else {
      rep.pairs.push_back(numeric_verdict(k, pr, opt));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

// Radius beyond which int_{r>R} h(r)^power r^{d+1} dr < tol / 10.
inline double truncation_radius(const Kernel& k, int power, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  if (std::isfinite(k.support_radius())) return k.support_radius();
  const double d = static_cast<double>(k.dim());
  const double p = power;
  const double budget = tol / 10.0;
  if (const auto& env = k.power_envelope()) {
    const double ex = env->beta * p - d - 2.0;
    if (ex <= 0.0) throw AdmissibilityError("envelope tail moment diverges");
    // int_R^inf C^p r^{-beta p} r^{d+1} dr = C^p R^{-ex} / ex
    return std::max(1.0, std::pow(budget * ex / std::pow(env->C, p), -1.0 / ex));
  }
  char key[64];
  std::snprintf(key, sizeof key, "R|%d|%a", power, tol);
  return k.cache().get(key, [&] {
    auto g = [&](double r) { return std::pow(k.envelope(r), p) * std::pow(r, d + 1.0); };
    auto tail = [&](double R) {
      double total = 0.0;
      for (double a = R; a < 1e6; a *= 2.0) {
        const double scale = g(a) * a;
        const double piece =
            quadrature::integrate_1d(g, a, 2.0 * a, budget * 1e-3 + 1e-9 * scale).value;
        total += piece;
        if (piece < budget * 1e-6) break;
      }
      return total;
    };
    double R = 1.0;
    while (tail(R) >= budget) {
      R *= 1.25;
      if (R > 1e6) throw AdmissibilityError("envelope tail does not decay");
    }
    return std::vector<double>{R};
  }).front();
}

struct MomentMatrix {
  Mat values;
  std::string region;  // "full_space" or the cone kind
  int power = 1;
  double error = 0.0;

  std::size_t dim() const { return values.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

namespace detail {

inline std::string hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline std::string region_key(const Cone& c) {
  std::string key = geometry::to_string(c.kind());
  if (c.kind() != geometry::ConeKind::full_space) {
    for (double x : c.axis()) key += "," + hex(x);
    key += "," + hex(c.opening());
  }
  return key;
}

inline void require_moment_finite(const Kernel& k, double power, double eta) {
  if (!k.power_envelope()) return;
  if (analytic_verdict(*k.power_envelope(), k.dim(), {power, eta}) == Verdict::divergent) {
    throw AdmissibilityError("moment integral of the kernel diverges");
  }
}

// int_cone w(t) K(-t)^power dt with polar quadrature.
inline quadrature::Integral kernel_integral(const Kernel& k, const Cone& cone, int power,
                                            double tol, const std::function<double(const Vec&)>& w,
                                            int tail_power) {
  quadrature::IntegralTask task;
  task.dim = k.dim();
  task.integrand = [&](const Vec& t) { return std::pow(k(-t), power) * w(t); };
  task.region = cone.angular_region();
  task.truncation_radius = truncation_radius(k, tail_power, tol);
  task.tolerance = tol;
  task.singular_origin = k.singular();
  task.clips = {[&k](const Vec& dir) { return k.support_along(-dir); }};
  return quadrature::integrate(task);
}

}  // namespace detail

// M_ij = int_region K(-t)^power t_i t_j dt; region is a cone (full space
// included). Cached per kernel.
inline MomentMatrix second_moment_matrix(const Kernel& k, const Cone& region, int power = 1,
                                         double tol = kDefaultTol) {
  require(power == 1 || power == 2, "power must be 1 or 2");
  require(tol > 0.0, "tolerance must be positive");
  require_dim(k.dim(), region.dim());
  detail::require_moment_finite(k, power, 2.0);
  const std::size_t d = k.dim();
  const std::string key = "M2|" + detail::region_key(region) + "|" + std::to_string(power) + "|" +
                          detail::hex(tol);
  auto flat = k.cache().get(key, [&] {
    std::vector<double> v(d * d + 1, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        auto r = detail::kernel_integral(
            k, region, power, tol, [i, j](const Vec& t) { return t[i] * t[j]; }, power);
        quadrature::value_or_throw(r, "second moment");
        v[i * d + j] = v[j * d + i] = r.value;
        err = std::max(err, r.error);
      }
    }
    v[d * d] = err;
    return v;
  });
  MomentMatrix m;
  m.values = Mat(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m.values(i, j) = flat[i * d + j];
  }
  m.region = geometry::to_string(region.kind());
  m.power = power;
  m.error = flat[d * d];
  return m;
}

// v_i = int_region K(-t) t_i dt.
inline Vec first_moment_vector(const Kernel& k, const Cone& region, double tol = kDefaultTol) {
  require(tol > 0.0, "tolerance must be positive");
  require_dim(k.dim(), region.dim());
  detail::require_moment_finite(k, 1.0, 1.0);
  const std::size_t d = k.dim();
  const std::string key = "M1|" + detail::region_key(region) + "|" + detail::hex(tol);
  auto flat = k.cache().get(key, [&] {
    std::vector<double> v(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      auto r = detail::kernel_integral(k, region, 1, tol, [i](const Vec& t) { return t[i]; }, 1);
      v[i] = quadrature::value_or_throw(r, "first moment");
    }
    return v;
  });
  return Vec(std::span<const double>(flat));
}

inline MomentMatrix second_moment_matrix(const Kernel& k, int power = 1, double tol = kDefaultTol) {
  return second_moment_matrix(k, Cone::full_space(k.dim()), power, tol);
}
inline Vec first_moment_vector(const Kernel& k, double tol = kDefaultTol) {
  return first_moment_vector(k, Cone::full_space(k.dim()), tol);
}

}  // namespace glap::kernels
