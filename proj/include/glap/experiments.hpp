#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "glap/error.hpp"
#include "glap/functions.hpp"
#include "glap/geometry.hpp"
#include "glap/kernels.hpp"
#include "glap/operators.hpp"
#include "glap/random.hpp"
#include "glap/sampling.hpp"
#include "glap/stats.hpp"
#include "glap/vec.hpp"

namespace glap::experiments {

using functions::TestFunction;
using kernels::Kernel;
using sampling::Density;

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

// eps_n = c n^{-gamma}.
struct EpsilonSchedule {
  double c = 1.0;
  double gamma = 0.25;
  std::size_t d = 1;
  double theta = 1.0;
  bool clt_valid = false;   // 1/(d+2+2 theta) < gamma < 1/d
  bool lln_valid = false;   // gamma < 1/(d+2)
  bool bounded_above = false;  // theta = 0 and n eps^{d+2} bounded

  double eps(std::size_t n) const { return c * std::pow(static_cast<double>(n), -gamma); }
};

inline EpsilonSchedule make_schedule(std::size_t d, double theta, double gamma, double c) {
  require(d >= 1, "dimension must be positive");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  require(c > 0.0 && std::isfinite(c), "schedule constant c must be positive");
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  const double dd = static_cast<double>(d);
  EpsilonSchedule s{c, gamma, d, theta};
  s.clt_valid = 1.0 / (dd + 2.0 + 2.0 * theta) < gamma && gamma < 1.0 / dd;
  s.lln_valid = gamma < 1.0 / (dd + 2.0);
  s.bounded_above = theta == 0.0 && gamma >= 1.0 / (dd + 2.0);
  return s;
}

// ---------------------------------------------------------------------------
// Configuration and results
// ---------------------------------------------------------------------------

enum class Kind { lln, clt, rate, corr, boundary, moments, admissible };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::lln: return "lln";
    case Kind::clt: return "clt";
    case Kind::rate: return "rate";
    case Kind::corr: return "corr";
    case Kind::boundary: return "boundary";
    case Kind::moments: return "moments";
    case Kind::admissible: return "admissible";
  }
  return "?";
}

inline std::optional<Kind> kind_from_string(const std::string& s) {
  for (Kind k : {Kind::lln, Kind::clt, Kind::rate, Kind::corr, Kind::boundary, Kind::moments,
                 Kind::admissible}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

// Reference point for the statistic Z.
enum class Centering { limit, averaging };

struct Thresholds {
  double lln_median = 0.02;
  double ks = 0.06;
  double variance_lo = 0.85;
  double variance_hi = 1.15;
  double corr = 0.1;
  double slope_band = 0.05;
  double degenerate_max = 0.25;  // max |Z| when s^2 = 0
  double plateau = 0.2;          // relative band for the omitted-term plateau
  double decrease_ratio = 0.5;   // last / first error for "decreasing"
  double exact_floor = 1e-9;     // errors below this count as exact
  double quadrature = 1e-8;
};

struct Experiment {
  Kind kind = Kind::lln;
  std::optional<Kernel> kernel;
  std::optional<Density> density;
  std::optional<geometry::Domain> domain;  // used when no density is given
  std::optional<TestFunction> function;
  std::vector<Vec> points;
  EpsilonSchedule schedule;
  std::vector<std::size_t> n_list;
  std::size_t replications = 1;
  std::uint64_t seed = 42;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  Thresholds tol;
  double convention_factor = 0.5;
  std::optional<Centering> centering;  // default: limit for clt, averaging for corr
  std::vector<kernels::MomentPair> pairs = kernels::fourth_moment_pairs();
  unsigned threads = 1;

  const Kernel& K() const {
    if (!kernel) throw PreconditionError("experiment needs a kernel");
    return *kernel;
  }
  const Density& g() const {
    if (!density) throw PreconditionError("experiment needs a density");
    return *density;
  }
  const TestFunction& f() const {
    if (!function) throw PreconditionError("experiment needs a test function");
    return *function;
  }
  const Vec& p(std::size_t i = 0) const {
    if (points.size() <= i) throw PreconditionError("experiment needs an evaluation point");
    return points[i];
  }
};

struct Record {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::size_t replication = 0;
  double value = 0.0;
  std::optional<double> value2;
};

struct Summary {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> ks;
  std::optional<double> corr;
  std::optional<double> median_error;
  std::string verdict;
};

struct ExperimentResult {
  Kind kind = Kind::lln;
  std::vector<Record> records;
  std::vector<Summary> summaries;
  bool pass = false;
  // Scalar diagnostics in insertion order (limit value, slope, s^2, ...).
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::string> notes;

  double diagnostic(const std::string& name) const {
    for (const auto& [k, v] : diagnostics) {
      if (k == name) return v;
    }
    throw PreconditionError("no diagnostic named " + name);
  }
};

// ---------------------------------------------------------------------------
// Replication runner
// ---------------------------------------------------------------------------

// out[i] = fn(i) for i < count on `threads` workers. Results are stored by
// index, so the output does not depend on scheduling.
template <class F>
auto parallel_map(std::size_t count, unsigned threads, const F& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(count);
  const unsigned workers =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, count)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

namespace detail {

inline double limit_value(const Experiment& ex, const Vec& p, bool include_boundary = true) {
  operators::CombinedOptions opt;
  opt.convention_factor = ex.convention_factor;
  opt.include_boundary_term = include_boundary;
  opt.tol = ex.tol.quadrature;
  const auto out = operators::combined_limit(ex.K(), ex.f(), ex.g(), p, opt);
  if (const auto* d = std::get_if<operators::DivergentRegime>(&out)) {
    throw PreconditionError("cancellation condition fails at p (residual " +
                            std::to_string(d->residual) + ")");
  }
  return std::get<operators::OperatorValue>(out).value;
}

inline void require_inside(const Experiment& ex) {
  for (const auto& p : ex.points) {
    require_dim(ex.g().dim(), p.size());
    if (!ex.g().domain().contains(p)) throw PreconditionError("evaluation point outside the domain");
  }
}

inline void require_stochastic(const Experiment& ex) {
  require(!ex.n_list.empty(), "n_list must not be empty");
  require(ex.replications >= 1, "replications must be positive");
  for (std::size_t i = 0; i < ex.n_list.size(); ++i) {
    require(ex.n_list[i] >= 1, "sample sizes must be positive");
  }
}

inline void require_eps_list(const Experiment& ex) {
  require(!ex.eps_list.empty(), "eps_list must not be empty");
  for (double e : ex.eps_list) require(e > 0.0, "eps values must be positive");
}

// Stream index for replication r at the i-th sample size.
inline std::uint64_t stream(const Experiment& ex, std::size_t i, std::size_t r) {
  return static_cast<std::uint64_t>(i) * ex.replications + r;
}

// Strictly decreasing (or already at the floor) with last/first <= ratio.
inline bool decreasing(const std::vector<double>& e, double floor, double ratio) {
  bool all_floor = true;
  for (double x : e) all_floor = all_floor && x <= floor;
  if (all_floor) return true;
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1]) && e[i] > floor) return false;
  }
  return e.back() <= floor || e.back() <= ratio * e.front();
}

inline bool strictly_decreasing(const std::vector<double>& e, double floor) {
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1]) && e[i] > floor) return false;
  }
  return true;
}

inline Summary summarize(std::size_t n, double eps, const std::vector<double>& xs) {
  const auto s = stats::summarize(xs);
  Summary out;
  out.n = n;
  out.epsilon = eps;
  out.count = s.count;
  out.mean = s.mean;
  out.variance = s.variance;
  return out;
}

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
inline double min_eigenvalue(Mat a) {
  const std::size_t d = a.size();
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) off += a(i, j) * a(i, j);
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double m = a(0, 0);
  for (std::size_t i = 1; i < d; ++i) m = std::min(m, a(i, i));
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

// Errors |D_{eps_n,n} f(p) - Delta f(p)| per replication and n.
inline ExperimentResult run_lln(const Experiment& ex) {
  detail::require_stochastic(ex);
  if (!ex.schedule.lln_valid) throw PreconditionError("schedule invalid for lln");
  detail::require_inside(ex);
  const Vec p = ex.p();
  const double limit = detail::limit_value(ex, p);
  ExperimentResult res;
  res.kind = Kind::lln;
  res.diagnostics.emplace_back("limit", limit);
  std::vector<double> medians;
  for (std::size_t i = 0; i < ex.n_list.size(); ++i) {
    const std::size_t n = ex.n_list[i];
    const double eps = ex.schedule.eps(n);
    auto values = parallel_map(ex.replications, ex.threads, [&](std::size_t r) {
      const auto batch = sampling::sample(ex.g(), n, ex.seed, detail::stream(ex, i, r));
      return operators::empirical_laplacian(ex.K(), ex.f(), p, eps, batch);
    });
    std::vector<double> errors;
    for (std::size_t r = 0; r < values.size(); ++r) {
      errors.push_back(std::abs(values[r] - limit));
      res.records.push_back({n, eps, r, values[r], errors.back()});
    }
    auto s = detail::summarize(n, eps, values);
    s.median_error = stats::median(errors);
    medians.push_back(*s.median_error);
    res.summaries.push_back(s);
  }
  const double floor = ex.tol.exact_floor;
  for (std::size_t i = 0; i < medians.size(); ++i) {
    bool ok = i == 0 || medians[i] < medians[i - 1] || medians[i] <= floor;
    if (i + 1 == medians.size()) ok = ok && medians[i] < ex.tol.lln_median;
    res.summaries[i].verdict = ok ? "pass" : "fail";
  }
  res.pass = detail::strictly_decreasing(medians, floor) && medians.back() < ex.tol.lln_median;
  return res;
}

// Z = sqrt(n eps^{d+2}) (D_{eps,n} f(p) - centre) per replication and n,
// compared with N(0, s^2) at the largest n.
inline ExperimentResult run_clt(const Experiment& ex) {
  detail::require_stochastic(ex);
  if (!ex.schedule.clt_valid) throw PreconditionError("schedule invalid for clt");
  detail::require_inside(ex);
  const Vec p = ex.p();
  const std::size_t d = ex.K().dim();
  const Centering centre = ex.centering.value_or(Centering::limit);
  const double s2 = operators::clt_variance(ex.K(), ex.f(), ex.g(), p, ex.tol.quadrature);
  const bool degenerate = s2 == 0.0;
  const double limit = centre == Centering::limit ? detail::limit_value(ex, p) : 0.0;
  ExperimentResult res;
  res.kind = Kind::clt;
  res.diagnostics.emplace_back("s2", s2);
  if (centre == Centering::limit) res.diagnostics.emplace_back("limit", limit);
  if (degenerate) res.notes.push_back("degenerate: s^2 = 0, testing max |Z| instead of KS");
  for (std::size_t i = 0; i < ex.n_list.size(); ++i) {
    const std::size_t n = ex.n_list[i];
    const double eps = ex.schedule.eps(n);
    const double c = centre == Centering::limit
                         ? limit
                         : operators::averaging_operator(ex.K(), ex.f(), ex.g(), p, eps,
                                                         ex.tol.quadrature)
                               .value;
    const double scale = std::sqrt(static_cast<double>(n) * std::pow(eps, static_cast<double>(d + 2)));
    auto z = parallel_map(ex.replications, ex.threads, [&](std::size_t r) {
      const auto batch = sampling::sample(ex.g(), n, ex.seed, detail::stream(ex, i, r));
      return scale * (operators::empirical_laplacian(ex.K(), ex.f(), p, eps, batch) - c);
    });
    for (std::size_t r = 0; r < z.size(); ++r) res.records.push_back({n, eps, r, z[r], {}});
    auto s = detail::summarize(n, eps, z);
    bool ok;
    if (degenerate) {
      double mx = 0.0;
      for (double x : z) mx = std::max(mx, std::abs(x));
      res.diagnostics.emplace_back("max_abs_z@" + std::to_string(n), mx);
      ok = mx < ex.tol.degenerate_max;
    } else {
      s.ks = stats::ks_statistic(z, std::sqrt(s2));
      const double ratio = s.variance / s2;
      res.diagnostics.emplace_back("variance_ratio@" + std::to_string(n), ratio);
      ok = *s.ks < ex.tol.ks && ratio >= ex.tol.variance_lo && ratio <= ex.tol.variance_hi;
    }
    s.verdict = ok ? "pass" : "fail";
    res.summaries.push_back(s);
  }
  res.pass = res.summaries.back().verdict == "pass";
  return res;
}

// |D_eps f(p) - Delta f(p)| over the eps grid and its log-log slope.
inline ExperimentResult run_rate(const Experiment& ex) {
  detail::require_eps_list(ex);
  detail::require_inside(ex);
  const Vec p = ex.p();
  const double limit = detail::limit_value(ex, p);
  ExperimentResult res;
  res.kind = Kind::rate;
  res.diagnostics.emplace_back("limit", limit);
  std::vector<double> errors;
  for (std::size_t i = 0; i < ex.eps_list.size(); ++i) {
    const double eps = ex.eps_list[i];
    const double v =
        operators::averaging_operator(ex.K(), ex.f(), ex.g(), p, eps, ex.tol.quadrature).value;
    errors.push_back(std::abs(v - limit));
    res.records.push_back({0, eps, 0, v, errors.back()});
    Summary s;
    s.epsilon = eps;
    s.count = 1;
    s.mean = v;
    s.median_error = errors.back();
    res.summaries.push_back(s);
  }
  bool exact = true;
  for (double e : errors) exact = exact && e <= ex.tol.exact_floor;
  if (exact) {
    res.notes.push_back("exact: errors at the quadrature floor, no rate to fit");
    res.pass = true;
  } else {
    bool positive = true;
    for (double e : errors) positive = positive && e > 0.0;
    if (positive && errors.size() >= 2) {
      const double slope = stats::loglog_slope(ex.eps_list, errors);
      res.diagnostics.emplace_back("slope", slope);
      res.diagnostics.emplace_back("theta", ex.schedule.theta);
      res.pass = std::abs(slope - ex.schedule.theta) <= ex.tol.slope_band;
    } else {
      res.notes.push_back("some errors are zero; slope undefined");
      res.pass = false;
    }
  }
  for (auto& s : res.summaries) s.verdict = res.pass ? "pass" : "fail";
  return res;
}

// Paired statistics at two points from one batch; Pearson correlation per n.
inline ExperimentResult run_corr(const Experiment& ex) {
  detail::require_stochastic(ex);
  if (ex.points.size() != 2) throw PreconditionError("corr needs exactly two points");
  if (norm(ex.p(0) - ex.p(1)) == 0.0) throw PreconditionError("corr needs two distinct points");
  if (!ex.schedule.clt_valid) throw PreconditionError("schedule invalid for corr");
  detail::require_inside(ex);
  for (const auto& q : ex.points) {
    if (geometry::cone_at(ex.g().domain(), q).kind() != geometry::ConeKind::full_space) {
      throw PreconditionError("corr points must be interior");
    }
  }
  const std::size_t d = ex.K().dim();
  const Centering centre = ex.centering.value_or(Centering::averaging);
  ExperimentResult res;
  res.kind = Kind::corr;
  std::vector<double> corrs;
  for (std::size_t i = 0; i < ex.n_list.size(); ++i) {
    const std::size_t n = ex.n_list[i];
    const double eps = ex.schedule.eps(n);
    double c[2];
    for (int a = 0; a < 2; ++a) {
      c[a] = centre == Centering::averaging
                 ? operators::averaging_operator(ex.K(), ex.f(), ex.g(), ex.p(a), eps,
                                                 ex.tol.quadrature)
                       .value
                 : detail::limit_value(ex, ex.p(a));
    }
    const double scale = std::sqrt(static_cast<double>(n) * std::pow(eps, static_cast<double>(d + 2)));
    auto z = parallel_map(ex.replications, ex.threads, [&](std::size_t r) {
      const auto batch = sampling::sample(ex.g(), n, ex.seed, detail::stream(ex, i, r));
      return std::pair<double, double>{
          scale * (operators::empirical_laplacian(ex.K(), ex.f(), ex.p(0), eps, batch) - c[0]),
          scale * (operators::empirical_laplacian(ex.K(), ex.f(), ex.p(1), eps, batch) - c[1])};
    });
    std::vector<double> first;
    for (std::size_t r = 0; r < z.size(); ++r) {
      res.records.push_back({n, eps, r, z[r].first, z[r].second});
      first.push_back(z[r].first);
    }
    auto s = detail::summarize(n, eps, first);
    s.corr = stats::correlation(z);
    corrs.push_back(std::abs(*s.corr));
    s.verdict = corrs.back() < ex.tol.corr ? "pass" : "fail";
    res.summaries.push_back(s);
  }
  res.pass = corrs.back() < ex.tol.corr && detail::strictly_decreasing(corrs, 0.0);
  return res;
}

// Boundary errors with and without the curvature term over the eps grid.
inline ExperimentResult run_boundary(const Experiment& ex) {
  detail::require_eps_list(ex);
  detail::require_inside(ex);
  const Vec p = ex.p();
  const auto& S = ex.g().domain();
  if (geometry::cone_at(S, p).kind() == geometry::ConeKind::full_space) {
    throw PreconditionError("boundary experiment needs a boundary point");
  }
  ExperimentResult res;
  res.kind = Kind::boundary;
  res.diagnostics.emplace_back("convention_factor", ex.convention_factor);

  operators::CombinedOptions opt;
  opt.convention_factor = ex.convention_factor;
  opt.tol = ex.tol.quadrature;
  const auto with = operators::combined_limit(ex.K(), ex.f(), ex.g(), p, opt);
  if (const auto* dv = std::get_if<operators::DivergentRegime>(&with)) {
    res.notes.push_back("divergent regime: " + dv->reason);
    res.diagnostics.emplace_back("cone_residual", dv->residual);
    for (double eps : ex.eps_list) {
      const double r =
          operators::cancellation_residual(ex.K(), ex.f(), p, S, eps, 1.0, ex.tol.quadrature);
      res.records.push_back({0, eps, 0, r, {}});
      Summary s;
      s.epsilon = eps;
      s.count = 1;
      s.mean = r;
      s.verdict = "divergent";
      res.summaries.push_back(s);
    }
    res.pass = false;
    return res;
  }
  const auto& L = std::get<operators::OperatorValue>(with);
  opt.include_boundary_term = false;
  const double without = operators::value_of(
      operators::combined_limit(ex.K(), ex.f(), ex.g(), p, opt)).value;
  double correction = 0.0;
  for (const auto& [name, v] : L.components) {
    if (name == "boundary") correction = v;
  }
  res.diagnostics.emplace_back("limit", L.value);
  res.diagnostics.emplace_back("limit_without_term", without);
  res.diagnostics.emplace_back("correction", correction);

  std::vector<double> e_with, e_without;
  for (double eps : ex.eps_list) {
    const double v =
        operators::averaging_operator(ex.K(), ex.f(), ex.g(), p, eps, ex.tol.quadrature).value;
    e_with.push_back(std::abs(v - L.value));
    e_without.push_back(std::abs(v - without));
    res.records.push_back({0, eps, 0, e_with.back(), e_without.back()});
    Summary s;
    s.epsilon = eps;
    s.count = 1;
    s.mean = v;
    s.median_error = e_with.back();
    res.summaries.push_back(s);
  }
  const bool dec = detail::decreasing(e_with, ex.tol.exact_floor, ex.tol.decrease_ratio);
  res.diagnostics.emplace_back("decreasing", dec ? 1.0 : 0.0);
  bool plateau = true;
  if (std::abs(correction) > ex.tol.exact_floor) {
    plateau = std::abs(e_without.back() - std::abs(correction)) <=
              ex.tol.plateau * std::abs(correction);
    res.diagnostics.emplace_back("plateau_ratio", e_without.back() / std::abs(correction));
  } else {
    res.notes.push_back("boundary term vanishes; no plateau to check");
  }
  res.pass = dec && plateau;
  for (auto& s : res.summaries) s.verdict = res.pass ? "pass" : "fail";
  return res;
}

// Second-moment matrices (powers 1 and 2) and the first-moment vector over
// the cone at the point (full space when no density or point is given).
inline ExperimentResult run_moments(const Experiment& ex) {
  const auto& k = ex.K();
  const std::size_t d = k.dim();
  geometry::Cone cone = geometry::Cone::full_space(d);
  if (!ex.points.empty()) {
    if (ex.density) cone = geometry::cone_at(ex.g().domain(), ex.p());
    else if (ex.domain) cone = geometry::cone_at(*ex.domain, ex.p());
  }
  ExperimentResult res;
  res.kind = Kind::moments;
  res.notes.push_back(std::string("region: ") + geometry::to_string(cone.kind()));
  res.notes.push_back("records: replication indexes M1 (row-major), then M2, then the first moment");
  bool ok = true;
  std::size_t idx = 0;
  for (int power : {1, 2}) {
    const auto M = kernels::second_moment_matrix(k, cone, power, ex.tol.quadrature);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        res.records.push_back({0, 0.0, idx++, M.values(i, j), M.error});
        ok = ok && std::abs(M.values(i, j) - M.values(j, i)) <= 2.0 * ex.tol.quadrature;
      }
    }
    const double lam = detail::min_eigenvalue(M.values);
    res.diagnostics.emplace_back("min_eigenvalue_M" + std::to_string(power), lam);
    if (k.nonnegative()) ok = ok && lam >= -4.0 * ex.tol.quadrature;
  }
  const Vec m1 = kernels::first_moment_vector(k, cone, ex.tol.quadrature);
  for (std::size_t i = 0; i < d; ++i) res.records.push_back({0, 0.0, idx++, m1[i], {}});
  Summary s;
  s.count = res.records.size();
  s.verdict = ok ? "pass" : "fail";
  res.summaries.push_back(s);
  res.pass = ok;
  return res;
}

// Analytic against numeric verdicts for each moment pair. Verdicts are
// coded 1 finite, 0 divergent, NaN unknown.
inline ExperimentResult run_admissible(const Experiment& ex) {
  const auto& k = ex.K();
  require(!ex.pairs.empty(), "admissible needs at least one moment pair");
  ExperimentResult res;
  res.kind = Kind::admissible;
  auto code = [](kernels::Verdict v) {
    switch (v) {
      case kernels::Verdict::finite: return 1.0;
      case kernels::Verdict::divergent: return 0.0;
      case kernels::Verdict::unknown: break;
    }
    return std::nan("");
  };
  bool agree = true;
  bool all_finite = true;
  for (std::size_t i = 0; i < ex.pairs.size(); ++i) {
    const auto numeric = kernels::numeric_verdict(k, ex.pairs[i]);
    std::optional<double> analytic;
    if (k.power_envelope()) {
      analytic = code(kernels::analytic_verdict(*k.power_envelope(), k.dim(), ex.pairs[i]));
      agree = agree && *analytic == code(numeric.verdict);
    }
    all_finite = all_finite && numeric.verdict == kernels::Verdict::finite;
    res.records.push_back({0, 0.0, i, code(numeric.verdict), analytic});
  }
  res.notes.push_back("records: value = numeric verdict, value2 = analytic verdict");
  res.diagnostics.emplace_back("admissible", all_finite ? 1.0 : 0.0);
  res.pass = k.power_envelope() ? agree : all_finite;
  Summary s;
  s.count = ex.pairs.size();
  s.verdict = res.pass ? "pass" : "fail";
  res.summaries.push_back(s);
  return res;
}

inline ExperimentResult run(const Experiment& ex) {
  switch (ex.kind) {
    case Kind::lln: return run_lln(ex);
    case Kind::clt: return run_clt(ex);
    case Kind::rate: return run_rate(ex);
    case Kind::corr: return run_corr(ex);
    case Kind::boundary: return run_boundary(ex);
    case Kind::moments: return run_moments(ex);
    case Kind::admissible: return run_admissible(ex);
  }
  throw PreconditionError("unknown experiment");
}

// ---------------------------------------------------------------------------
// Linearised statistic
// ---------------------------------------------------------------------------

struct LinearizedVariance {
  double empirical = 0.0;
  double std_error = 0.0;
  double minus = 0.0;
  double plus = 0.0;
};

// Empirical variance over R replications of
//   Z = (n eps^{d+2})^{-1/2} sum_j (K(-Y_j/eps) grad f . Y_j - E[.]),  Y_j = X_j - p,
// next to the two candidate closed forms.
inline LinearizedVariance linearized_variance(const Kernel& k, const TestFunction& f,
                                              const Density& g, const Vec& p, double eps,
                                              std::size_t n, std::size_t R, std::uint64_t seed,
                                              unsigned threads, double tol = 1e-10) {
  require(R >= 2, "need at least two replications");
  const std::size_t d = k.dim();
  const Vec grad = f.gradient(p);
  auto lin = [&](const Vec& t) { return dot(grad, t); };
  const double B = quadrature::value_or_throw(
      operators::detail::rescaled_integral(k, g, p, eps, 1, lin, tol), "linearised mean");
  const double mean = std::pow(eps, static_cast<double>(d + 1)) * B;
  const double scale =
      1.0 / std::sqrt(static_cast<double>(n) * std::pow(eps, static_cast<double>(d + 2)));
  auto z = parallel_map(R, threads, [&](std::size_t r) {
    const auto batch = sampling::sample(g, n, seed, r);
    double s = 0.0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const Vec y = batch.point(j) - p;
      s += k(-(y / eps)) * dot(grad, y) - mean;
    }
    return scale * s;
  });
  const auto sm = stats::summarize(z);
  LinearizedVariance out;
  out.empirical = sm.variance;
  // sd of the sample variance: sigma^2 sqrt(2/(R-1) + kurtosis/R)
  out.std_error = sm.variance * std::sqrt(2.0 / static_cast<double>(R - 1) +
                                          sm.excess_kurtosis / static_cast<double>(R));
  out.minus = operators::finite_eps_variance(k, f, g, p, eps, operators::VarianceSign::minus, tol);
  out.plus = operators::finite_eps_variance(k, f, g, p, eps, operators::VarianceSign::plus, tol);
  return out;
}

}  // namespace glap::experiments
