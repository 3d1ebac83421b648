#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <variant>
#include <vector>

#include "glap/error.hpp"
#include "glap/random.hpp"
#include "glap/vec.hpp"

namespace glap::quadrature {

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;

  Integral& operator+=(const Integral& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    return *this;
  }
  friend Integral operator*(double s, Integral i) {
    i.value *= s;
    i.error *= std::abs(s);
    return i;
  }
};

// Throws NonConvergence when the estimate did not meet its tolerance.
inline double value_or_throw(const Integral& r, const char* what) {
  if (!r.converged) {
    throw NonConvergence(std::string(what) + ": quadrature did not converge (error estimate " +
                         std::to_string(r.error) + ")");
  }
  return r.value;
}

inline constexpr int kMaxDepth = 20;

// Pairwise (cascade) summation in index order. Deterministic for a given
// input sequence and markedly more accurate than a running sum.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  int depth = 0;
};

template <class F>
Panel gk15(const F& f, double a, double b, int depth) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = f(centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> fv1{}, fv2{};
  for (int j = 0; j < 7; ++j) {
    const double absc = hlgth * kXgk[static_cast<std::size_t>(j)];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[static_cast<std::size_t>(j)] = f1;
    fv2[static_cast<std::size_t>(j)] = f2;
    resk += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
    resabs += kWgk[static_cast<std::size_t>(j)] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[static_cast<std::size_t>(j)] *
              (std::abs(fv1[static_cast<std::size_t>(j)] - reskh) +
               std::abs(fv2[static_cast<std::size_t>(j)] - reskh));
  }
  const double ah = std::abs(hlgth);
  resk *= hlgth;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg * hlgth));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
  return Panel{a, b, resk, err, depth};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b] to an absolute
// tolerance. Interior breakpoints (discontinuities, kinks) seed the initial
// partition. A panel is never bisected more than `max_depth` times; if the
// tolerance is still unmet the result is flagged as not converged.
template <class F>
Integral integrate_1d(const F& f, double a, double b, double abs_tol,
                      std::span<const double> breakpoints = {}, int max_depth = kMaxDepth) {
  require(abs_tol > 0.0, "quadrature tolerance must be positive");
  if (!(a < b)) return {};
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto worse = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };
  std::priority_queue<detail::Panel, std::vector<detail::Panel>, decltype(worse)> open(worse);
  std::vector<detail::Panel> done;
  double total_err = 0.0;
  double frozen_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = detail::gk15(f, cuts[i], cuts[i + 1], 0);
    total_err += p.error;
    open.push(p);
  }
  // Stops once the panels that may no longer be split already exceed the
  // budget; further work elsewhere could not rescue convergence.
  while (!open.empty() && total_err > abs_tol && frozen_err <= abs_tol) {
    auto worst = open.top();
    open.pop();
    if (worst.depth >= max_depth) {
      frozen_err += worst.error;
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid, worst.depth + 1);
    auto right = detail::gk15(f, mid, worst.b, worst.depth + 1);
    total_err += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }
  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  std::sort(done.begin(), done.end(),
            [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
  std::vector<double> values;
  values.reserve(done.size());
  double err = 0.0;
  for (const auto& p : done) {
    values.push_back(p.value);
    err += p.error;
  }
  return Integral{pairwise_sum(values), err, err <= abs_tol};
}

// Closed interval [lo, hi] on a ray parameter r >= 0.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Sorted, disjoint union of intervals. Used to describe where a ray from the
// origin meets an integration region.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(Interval i) {
    if (i.hi > i.lo) parts_.push_back(i);
  }
  static IntervalSet empty() { return {}; }

  const std::vector<Interval>& parts() const { return parts_; }
  bool is_empty() const { return parts_.empty(); }

  void intersect(const IntervalSet& other) {
    std::vector<Interval> out;
    for (const auto& x : parts_) {
      for (const auto& y : other.parts_) {
        const double lo = std::max(x.lo, y.lo);
        const double hi = std::min(x.hi, y.hi);
        if (hi > lo) out.push_back({lo, hi});
      }
    }
    parts_ = std::move(out);
  }
  void intersect(Interval i) { intersect(IntervalSet(i)); }

  void scale(double s) {
    for (auto& p : parts_) {
      p.lo *= s;
      p.hi *= s;
    }
  }

  // Adds an interval, merging overlaps.
  void unite(Interval i) {
    if (!(i.hi > i.lo)) return;
    parts_.push_back(i);
    std::sort(parts_.begin(), parts_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& p : parts_) {
      if (!merged.empty() && p.lo <= merged.back().hi) {
        merged.back().hi = std::max(merged.back().hi, p.hi);
      } else {
        merged.push_back(p);
      }
    }
    parts_ = std::move(merged);
  }

 private:
  std::vector<Interval> parts_;
};

// Restricts the ray from the origin in unit direction `dir` (ambient
// coordinates) to the parameters r where the region is present.
using RayClip = std::function<IntervalSet(const Vec& dir)>;

// Directions of integration, parametrised by hyperspherical angles in a local
// orthonormal frame. `embedding` maps local unit vectors (dimension `local_dim`)
// into the ambient space; for full-dimensional regions it is a rotation.
//
// Angle conventions, by local dimension m:
//   m = 1: two directions, +e1 at angle 0 and -e1 at angle pi;
//   m = 2: sigma = (sin phi, cos phi), phi in [-pi, pi];
//   m >= 3: sigma_m = cos phi1, phi1 in [0, pi], the rest on a scaled S^{m-2}.
// Only the first angle is ever restricted; `first_lo`/`first_hi` carve out the
// cone about the last local axis.
struct AngularRegion {
  std::size_t local_dim = 0;
  std::vector<Vec> embedding;  // local_dim ambient column vectors
  double first_lo = 0.0;
  double first_hi = 0.0;
  std::vector<double> first_breaks;
  bool empty = false;

  static double full_lo(std::size_t m) { return m == 2 ? -std::numbers::pi : 0.0; }
  static double full_hi(std::size_t) { return std::numbers::pi; }

  static AngularRegion full(const Mat& frame) {
    AngularRegion r;
    r.local_dim = frame.size();
    for (std::size_t j = 0; j < frame.size(); ++j) r.embedding.push_back(frame.column(j));
    r.first_lo = full_lo(r.local_dim);
    r.first_hi = full_hi(r.local_dim);
    return r;
  }
  static AngularRegion full(std::size_t dim) { return full(Mat::identity(dim)); }

  // Half-space {t : t . frame_last >= 0}.
  static AngularRegion half(const Mat& frame) {
    AngularRegion r = full(frame);
    const double h = std::numbers::pi / 2.0;
    r.first_lo = r.local_dim == 2 ? -h : 0.0;
    r.first_hi = h;
    return r;
  }

  // Subspace spanned by `basis` (orthonormal), whole sphere of directions.
  static AngularRegion subspace(std::vector<Vec> basis) {
    AngularRegion r;
    r.local_dim = basis.size();
    r.embedding = std::move(basis);
    r.first_lo = full_lo(r.local_dim);
    r.first_hi = full_hi(r.local_dim);
    return r;
  }

  std::size_t ambient_dim() const { return embedding.empty() ? 0 : embedding.front().size(); }

  Vec to_ambient(const Vec& local) const {
    Vec out(ambient_dim());
    for (std::size_t j = 0; j < local_dim; ++j) out += local[j] * embedding[j];
    return out;
  }
};

// Surface measure of the unit sphere S^{m-1} (counting measure for m = 1).
inline double sphere_area(std::size_t m) {
  switch (m) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    case 4: return 2.0 * std::numbers::pi * std::numbers::pi;
    default: throw Unsupported("sphere area only tabulated for m <= 4");
  }
}

// Volume of the unit ball in R^m.
inline double ball_volume(std::size_t m) {
  return m == 0 ? 1.0 : sphere_area(m) / static_cast<double>(m);
}

// Region of integration for a polar-coordinate integral.
struct FullSpace {};
struct SubspaceRegion {
  std::vector<Vec> basis;  // orthonormal ambient vectors spanning the subspace
};

struct IntegralTask {
  std::function<double(const Vec&)> integrand;
  // FullSpace integrates over R^d; an AngularRegion restricts directions (a
  // cone, or a subspace when its local dimension is below the ambient one).
  std::variant<FullSpace, AngularRegion, SubspaceRegion> region = FullSpace{};
  std::size_t dim = 0;
  double truncation_radius = 0.0;
  double tolerance = 1e-8;
  // Extra radial restrictions (domain membership, kernel support, balls).
  std::vector<RayClip> clips;
  // Integrand blows up at the origin (singular kernels); radial panels are
  // then graded geometrically towards r = 0.
  bool singular_origin = false;
};

namespace detail {

struct PolarState {
  const IntegralTask* task = nullptr;
  const AngularRegion* region = nullptr;
  bool converged = true;
  double error = 0.0;
  long evaluations = 0;
};

inline Integral radial(PolarState& st, const Vec& dir, double tol) {
  const auto& task = *st.task;
  IntervalSet rays(Interval{0.0, task.truncation_radius});
  for (const auto& clip : task.clips) {
    if (rays.is_empty()) break;
    rays.intersect(clip(dir));
  }
  if (rays.is_empty()) return {};
  const auto m = static_cast<int>(st.region->local_dim);
  auto g = [&](double r) {
    if (r <= 0.0) return 0.0;
    ++st.evaluations;
    return task.integrand(dir * r) * std::pow(r, m - 1);
  };
  Integral total;
  const auto& parts = rays.parts();
  const double part_tol = tol / static_cast<double>(parts.size());
  for (const auto& iv : parts) {
    if (task.singular_origin && iv.lo <= 0.0) {
      // Geometric grading [h/2^{k+1}, h/2^k] towards the singularity.
      double hi = iv.hi;
      int quiet = 0;
      for (int k = 0; k < 200 && hi > 1e-300; ++k) {
        const double lo = 0.5 * hi;
        auto piece = integrate_1d(g, lo, hi, part_tol / 64.0);
        total += piece;
        quiet = std::abs(piece.value) + piece.error < part_tol / 256.0 ? quiet + 1 : 0;
        if (quiet >= 4) break;
        hi = lo;
      }
    } else {
      total += integrate_1d(g, iv.lo, iv.hi, part_tol);
    }
  }
  return total;
}

// Integrates over the unit sphere of the local subspace spanned by the
// trailing `m` local axes (embedding columns [0, m)), with the direction
// already fixed in the remaining coordinates by `prefix_scale`/`prefix`.
// Recursion peels off one hyperspherical angle per level.
inline Integral sphere(PolarState& st, std::size_t m, double lo, double hi,
                       std::span<const double> breaks, const Vec& partial, double scale,
                       double tol);

inline Integral sphere_rest(PolarState& st, std::size_t m, const Vec& partial, double scale,
                            double tol) {
  return sphere(st, m, AngularRegion::full_lo(m), AngularRegion::full_hi(m), {}, partial, scale,
                tol);
}

inline Integral sphere(PolarState& st, std::size_t m, double lo, double hi,
                       std::span<const double> breaks, const Vec& partial, double scale,
                       double tol) {
  const auto& emb = st.region->embedding;
  if (m == 1) {
    Integral total;
    for (double phi : {0.0, std::numbers::pi}) {
      if (phi < lo - 1e-15 || phi > hi + 1e-15) continue;
      Vec dir = partial + (scale * std::cos(phi)) * emb[0];
      total += radial(st, dir, tol / 2.0);
    }
    return total;
  }
  if (m == 2) {
    auto f = [&](double phi) {
      Vec dir = partial + (scale * std::sin(phi)) * emb[0] + (scale * std::cos(phi)) * emb[1];
      auto r = radial(st, dir, tol / (4.0 * (hi - lo)));
      st.converged = st.converged && r.converged;
      st.error += r.error;
      return r.value;
    };
    return integrate_1d(f, lo, hi, tol / 2.0, breaks);
  }
  auto f = [&](double phi) {
    const double s = std::sin(phi);
    if (s == 0.0) return 0.0;
    Vec next = partial + (scale * std::cos(phi)) * emb[m - 1];
    auto r = sphere_rest(st, m - 1, next, scale * s, tol / (4.0 * (hi - lo)));
    st.converged = st.converged && r.converged;
    return r.value * std::pow(s, static_cast<int>(m) - 2);
  };
  return integrate_1d(f, lo, hi, tol / 2.0, breaks);
}

inline Integral polar(const IntegralTask& task, const AngularRegion& region) {
  if (region.empty) return {};
  PolarState st;
  st.task = &task;
  st.region = &region;
  const Vec origin(region.ambient_dim());
  auto out = sphere(st, region.local_dim, region.first_lo, region.first_hi, region.first_breaks,
                    origin, 1.0, task.tolerance);
  out.converged = out.converged && st.converged;
  return out;
}

}  // namespace detail

// Integrates task.integrand over the task's region in polar coordinates,
// truncated to the ball of radius task.truncation_radius. The result is
// flagged unconverged (never silently wrong) if any nested adaptive stage
// exhausts its refinement depth.
inline Integral integrate(const IntegralTask& task) {
  require(task.truncation_radius > 0.0, "truncation radius must be positive");
  require(task.tolerance > 0.0, "tolerance must be positive");
  require(task.dim >= 1 && task.dim <= kMaxDim, "integration dimension out of range");
  if (std::holds_alternative<FullSpace>(task.region)) {
    return detail::polar(task, AngularRegion::full(task.dim));
  }
  if (const auto* sub = std::get_if<SubspaceRegion>(&task.region)) {
    if (sub->basis.empty()) return {};
    return detail::polar(task, AngularRegion::subspace(sub->basis));
  }
  const auto& region = std::get<AngularRegion>(task.region);
  require(region.ambient_dim() == task.dim || region.empty, "angular region dimension mismatch");
  return detail::polar(task, region);
}

// Integral over the (d-1)-dimensional subspace spanned by `basis`, with
// Lebesgue measure on it. The integrand receives ambient points.
inline Integral integrate_subspace(IntegralTask task, std::vector<Vec> basis) {
  task.region = SubspaceRegion{std::move(basis)};
  if (std::get<SubspaceRegion>(task.region).basis.empty()) return {};
  return integrate(task);
}

// Axis-aligned box sampler for Monte Carlo integration.
struct Box {
  Vec lo;
  Vec hi;
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Plain Monte Carlo: volume * mean of the integrand at n uniform points of the
// box, with the usual standard error. Fully determined by `seed`.
template <class F>
McEstimate mc_integrate(const F& integrand, const Box& box, std::size_t n, std::uint64_t seed) {
  require(n >= 1000, "Monte Carlo integration needs n >= 1000");
  require(box.lo.size() == box.hi.size(), "box corners must share a dimension");
  Rng rng(seed);
  const std::size_t d = box.lo.size();
  double mean = 0.0;
  double m2 = 0.0;
  Vec x(d);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    const double y = integrand(x);
    const double delta = y - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (y - mean);
  }
  const double vol = box.volume();
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return McEstimate{vol * mean, vol * std::sqrt(var / static_cast<double>(n))};
}

}  // namespace glap::quadrature
