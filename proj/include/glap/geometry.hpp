#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glap/error.hpp"
#include "glap/quadrature.hpp"
#include "glap/random.hpp"
#include "glap/vec.hpp"

namespace glap::geometry {

using quadrature::Interval;
using quadrature::IntervalSet;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Cones
// ---------------------------------------------------------------------------

enum class ConeKind { full_space, half_space, wedge, degenerate };

inline const char* to_string(ConeKind k) {
  switch (k) {
    case ConeKind::full_space: return "full_space";
    case ConeKind::half_space: return "half_space";
    case ConeKind::wedge: return "wedge";
    case ConeKind::degenerate: return "degenerate";
  }
  return "?";
}

// Cone with vertex at the origin, stored analytically. Cones that agree up to
// a null set are interchangeable inside integrals, so comparisons look at the
// kind and parameters only.
class Cone {
 public:
  static Cone full_space(std::size_t dim) { return Cone(dim, ConeKind::full_space, {}, 0.0); }

  // {t : t . normal >= 0}
  static Cone half_space(const Vec& normal) {
    return Cone(normal.size(), ConeKind::half_space, normal / norm(normal), std::numbers::pi);
  }

  // Planar sector of the given opening angle, symmetric about `bisector`.
  static Cone wedge(const Vec& bisector, double opening) {
    require(bisector.size() == 2, "wedge cones are planar");
    require(opening > 0.0 && opening <= std::numbers::pi, "wedge opening must lie in (0, pi]");
    return Cone(2, ConeKind::wedge, bisector / norm(bisector), opening);
  }

  // Lebesgue-null cone (a ray or lower-dimensional set); `axis` records the
  // surviving direction for reporting.
  static Cone degenerate(const Vec& axis) {
    return Cone(axis.size(), ConeKind::degenerate, axis / norm(axis), 0.0);
  }

  std::size_t dim() const { return dim_; }
  ConeKind kind() const { return kind_; }
  const Vec& axis() const { return axis_; }
  double opening() const { return opening_; }

  bool contains(const Vec& t) const {
    require_dim(dim_, t.size());
    switch (kind_) {
      case ConeKind::full_space: return true;
      case ConeKind::half_space: return dot(t, axis_) >= 0.0;
      case ConeKind::wedge: {
        const double n = norm(t);
        if (n == 0.0) return true;
        return dot(t, axis_) >= n * std::cos(0.5 * opening_);
      }
      case ConeKind::degenerate: {
        const double n = norm(t);
        if (n == 0.0) return true;
        return norm(t / n - axis_) == 0.0;
      }
    }
    return false;
  }

  // Directions of the cone in the polar-integration parametrisation.
  quadrature::AngularRegion angular_region() const {
    using quadrature::AngularRegion;
    switch (kind_) {
      case ConeKind::full_space: return AngularRegion::full(dim_);
      case ConeKind::half_space: {
        auto r = AngularRegion::half(frame_with_last_axis(axis_));
        return r;
      }
      case ConeKind::wedge: {
        auto r = AngularRegion::full(frame_with_last_axis(axis_));
        r.first_lo = -0.5 * opening_;
        r.first_hi = 0.5 * opening_;
        return r;
      }
      case ConeKind::degenerate: {
        AngularRegion r = AngularRegion::full(dim_);
        r.empty = true;
        return r;
      }
    }
    return {};
  }

  friend bool operator==(const Cone& a, const Cone& b) {
    if (a.dim_ != b.dim_ || a.kind_ != b.kind_) return false;
    if (a.kind_ == ConeKind::full_space) return true;
    return norm(a.axis_ - b.axis_) < 1e-12 && std::abs(a.opening_ - b.opening_) < 1e-12;
  }

 private:
  Cone(std::size_t dim, ConeKind kind, Vec axis, double opening)
      : dim_(dim), kind_(kind), axis_(axis.size() == dim ? axis : Vec(dim)), opening_(opening) {}

  std::size_t dim_;
  ConeKind kind_;
  Vec axis_;
  double opening_;
};

// ---------------------------------------------------------------------------
// Boundary data
// ---------------------------------------------------------------------------

// Local description of a C^2 boundary point: inward unit normal, tangent
// frame, and the matrix of second derivatives of the boundary written as a
// graph over the tangent plane, gamma(x') = 1/2 x'^T H x' + o(|x'|^2).
struct BoundaryData {
  Vec point;
  Vec normal;
  std::vector<Vec> tangent;
  Mat hessian;  // (d-1) x (d-1), true second derivatives

  std::size_t dim() const { return point.size(); }

  // Ambient vector sum_i s_i tangent_i.
  Vec embed(const Vec& s) const {
    Vec out(dim());
    for (std::size_t i = 0; i < tangent.size(); ++i) out += s[i] * tangent[i];
    return out;
  }
};

// Projection onto the tangent plane.
inline Vec tangential_component(const Vec& v, const BoundaryData& bd) {
  require_dim(bd.dim(), v.size());
  Vec out(v.size());
  for (const auto& t : bd.tangent) out += dot(v, t) * t;
  return out;
}

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

// One smooth inequality F(x) >= 0 describing part of a domain, evaluated at a
// point.
struct LevelSet {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

namespace detail {

// Parameters s >= 0 with a2 s^2 + a1 s + a0 >= 0.
inline IntervalSet quadratic_nonneg(double a2, double a1, double a0) {
  IntervalSet out;
  constexpr double tiny = 1e-300;
  if (std::abs(a2) < tiny) {
    if (std::abs(a1) < tiny) {
      if (a0 >= 0.0) out.unite({0.0, kInf});
      return out;
    }
    const double root = -a0 / a1;
    if (a1 > 0.0) {
      out.unite({std::max(0.0, root), kInf});
    } else if (root > 0.0) {
      out.unite({0.0, root});
    }
    return out;
  }
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) {
    if (a2 > 0.0) out.unite({0.0, kInf});
    return out;
  }
  // Numerically stable roots.
  const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
  double r1 = q / a2;
  double r2 = q != 0.0 ? a0 / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (a2 < 0.0) {
    if (r2 > 0.0) out.unite({std::max(0.0, r1), r2});
  } else {
    if (r1 > 0.0) out.unite({0.0, r1});
    out.unite({std::max(0.0, r2), kInf});
  }
  return out;
}

// Builds the ray intersection by testing membership between candidate
// crossing parameters.
template <class Member>
IntervalSet from_crossings(std::vector<double> cuts, const Member& inside) {
  cuts.push_back(0.0);
  std::erase_if(cuts, [](double s) { return !(s >= 0.0) || !std::isfinite(s); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  IntervalSet out;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < cuts.size() ? cuts[i + 1] : kInf;
    const double mid = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo + 1.0;
    if (inside(mid)) out.unite({lo, hi});
  }
  return out;
}

inline void real_roots(double a2, double a1, double a0, std::vector<double>& out) {
  if (std::abs(a2) < 1e-300) {
    if (std::abs(a1) > 1e-300) out.push_back(-a0 / a1);
    return;
  }
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  out.push_back((-a1 - sq) / (2.0 * a2));
  out.push_back((-a1 + sq) / (2.0 * a2));
}

}  // namespace detail

class DomainImpl {
 public:
  virtual ~DomainImpl() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string kind() const = 0;
  virtual bool contains(const Vec& x) const = 0;
  // Parameters s >= 0 with p + s * dir in the domain (dir a unit vector).
  virtual IntervalSet ray(const Vec& p, const Vec& dir) const = 0;
  // Smooth pieces of the boundary as inequalities F >= 0.
  virtual std::vector<LevelSet> level_sets(const Vec& x) const = 0;
  virtual std::optional<quadrature::Box> bounding_box() const { return std::nullopt; }
  virtual std::optional<double> volume() const { return std::nullopt; }
  // Analytic cone at a non-smooth boundary point, if this is one.
  virtual std::optional<Cone> special_cone(const Vec&) const { return std::nullopt; }
};

// Immutable, shareable domain handle.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::shared_ptr<const DomainImpl> impl) : impl_(std::move(impl)) {}

  std::size_t dim() const { return impl_->dim(); }
  std::string kind() const { return impl_->kind(); }
  bool contains(const Vec& x) const {
    require_dim(dim(), x.size());
    return impl_->contains(x);
  }
  IntervalSet ray(const Vec& p, const Vec& dir) const { return impl_->ray(p, dir); }
  std::vector<LevelSet> level_sets(const Vec& x) const { return impl_->level_sets(x); }
  std::optional<quadrature::Box> bounding_box() const { return impl_->bounding_box(); }
  std::optional<double> volume() const { return impl_->volume(); }
  std::optional<Cone> special_cone(const Vec& p) const { return impl_->special_cone(p); }
  bool bounded() const { return bounding_box().has_value(); }

  // Ray clip for the rescaled set (S - p) / eps in t-coordinates.
  quadrature::RayClip rescaled_clip(const Vec& p, double eps) const {
    auto impl = impl_;
    return [impl, p, eps](const Vec& dir) {
      auto set = impl->ray(p, dir);
      set.scale(1.0 / eps);
      return set;
    };
  }

 private:
  std::shared_ptr<const DomainImpl> impl_;
};

namespace kinds {

class FullSpace final : public DomainImpl {
 public:
  explicit FullSpace(std::size_t d) : d_(d) {}
  std::size_t dim() const override { return d_; }
  std::string kind() const override { return "full_space"; }
  bool contains(const Vec&) const override { return true; }
  IntervalSet ray(const Vec&, const Vec&) const override { return IntervalSet({0.0, kInf}); }
  std::vector<LevelSet> level_sets(const Vec&) const override { return {}; }

 private:
  std::size_t d_;
};

// Axis-aligned box; in one dimension this is an interval.
class BoxDomain final : public DomainImpl {
 public:
  BoxDomain(Vec lo, Vec hi) : lo_(lo), hi_(hi) {
    require(lo.size() == hi.size() && lo.size() >= 1, "box corners must share a dimension");
    for (std::size_t i = 0; i < lo.size(); ++i) require(lo[i] < hi[i], "box must have lo < hi");
  }
  std::size_t dim() const override { return lo_.size(); }
  std::string kind() const override { return dim() == 1 ? "interval" : "box"; }
  bool contains(const Vec& x) const override {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    }
    return true;
  }
  IntervalSet ray(const Vec& p, const Vec& dir) const override {
    double smin = 0.0;
    double smax = kInf;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (dir[i] == 0.0) {
        if (p[i] < lo_[i] || p[i] > hi_[i]) return {};
        continue;
      }
      double a = (lo_[i] - p[i]) / dir[i];
      double b = (hi_[i] - p[i]) / dir[i];
      if (a > b) std::swap(a, b);
      smin = std::max(smin, a);
      smax = std::min(smax, b);
    }
    return IntervalSet({smin, smax});
  }
  std::vector<LevelSet> level_sets(const Vec& x) const override {
    std::vector<LevelSet> out;
    for (std::size_t i = 0; i < dim(); ++i) {
      out.push_back({x[i] - lo_[i], Vec::unit(dim(), i), Mat(dim())});
      out.push_back({hi_[i] - x[i], -Vec::unit(dim(), i), Mat(dim())});
    }
    return out;
  }
  std::optional<quadrature::Box> bounding_box() const override { return quadrature::Box{lo_, hi_}; }
  std::optional<double> volume() const override { return quadrature::Box{lo_, hi_}.volume(); }

 private:
  Vec lo_, hi_;
};

class Ball final : public DomainImpl {
 public:
  Ball(Vec center, double radius) : c_(center), r_(radius) {
    require(radius > 0.0, "ball radius must be positive");
  }
  std::size_t dim() const override { return c_.size(); }
  std::string kind() const override { return "ball"; }
  bool contains(const Vec& x) const override { return norm_sq(x - c_) <= r_ * r_; }
  IntervalSet ray(const Vec& p, const Vec& dir) const override {
    const Vec q = p - c_;
    return detail::quadratic_nonneg(-dot(dir, dir), -2.0 * dot(dir, q), r_ * r_ - norm_sq(q));
  }
  std::vector<LevelSet> level_sets(const Vec& x) const override {
    return {{r_ * r_ - norm_sq(x - c_), -2.0 * (x - c_), Mat::identity(dim()) * -2.0}};
  }
  std::optional<quadrature::Box> bounding_box() const override {
    Vec lo = c_, hi = c_;
    for (std::size_t i = 0; i < dim(); ++i) {
      lo[i] -= r_;
      hi[i] += r_;
    }
    return quadrature::Box{lo, hi};
  }
  std::optional<double> volume() const override {
    return quadrature::ball_volume(dim()) * std::pow(r_, static_cast<double>(dim()));
  }

 private:
  Vec c_;
  double r_;
};

// {x : (x - origin) . normal >= 0}
class HalfSpace final : public DomainImpl {
 public:
  HalfSpace(Vec origin, Vec normal) : o_(origin), n_(normal / norm(normal)) {}
  std::size_t dim() const override { return o_.size(); }
  std::string kind() const override { return "half_space"; }
  bool contains(const Vec& x) const override { return dot(x - o_, n_) >= 0.0; }
  IntervalSet ray(const Vec& p, const Vec& dir) const override {
    return detail::quadratic_nonneg(0.0, dot(dir, n_), dot(p - o_, n_));
  }
  std::vector<LevelSet> level_sets(const Vec& x) const override {
    return {{dot(x - o_, n_), n_, Mat(dim())}};
  }

 private:
  Vec o_, n_;
};

// Planar sector with apex, bisector direction and opening angle in (0, pi].
class Wedge final : public DomainImpl {
 public:
  Wedge(Vec apex, Vec bisector, double opening)
      : apex_(apex), bis_(bisector / norm(bisector)), opening_(opening) {
    require(apex.size() == 2, "wedge domains are planar");
    require(opening > 0.0 && opening <= std::numbers::pi, "wedge opening must lie in (0, pi]");
    const double beta = std::atan2(bis_[1], bis_[0]);
    const double a1 = beta + 0.5 * opening - 0.5 * std::numbers::pi;
    const double a2 = beta - 0.5 * opening + 0.5 * std::numbers::pi;
    n1_ = Vec{std::cos(a1), std::sin(a1)};
    n2_ = Vec{std::cos(a2), std::sin(a2)};
  }
  std::size_t dim() const override { return 2; }
  std::string kind() const override { return "wedge"; }
  bool contains(const Vec& x) const override {
    const Vec q = x - apex_;
    return dot(q, n1_) >= 0.0 && dot(q, n2_) >= 0.0;
  }
  IntervalSet ray(const Vec& p, const Vec& dir) const override {
    const Vec q = p - apex_;
    auto set = detail::quadratic_nonneg(0.0, dot(dir, n1_), dot(q, n1_));
    set.intersect(detail::quadratic_nonneg(0.0, dot(dir, n2_), dot(q, n2_)));
    return set;
  }
  std::vector<LevelSet> level_sets(const Vec& x) const override {
    const Vec q = x - apex_;
    return {{dot(q, n1_), n1_, Mat(2)}, {dot(q, n2_), n2_, Mat(2)}};
  }
  std::optional<Cone> special_cone(const Vec& p) const override {
    if (norm(p - apex_) <= 1e-12) return Cone::wedge(bis_, opening_);
    return std::nullopt;
  }

 private:
  Vec apex_, bis_;
  double opening_;
  Vec n1_, n2_;
};

// Epigraph {x : x_d >= sum_i a_i x_i^2} (i < d) of a quadratic graph through
// the origin, tangent to {x_d = 0} there.
class ParabolicGraph final : public DomainImpl {
 public:
  explicit ParabolicGraph(std::vector<double> coefficients) : a_(std::move(coefficients)) {
    require(!a_.empty() && a_.size() + 1 <= kMaxDim, "parabolic graph needs 1..3 coefficients");
  }
  std::size_t dim() const override { return a_.size() + 1; }
  std::string kind() const override { return "parabolic_graph"; }
  double gamma(const Vec& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * x[i] * x[i];
    return s;
  }
  bool contains(const Vec& x) const override { return x[dim() - 1] >= gamma(x); }
  IntervalSet ray(const Vec& p, const Vec& dir) const override {
    const std::size_t d = dim();
    double A = 0.0, B = dir[d - 1], C = p[d - 1] - gamma(p);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      A += a_[i] * dir[i] * dir[i];
      B -= 2.0 * a_[i] * p[i] * dir[i];
    }
    return detail::quadratic_nonneg(-A, B, C);
  }
  std::vector<LevelSet> level_sets(const Vec& x) const override {
    const std::size_t d = dim();
    LevelSet ls{x[d - 1] - gamma(x), Vec::unit(d, d - 1), Mat(d)};
    for (std::size_t i = 0; i < a_.size(); ++i) {
      ls.gradient[i] = -2.0 * a_[i] * x[i];
      ls.hessian(i, i) = -2.0 * a_[i];
    }
    return {ls};
  }

 private:
  std::vector<double> a_;
};

// Planar cusp {x : x_2 >= sqrt|x_1|}. Its tangent cone at the apex is the
// null ray {x_1 = 0, x_2 >= 0}.
class Cusp final : public DomainImpl {
 public:
  std::size_t dim() const override { return 2; }
  std::string kind() const override { return "cusp"; }
  bool contains(const Vec& x) const override { return x[1] >= std::sqrt(std::abs(x[0])); }
  IntervalSet ray(const Vec& p, const Vec& dir) const override {
    std::vector<double> cuts;
    if (dir[0] != 0.0) cuts.push_back(-p[0] / dir[0]);
    if (dir[1] != 0.0) cuts.push_back(-p[1] / dir[1]);
    // (p2 + s d2)^2 = +/-(p1 + s d1)
    for (double sign : {1.0, -1.0}) {
      detail::real_roots(dir[1] * dir[1], 2.0 * p[1] * dir[1] - sign * dir[0],
                         p[1] * p[1] - sign * p[0], cuts);
    }
    return detail::from_crossings(std::move(cuts), [&](double s) { return contains(p + s * dir); });
  }
  std::vector<LevelSet> level_sets(const Vec& x) const override {
    const double ax = std::abs(x[0]);
    LevelSet ls{x[1] - std::sqrt(ax), Vec{0.0, 1.0}, Mat(2)};
    if (ax > 0.0) {
      const double sg = x[0] > 0.0 ? 1.0 : -1.0;
      ls.gradient[0] = -0.5 * sg / std::sqrt(ax);
      ls.hessian(0, 0) = 0.25 * std::pow(ax, -1.5);
    } else {
      ls.gradient[0] = kInf;
    }
    return {ls};
  }
  std::optional<Cone> special_cone(const Vec& p) const override {
    if (norm(p) <= 1e-12) return Cone::degenerate(Vec{0.0, 1.0});
    return std::nullopt;
  }
};

}  // namespace kinds

inline Domain full_space(std::size_t d) { return Domain(std::make_shared<kinds::FullSpace>(d)); }
inline Domain interval(double lo, double hi) {
  return Domain(std::make_shared<kinds::BoxDomain>(Vec{lo}, Vec{hi}));
}
inline Domain box(const Vec& lo, const Vec& hi) {
  return Domain(std::make_shared<kinds::BoxDomain>(lo, hi));
}
inline Domain ball(const Vec& center, double radius) {
  return Domain(std::make_shared<kinds::Ball>(center, radius));
}
inline Domain half_space(const Vec& origin, const Vec& normal) {
  return Domain(std::make_shared<kinds::HalfSpace>(origin, normal));
}
inline Domain wedge(const Vec& apex, const Vec& bisector, double opening) {
  return Domain(std::make_shared<kinds::Wedge>(apex, bisector, opening));
}
inline Domain parabolic_graph(std::vector<double> coefficients) {
  return Domain(std::make_shared<kinds::ParabolicGraph>(std::move(coefficients)));
}
inline Domain cusp() { return Domain(std::make_shared<kinds::Cusp>()); }

// ---------------------------------------------------------------------------
// Boundary analysis
// ---------------------------------------------------------------------------

// Tolerance for deciding that a point sits on a boundary piece.
inline constexpr double kBoundaryTol = 1e-12;

namespace detail {

inline std::vector<LevelSet> active_pieces(const Domain& S, const Vec& p) {
  std::vector<LevelSet> active;
  for (auto& ls : S.level_sets(p)) {
    const double scale = std::max(1.0, norm(p));
    if (ls.value < -kBoundaryTol * scale) {
      throw PreconditionError("point lies outside the domain");
    }
    if (std::abs(ls.value) <= kBoundaryTol * scale) active.push_back(std::move(ls));
  }
  return active;
}

inline bool finite_vec(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace detail

// Analytic tangent cone A(p) = lim (S - p) / eps.
inline Cone cone_at(const Domain& S, const Vec& p) {
  require_dim(S.dim(), p.size());
  if (auto special = S.special_cone(p)) {
    if (!S.contains(p)) throw PreconditionError("point lies outside the domain");
    return *special;
  }
  const auto active = detail::active_pieces(S, p);
  if (active.empty()) return Cone::full_space(S.dim());
  if (active.size() == 1 && detail::finite_vec(active[0].gradient) &&
      norm(active[0].gradient) > 0.0) {
    return Cone::half_space(active[0].gradient);
  }
  if (active.size() == 2 && S.dim() == 2) {
    const Vec u1 = active[0].gradient / norm(active[0].gradient);
    const Vec u2 = active[1].gradient / norm(active[1].gradient);
    const double opening = std::numbers::pi - std::acos(std::clamp(dot(u1, u2), -1.0, 1.0));
    if (opening > 0.0) return Cone::wedge(u1 + u2, opening);
  }
  throw Unsupported("no analytic cone for a " + S.kind() + " domain at this point");
}

// Inward normal, tangent frame and boundary Hessian at a C^2 boundary point.
// For S = {F >= 0} near p, H = -T^T (Hess F) T / |grad F| with T the tangent
// frame, which is the second-derivative matrix of the boundary graph.
inline BoundaryData boundary_data_at(const Domain& S, const Vec& p) {
  require_dim(S.dim(), p.size());
  if (S.special_cone(p)) throw Unsupported("boundary is not C^2 at this point");
  const auto active = detail::active_pieces(S, p);
  if (active.empty()) throw PreconditionError("point is not on the boundary");
  if (active.size() > 1) throw Unsupported("boundary is not C^2 at this point");
  const auto& ls = active.front();
  if (!detail::finite_vec(ls.gradient) || norm(ls.gradient) == 0.0) {
    throw Unsupported("boundary is not C^2 at this point");
  }
  const std::size_t d = S.dim();
  const double gnorm = norm(ls.gradient);
  BoundaryData bd;
  bd.point = p;
  bd.normal = ls.gradient / gnorm;
  const Mat frame = frame_with_last_axis(bd.normal);
  for (std::size_t j = 0; j + 1 < d; ++j) bd.tangent.push_back(frame.column(j));
  bd.hessian = Mat(d - 1);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    for (std::size_t j = 0; j + 1 < d; ++j) {
      bd.hessian(i, j) = -dot(bd.tangent[i], ls.hessian * bd.tangent[j]) / gnorm;
    }
  }
  return bd;
}

// Monte Carlo estimate, for each eps, of the measure of
// { t in B(0, rho) : 1_{(S-p)/eps}(t) != 1_cone(t) }, reported after
// rescaling B(0, rho) to the unit ball. The same points are reused across
// eps so that the sequence is directly comparable.
inline std::vector<quadrature::McEstimate> indicator_limit_check(
    const Domain& S, const Vec& p, const Cone& cone, std::span<const double> eps_list, double rho,
    std::size_t n_mc, std::uint64_t seed) {
  require_dim(S.dim(), p.size());
  require_dim(S.dim(), cone.dim());
  require(rho > 0.0, "rho must be positive");
  require(n_mc >= 10000, "indicator_limit_check needs n_mc >= 1e4");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    require(eps_list[i] > 0.0, "eps values must be positive");
    require(i == 0 || eps_list[i] < eps_list[i - 1], "eps values must be decreasing");
  }
  const std::size_t d = S.dim();
  Rng rng(seed);
  std::vector<Vec> pts;
  pts.reserve(n_mc);
  for (std::size_t k = 0; k < n_mc; ++k) pts.push_back(rng.unit_ball(d));
  const double vol = quadrature::ball_volume(d);
  std::vector<quadrature::McEstimate> out;
  for (double eps : eps_list) {
    std::size_t hits = 0;
    for (const auto& u : pts) {
      const bool in_s = S.contains(p + (eps * rho) * u);
      if (in_s != cone.contains(u)) ++hits;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(n_mc);
    out.push_back({vol * frac, vol * std::sqrt(frac * (1.0 - frac) / static_cast<double>(n_mc))});
  }
  return out;
}

}  // namespace glap::geometry
