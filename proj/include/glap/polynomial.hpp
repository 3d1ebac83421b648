#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "glap/error.hpp"
#include "glap/vec.hpp"

namespace glap {

// Multivariate polynomial sum_k c_k x^{e_k} in at most kMaxDim variables.
class Polynomial {
 public:
  struct Term {
    double coef = 0.0;
    std::array<int, kMaxDim> exps{};
  };

  Polynomial() = default;
  explicit Polynomial(std::size_t dim, std::vector<Term> terms = {})
      : dim_(dim), terms_(std::move(terms)) {
    require(dim >= 1 && dim <= kMaxDim, "polynomial dimension out of range");
    for (const auto& t : terms_) {
      for (std::size_t i = 0; i < kMaxDim; ++i) {
        require(t.exps[i] >= 0, "polynomial exponents must be nonnegative");
        require(i < dim || t.exps[i] == 0, "exponent given for a missing variable");
      }
    }
  }

  static Polynomial constant(std::size_t dim, double c) { return Polynomial(dim, {{c, {}}}); }

  // a + b . x
  static Polynomial affine(double a, const Vec& b) {
    Polynomial p(b.size(), {{a, {}}});
    for (std::size_t i = 0; i < b.size(); ++i) {
      Term t{b[i], {}};
      t.exps[i] = 1;
      p.terms_.push_back(t);
    }
    return p;
  }

  // Univariate polynomial sum_k c[k] x_axis^k embedded in `dim` variables.
  static Polynomial univariate(std::size_t dim, std::size_t axis, const std::vector<double>& c) {
    Polynomial p(dim);
    for (std::size_t k = 0; k < c.size(); ++k) {
      Term t{c[k], {}};
      t.exps[axis] = static_cast<int>(k);
      p.terms_.push_back(t);
    }
    return p;
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  double operator()(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * monomial(x, t.exps);
    return s;
  }

  Vec gradient(const Vec& x) const {
    Vec g(dim_);
    for (const auto& t : terms_) {
      for (std::size_t i = 0; i < dim_; ++i) {
        if (t.exps[i] == 0) continue;
        auto e = t.exps;
        e[i] -= 1;
        g[i] += t.coef * t.exps[i] * monomial(x, e);
      }
    }
    return g;
  }

  Mat hessian(const Vec& x) const {
    Mat h(dim_);
    for (const auto& t : terms_) {
      for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i; j < dim_; ++j) {
          auto e = t.exps;
          double c = t.coef;
          c *= e[i];
          e[i] -= 1;
          if (c == 0.0) continue;
          c *= e[j];
          e[j] -= 1;
          if (c == 0.0) continue;
          h(i, j) += c * monomial(x, e);
        }
      }
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < i; ++j) h(i, j) = h(j, i);
    }
    return h;
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int s = 0;
      for (int e : t.exps) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  // Upper bound of |P| on the box [lo, hi] from termwise maxima.
  double abs_bound(const Vec& lo, const Vec& hi) const {
    double b = 0.0;
    for (const auto& t : terms_) {
      double m = std::abs(t.coef);
      for (std::size_t i = 0; i < dim_; ++i) {
        m *= std::pow(std::max(std::abs(lo[i]), std::abs(hi[i])), t.exps[i]);
      }
      b += m;
    }
    return b;
  }

  // Exact integral over the box [lo, hi].
  double integrate_box(const Vec& lo, const Vec& hi) const {
    double total = 0.0;
    for (const auto& t : terms_) {
      double m = t.coef;
      for (std::size_t i = 0; i < dim_; ++i) {
        const int e = t.exps[i] + 1;
        m *= (std::pow(hi[i], e) - std::pow(lo[i], e)) / e;
      }
      total += m;
    }
    return total;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_dim(a.dim_, b.dim_);
    Polynomial p(a.dim_);
    for (const auto& x : a.terms_) {
      for (const auto& y : b.terms_) {
        Term t{x.coef * y.coef, {}};
        for (std::size_t i = 0; i < kMaxDim; ++i) t.exps[i] = x.exps[i] + y.exps[i];
        p.terms_.push_back(t);
      }
    }
    return p;
  }

  friend Polynomial operator*(double s, Polynomial p) {
    for (auto& t : p.terms_) t.coef *= s;
    return p;
  }

 private:
  static double monomial(const Vec& x, const std::array<int, kMaxDim>& e) {
    double m = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    }
    return m;
  }

  std::size_t dim_ = 1;
  std::vector<Term> terms_;
};

}  // namespace glap
