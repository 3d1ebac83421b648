#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace glap {

// Largest ambient dimension supported anywhere in the library.
inline constexpr std::size_t kMaxDim = 4;

// Small fixed-capacity vector in R^d, d <= kMaxDim. Value type; no heap use,
// so it is cheap to pass around inside Monte Carlo inner loops.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t dim) : dim_(check_dim(dim)) {}
  Vec(std::initializer_list<double> xs) : dim_(check_dim(xs.size())) {
    std::copy(xs.begin(), xs.end(), data_.begin());
  }
  explicit Vec(std::span<const double> xs) : dim_(check_dim(xs.size())) {
    std::copy(xs.begin(), xs.end(), data_.begin());
  }

  static Vec unit(std::size_t dim, std::size_t axis) {
    Vec v(dim);
    v[axis] = 1.0;
    return v;
  }

  std::size_t size() const { return dim_; }
  double& operator[](std::size_t i) {
    assert(i < dim_);
    return data_[i];
  }
  double operator[](std::size_t i) const {
    assert(i < dim_);
    return data_[i];
  }
  const double* begin() const { return data_.data(); }
  const double* end() const { return data_.data() + dim_; }
  std::span<const double> span() const { return {data_.data(), dim_}; }
  std::vector<double> to_vector() const { return {begin(), end()}; }

  Vec& operator+=(const Vec& o) {
    assert(o.dim_ == dim_);
    for (std::size_t i = 0; i < dim_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    assert(o.dim_ == dim_);
    for (std::size_t i = 0; i < dim_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] *= s;
    return *this;
  }
  Vec& operator/=(double s) { return *this *= 1.0 / s; }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator/(Vec a, double s) { return a /= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }
  friend bool operator==(const Vec& a, const Vec& b) {
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  static std::size_t check_dim(std::size_t d) {
    if (d > kMaxDim) {
      throw std::invalid_argument("dimension " + std::to_string(d) +
                                  " exceeds supported maximum " + std::to_string(kMaxDim));
    }
    return d;
  }

  std::array<double, kMaxDim> data_{};
  std::size_t dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

// Row-major square matrix with the same capacity as Vec.
class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t dim) : dim_(dim) {
    if (dim > kMaxDim) throw std::invalid_argument("matrix dimension exceeds maximum");
  }
  static Mat identity(std::size_t dim) {
    Mat m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return dim_; }
  double& operator()(std::size_t i, std::size_t j) {
    assert(i < dim_ && j < dim_);
    return data_[i * kMaxDim + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < dim_ && j < dim_);
    return data_[i * kMaxDim + j];
  }

  Vec column(std::size_t j) const {
    Vec v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_column(std::size_t j, const Vec& v) {
    for (std::size_t i = 0; i < dim_; ++i) (*this)(i, j) = v[i];
  }

  Vec operator*(const Vec& v) const {
    assert(v.size() == dim_);
    Vec out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  Mat& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  friend Mat operator*(Mat m, double s) { return m *= s; }
  friend Mat operator*(double s, Mat m) { return m *= s; }
  friend Mat operator+(Mat a, const Mat& b) {
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j) a(i, j) += b(i, j);
    return a;
  }

  // x^T M x
  double quadratic(const Vec& x) const { return dot(x, (*this) * x); }

 private:
  std::array<double, kMaxDim * kMaxDim> data_{};
  std::size_t dim_ = 0;
};

// Completes a unit vector into an orthonormal frame. The returned matrix has
// `axis` as its last column; the first d-1 columns span the orthogonal
// complement.
inline Mat frame_with_last_axis(const Vec& axis) {
  const std::size_t d = axis.size();
  Mat frame(d);
  if (d == 0) return frame;
  const Vec u = axis / norm(axis);
  std::vector<Vec> basis;
  basis.reserve(d);
  // Gram-Schmidt over the standard basis, least-aligned axes first; the axis
  // most parallel to u is the one dropped.
  std::array<std::size_t, kMaxDim> order{};
  for (std::size_t k = 0; k < d; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(d),
                   [&](std::size_t a, std::size_t b) { return std::abs(u[a]) < std::abs(u[b]); });
  // Keep the original axis ordering for the tangent columns so that, e.g.,
  // u = e_d yields the identity frame.
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(d - 1));
  for (std::size_t idx = 0; idx + 1 < d; ++idx) {
    Vec e = Vec::unit(d, order[idx]);
    e -= dot(e, u) * u;
    for (const auto& b : basis) e -= dot(e, b) * b;
    basis.push_back(e / norm(e));
  }
  for (std::size_t j = 0; j < basis.size(); ++j) frame.set_column(j, basis[j]);
  frame.set_column(d - 1, u);
  return frame;
}

}  // namespace glap
