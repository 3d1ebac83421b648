#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "glap/error.hpp"

namespace glap::stats {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Phi(x) = erfc(-x / sqrt 2) / 2; erfc keeps full relative accuracy in
// the lower tail.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Inverse of Phi: Acklam's rational approximation polished by two Halley
// steps against normal_cdf.
inline double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "quantile level must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  const double lo = 0.02425;
  double x;
  if (p < lo) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p > 1.0 - lo) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace detail {

inline std::vector<double> sorted_finite(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  for (double x : v) {
    if (std::isnan(x)) throw PreconditionError("NaN in sample");
  }
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace detail

// sup_x |F_m(x) - Phi(x / s)| over the sorted sample, both one-sided gaps.
inline double ks_statistic(std::span<const double> samples, double s) {
  require(!samples.empty(), "KS statistic needs at least one sample");
  require(s > 0.0 && std::isfinite(s), "KS scale must be positive");
  const auto v = detail::sorted_finite(samples);
  const double m = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = normal_cdf(v[i] / s);
    d = std::max({d, static_cast<double>(i + 1) / m - F, F - static_cast<double>(i) / m});
  }
  return d;
}

// Reference two-sided KS critical values, c(alpha) / sqrt(m).
inline double ks_threshold(std::size_t m, double alpha = 0.05) {
  double c = 1.358;
  if (alpha == 0.10) c = 1.224;
  else if (alpha == 0.01) c = 1.628;
  else require(alpha == 0.05, "tabulated levels are 0.10, 0.05 and 0.01");
  return c / std::sqrt(static_cast<double>(m));
}

inline SampleSummary summarize(std::span<const double> xs) {
  require(!xs.empty(), "summary needs at least one sample");
  SampleSummary s;
  s.count = xs.size();
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  s.min = xs[0];
  s.max = xs[0];
  for (double x : xs) {
    const double e = x - mean;
    m2 += e * e;
    m3 += e * e * e;
    m4 += e * e * e * e;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = std::clamp(mean, s.min, s.max);
  s.variance = xs.size() > 1 ? m2 / (n - 1.0) : 0.0;
  if (m2 > 0.0) {
    s.skewness = (m3 / n) / std::pow(m2 / n, 1.5);
    s.excess_kurtosis = (m4 / n) / ((m2 / n) * (m2 / n)) - 3.0;
  }
  return s;
}

// Linear-interpolated quantile (type 7).
inline double quantile(std::span<const double> xs, double q) {
  require(!xs.empty(), "quantile needs at least one sample");
  require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
  const auto v = detail::sorted_finite(xs);
  const double h = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

inline double median(std::span<const double> xs) { return quantile(xs, 0.5); }

inline double correlation(std::span<const std::pair<double, double>> pairs) {
  require(pairs.size() >= 2, "correlation needs at least two pairs");
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw PreconditionError("correlation of a constant sample");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "slope fit needs matching samples");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "log-log fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx;
    sxx += a * a;
    sxy += a * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace glap::stats
