#ifndef SUBDIFF_MATH_UTIL_HPP
#define SUBDIFF_MATH_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace subdiff {

/// Pairwise (cascade) summation; error grows like log(n) instead of n.
inline double pairwise_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

inline double log_sum_exp(std::span<const double> logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

/// log of the multivariate gamma function Gamma_q(a).
inline double log_multigamma(int q, double a) {
  double s = 0.25 * q * (q - 1) * std::log(M_PI);
  for (int j = 1; j <= q; ++j) s += std::lgamma(a + 0.5 * (1 - j));
  return s;
}

inline double sq(double x) { return x * x; }

/// Full-precision decimal rendering (17 significant digits) so that written
/// doubles round-trip and regression files are bit-stable.
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Slope of the least-squares line through (x_i, y_i).
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Kolmogorov-Smirnov distance of a sample to the standard normal CDF.
inline double ks_distance_std_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const std::size_t n = z.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 0.5 * std::erfc(-z[i] * M_SQRT1_2);
    d = std::max(d, std::max((i + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace subdiff

#endif  // SUBDIFF_MATH_UTIL_HPP
