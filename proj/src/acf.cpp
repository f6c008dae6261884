#include "subdiff/acf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"

namespace subdiff {

namespace {

void check_fbm(const FbmParams& p) {
  if (!(p.hurst > 0.0 && p.hurst < 1.0))
    throw usage_error("Hurst exponent must lie in (0,1), got " + format_full(p.hurst));
}

void check_gle(const GleParams& p) {
  if (!(p.tau > 0.0)) throw usage_error("tau must be > 0");
  if (p.n_modes < 1) throw usage_error("K must be >= 1");
  if (!(p.gamma > 0.5)) throw usage_error("gamma must be > 1/2");
}

/// sum_k log|y - alpha_k|, pairwise-accumulated.
double log_abs_q(double y, const std::vector<double>& alpha) {
  std::vector<double> terms(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k)
    terms[k] = std::log(std::abs(y - alpha[k]));
  return pairwise_sum(terms);
}

/// s(y) = sum_k 1/(y - alpha_k), pairwise-accumulated.
double s_of_y(double y, const std::vector<double>& alpha) {
  std::vector<double> terms(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) terms[k] = 1.0 / (y - alpha[k]);
  return pairwise_sum(terms);
}

double golden_max(const std::vector<double>& alpha, double a, double b,
                  double rel_tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  const double tol = rel_tol * (b - a);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_abs_q(c, alpha);
  double fd = log_abs_q(d, alpha);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_abs_q(c, alpha);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_abs_q(d, alpha);
    }
  }
  return 0.5 * (a + b);
}

// Locates the stationary point of q on (a, b): golden-section pass on
// log|q|, then bisection on s(y) = (log|q|)'(y), whose sign change is
// sharp where the extremum itself is flat to rounding.  Final width
// 1e-12 of the original bracket.
double locate_root(const std::vector<double>& alpha, double a, double b) {
  const double width = b - a;
  const double r = golden_max(alpha, a, b, 1e-6);
  double lo = a, hi = b;
  const double pad = 1e-5 * width;
  const double cand_lo = std::max(a, r - pad);
  const double cand_hi = std::min(b, r + pad);
  if (s_of_y(cand_lo, alpha) > 0.0 && s_of_y(cand_hi, alpha) < 0.0) {
    lo = cand_lo;
    hi = cand_hi;
  }
  while (hi - lo > 1e-12 * width) {
    const double mid = 0.5 * (lo + hi);
    const double s = s_of_y(mid, alpha);
    if (s == 0.0) return mid;
    (s > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

AcfVector fbm_acf(const FbmParams& p, double dt, int nlags) {
  check_fbm(p);
  if (nlags < 1) throw usage_error("nlags must be >= 1");
  const double h2 = 2.0 * p.hurst;
  const double scale = 0.5 * std::pow(dt, h2);
  AcfVector acf;
  acf.dt = dt;
  acf.gamma.resize(nlags);
  for (int k = 0; k < nlags; ++k)
    acf.gamma[k] = scale * (std::pow(k + 1.0, h2) + std::pow(std::abs(k - 1.0), h2) -
                            2.0 * std::pow(static_cast<double>(k), h2));
  return acf;
}

double fbm_msd(const FbmParams& p, double t) {
  check_fbm(p);
  return std::pow(t, 2.0 * p.hurst);
}

GleDecomposition gle_decompose(const GleParams& p) {
  check_gle(p);
  const int K = p.n_modes;
  GleDecomposition d;
  d.alpha.resize(K);
  for (int k = 1; k <= K; ++k)
    d.alpha[k - 1] = std::pow(static_cast<double>(k) / K, p.gamma) / p.tau;

  {
    std::vector<double> inv(K);
    for (int k = 0; k < K; ++k) inv[k] = 1.0 / d.alpha[k];
    d.c0sq = 1.0 / pairwise_sum(inv);
  }

  d.root.resize(K - 1);
  d.csq.resize(K - 1);
  for (int j = 0; j + 1 < K; ++j) {
    const double lo = d.alpha[j], hi = d.alpha[j + 1];
    if (!(hi > lo)) throw numeric_error("duplicate GLE rates");
    const double shrink = 1e-12 * (hi - lo);
    const double r = locate_root(d.alpha, lo + shrink, hi - shrink);

    // residual of the defining property q'(r) = 0, i.e. s(r) = 0
    std::vector<double> mags(K);
    for (int k = 0; k < K; ++k) mags[k] = 1.0 / std::abs(r - d.alpha[k]);
    const double resid = std::abs(s_of_y(r, d.alpha));
    if (!(resid <= 1e-8 * pairwise_sum(mags)))
      throw numeric_error("GLE root " + std::to_string(j + 1) +
                          " failed to converge (relative residual " +
                          format_full(resid / pairwise_sum(mags)) + ")");

    // s(r)=0 collapses the C_j denominator to -sum_k (alpha_k - r)^{-2}
    std::vector<double> num(K), den(K);
    for (int k = 0; k < K; ++k) {
      const double dd = d.alpha[k] - r;
      num[k] = d.alpha[k] / (dd * dd);
      den[k] = 1.0 / (dd * dd);
    }
    const double denom = pairwise_sum(den);
    const double c_sq = pairwise_sum(num) / (r * r * denom * denom);
    d.root[j] = r;
    d.csq[j] = c_sq / (2.0 * r);
  }
  return d;
}

GleDecomposition GleDecomposition::rescaled(double tau) const {
  if (!(tau > 0.0)) throw usage_error("tau must be > 0");
  GleDecomposition out = *this;
  const double inv = 1.0 / tau;
  for (auto& a : out.alpha) a *= inv;
  for (auto& r : out.root) r *= inv;
  out.c0sq *= inv;
  return out;
}

AcfVector gle_acf(const GleDecomposition& d, double dt, int nlags) {
  if (nlags < 1) throw usage_error("nlags must be >= 1");
  AcfVector acf;
  acf.dt = dt;
  acf.gamma.assign(nlags, 0.0);
  acf.gamma[0] = d.c0sq * dt;
  for (std::size_t j = 0; j < d.root.size(); ++j) {
    const double rho = std::exp(-d.root[j] * dt);  // underflows to 0 silently
    const double c = d.csq[j];
    // e^{-r|k-1|dt}, e^{-r k dt}, e^{-r(k+1)dt} by running products
    double em = rho, e0 = 1.0, ep = rho;
    acf.gamma[0] += c * (2.0 * e0 - em - ep);
    for (int k = 1; k < nlags; ++k) {
      em = e0;
      e0 = ep;
      ep *= rho;
      acf.gamma[k] += c * (2.0 * e0 - em - ep);
    }
  }
  return acf;
}

double gle_msd(const GleDecomposition& d, double t) {
  if (t < 0) throw usage_error("t must be >= 0");
  std::vector<double> terms(d.root.size());
  for (std::size_t j = 0; j < d.root.size(); ++j)
    terms[j] = 2.0 * d.csq[j] * -std::expm1(-d.root[j] * t);
  return d.c0sq * t + pairwise_sum(terms);
}

}  // namespace subdiff
