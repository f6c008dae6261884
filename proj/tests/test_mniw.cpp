#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/mniw.hpp"
#include "subdiff/models.hpp"

using namespace subdiff;
using namespace subdiff::testing;
using Catch::Approx;

namespace {

AcfVector white_acf(double s2, double dt, int n) {
  AcfVector acf;
  acf.dt = dt;
  acf.gamma.assign(n, 0.0);
  acf.gamma[0] = s2;
  return acf;
}

// test-local Inverse-Wishart draw (Bartlett), independent of the library path
Eigen::Matrix2d draw_iw(const Eigen::Matrix2d& psi, double nu, SplitRng& rng) {
  Eigen::LLT<Eigen::Matrix2d> llt(psi.inverse());
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  a(0, 0) = std::sqrt(rng.chi_squared(nu));
  a(1, 1) = std::sqrt(rng.chi_squared(nu - 1.0));
  a(1, 0) = rng.normal();
  const Eigen::Matrix2d la = llt.matrixL() * a;
  return (la * la.transpose()).inverse();
}

}  // namespace

TEST_CASE("log_iw_normalizer agrees with a direct evaluation") {
  Eigen::Matrix2d psi;
  psi << 1.3, 0.2, 0.2, 0.8;
  const double nu = 7.5;
  const double direct =
      0.5 * nu * std::log(psi.determinant()) - nu * std::log(2.0) -
      (0.5 * std::log(M_PI) + std::lgamma(0.5 * nu) + std::lgamma(0.5 * nu - 0.5));
  CHECK(log_iw_normalizer(psi, nu) == Approx(direct).epsilon(1e-13));
}

TEST_CASE("mniw_update: N=1 closed-form evidence") {
  // With mu marginalized, y | Sigma ~ N(dt Lambda, c Sigma) for
  // c = gamma_0 + dt^2/Omega, and the Sigma integral gives
  //   f(y) = (2 pi c)^{-1} Xi(Psi, nu) / Xi(Psi + r'r/c, nu + 1).
  IncrementMatrix x;
  x.dt = 1.0 / 60.0;
  x.x.resize(1, 2);
  x.x << 0.12, -0.07;
  const AcfVector acf = white_acf(0.9, x.dt, 1);
  Eigen::Matrix2d psi;
  psi << 0.8, 0.2, 0.2, 1.1;
  const MniwParams prior =
      MniwParams::make(Eigen::RowVector2d(0.2, -0.1), 4.0, psi, 7.0);
  const auto up = mniw_update(x, acf, prior);

  const double c = 0.9 + x.dt * x.dt / 4.0;
  const Eigen::RowVector2d r = x.x.row(0) - x.dt * prior.lambda;
  const Eigen::Matrix2d psi1 = psi + r.transpose() * r / c;
  const double expect = -std::log(2.0 * M_PI * c) + log_iw_normalizer(psi, 7.0) -
                        log_iw_normalizer(psi1, 8.0);
  CHECK(up.log_evidence == Approx(expect).margin(1e-10));
  CHECK_FALSE(up.relative);
}

TEST_CASE("mniw_update: N=1 evidence matches numeric quadrature over (mu, Sigma)") {
  // 3-D Simpson quadrature over (sigma1, sigma2, rho) with mu integrated
  // analytically; checks the Inverse-Wishart normalizer against brute force.
  IncrementMatrix x;
  x.dt = 0.5;
  x.x.resize(1, 2);
  x.x << 0.4, -0.3;
  const double g0 = 0.7;
  const AcfVector acf = white_acf(g0, x.dt, 1);
  Eigen::Matrix2d psi;
  psi << 2.0, 0.5, 0.5, 1.5;
  const double nu = 9.0, omega = 3.0;
  const MniwParams prior =
      MniwParams::make(Eigen::RowVector2d(0.1, 0.2), omega, psi, nu);
  const auto up = mniw_update(x, acf, prior);

  const double c = g0 + x.dt * x.dt / omega;
  const Eigen::RowVector2d r = x.x.row(0) - x.dt * prior.lambda;
  auto integrand = [&](double s1, double s2, double rho) {
    Eigen::Matrix2d sigma;
    sigma << s1 * s1, s1 * s2 * rho, s1 * s2 * rho, s2 * s2;
    const double det = sigma.determinant();
    if (det <= 0) return 0.0;
    const Eigen::Matrix2d si = sigma.inverse();
    // N(r; 0, c Sigma) density
    const double quad = (r * si * r.transpose())(0, 0) / c;
    const double gauss =
        std::exp(-0.5 * quad) / (2.0 * M_PI * c * std::sqrt(det));
    // Inverse-Wishart density with normalizer evaluated via log_multigamma
    const double iw_log = log_iw_normalizer(psi, nu) -
                          0.5 * (nu + 3.0) * std::log(det) -
                          0.5 * (psi.cwiseProduct(si)).sum();
    // Jacobian d Sigma / d(s1, s2, rho) = 4 s1^2 s2^2 * (s1 s2) / (s1 s2) ...
    const double jac = 4.0 * s1 * s1 * s2 * s2;
    return gauss * std::exp(iw_log) * jac;
  };
  // Simpson on [lo, hi]^2 x [-0.98, 0.98]
  const int n1 = 240, n3 = 96;
  const double lo = 0.03, hi = 2.8;
  auto simpson_w = [](int i, int n) {
    if (i == 0 || i == n) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
  };
  const double h1 = (hi - lo) / n1, h3 = 1.96 / n3;
  double total = 0.0;
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n1; ++j)
      for (int k = 0; k <= n3; ++k)
        total += simpson_w(i, n1) * simpson_w(j, n1) * simpson_w(k, n3) *
                 integrand(lo + i * h1, lo + j * h1, -0.98 + k * h3);
  total *= h1 * h1 * h3 / 27.0;
  CHECK(up.log_evidence == Approx(std::log(total)).margin(1e-4));
}

TEST_CASE("mniw_update: N=8 evidence within 3 MC standard errors") {
  SplitRng rng(2024);
  const int n = 8;
  const double dt = 1.0 / 60.0;
  const AcfVector acf = fbm_acf(FbmParams{0.4}, dt, n);
  Eigen::Matrix2d psi;
  psi << 0.9, 0.15, 0.15, 1.2;
  const double nu = 10.0, omega = 4.0;
  const MniwParams prior =
      MniwParams::make(Eigen::RowVector2d(0.3, -0.2), omega, psi, nu);

  IncrementMatrix x;
  x.dt = dt;
  x.x.resize(n, 2);
  for (int i = 0; i < n; ++i) x.x.row(i) << 0.3 * rng.normal(), 0.3 * rng.normal();
  const auto up = mniw_update(x, acf, prior);

  const int m = 200000;
  std::vector<double> logp(m);
  for (int s = 0; s < m; ++s) {
    const Eigen::Matrix2d sigma = draw_iw(psi, nu, rng);
    Eigen::LLT<Eigen::Matrix2d> llt(sigma / omega);
    Eigen::Vector2d mu = prior.lambda.transpose() +
                         llt.matrixL() * Eigen::Vector2d(rng.normal(), rng.normal());
    logp[s] = dense_loglik(x, LocationScale::from_sigma(mu, sigma), acf);
  }
  double mx = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0, sum2 = 0.0;
  for (double lp : logp) {
    const double w = std::exp(lp - mx);
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / m;
  const double sd = std::sqrt((sum2 / m - mean * mean) / m);
  const double rel_se = sd / mean;
  const double log_mc = mx + std::log(mean);
  CHECK(up.log_evidence == Approx(log_mc).margin(3.0 * rel_se));
}

TEST_CASE("mniw_update: sequential update equals full-data posterior") {
  // independent halves (white V): chain rule holds exactly
  SplitRng rng(4);
  const int n = 20;
  const double dt = 0.2;
  const AcfVector acf = white_acf(1.3, dt, n);
  IncrementMatrix full;
  full.dt = dt;
  full.x.resize(n, 2);
  for (int i = 0; i < n; ++i) full.x.row(i) << rng.normal(), rng.normal();

  Eigen::Matrix2d psi;
  psi << 1.0, -0.2, -0.2, 0.7;
  const MniwParams prior =
      MniwParams::make(Eigen::RowVector2d(0.1, 0.4), 2.0, psi, 6.0);

  IncrementMatrix first, second;
  first.dt = second.dt = dt;
  first.x = full.x.topRows(n / 2);
  second.x = full.x.bottomRows(n - n / 2);
  const AcfVector half = white_acf(1.3, dt, n / 2);

  const auto up_full = mniw_update(full, acf, prior);
  const auto up1 = mniw_update(first, half, prior);
  const auto up2 = mniw_update(second, half, up1.posterior);

  CHECK(up2.posterior.nu == Approx(up_full.posterior.nu).margin(1e-10));
  CHECK(up2.posterior.omega == Approx(up_full.posterior.omega).margin(1e-10));
  CHECK((up2.posterior.lambda - up_full.posterior.lambda).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((up2.posterior.psi - up_full.posterior.psi).cwiseAbs().maxCoeff() < 1e-10);
  // evidence chain rule: f(Y) = f(Y_1) f(Y_2 | Y_1)
  CHECK(up1.log_evidence + up2.log_evidence ==
        Approx(up_full.log_evidence).margin(1e-10));
}

TEST_CASE("mniw_update: dominating prior pins the posterior mean") {
  SplitRng rng(5);
  const int n = 16;
  IncrementMatrix x;
  x.dt = 1.0;
  x.x.resize(n, 2);
  for (int i = 0; i < n; ++i) x.x.row(i) << rng.normal(), rng.normal();
  Eigen::Matrix2d psi = Eigen::Matrix2d::Identity();
  const Eigen::RowVector2d lambda(0.8, -0.5);
  const MniwParams prior = MniwParams::make(lambda, 1e12, psi, 6.0);
  const auto up = mniw_update(x, white_acf(1.0, 1.0, n), prior);
  CHECK((up.posterior.lambda - lambda).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mniw_update: improper default and row-scaling covariance") {
  SplitRng rng(6);
  const int n = 24;
  const double dt = 1.0 / 60;
  const AcfVector acf = fbm_acf(FbmParams{0.3}, dt, n);
  IncrementMatrix x;
  x.dt = dt;
  x.x.resize(n, 2);
  for (int i = 0; i < n; ++i) x.x.row(i) << 0.2 * rng.normal(), 0.2 * rng.normal();

  const auto up = mniw_update(x, acf, MniwParams::improper_default());
  CHECK(up.relative);
  CHECK(up.posterior.nu == Approx(n - 1.0));

  const double c = 5.0;
  IncrementMatrix xs = x;
  xs.x *= c;
  const auto ups = mniw_update(xs, acf, MniwParams::improper_default());
  CHECK(ups.posterior.nu == up.posterior.nu);
  CHECK(ups.posterior.omega == Approx(up.posterior.omega).epsilon(1e-14));
  CHECK((ups.posterior.psi - c * c * up.posterior.psi).cwiseAbs().maxCoeff() <
        1e-10 * up.posterior.psi.norm());
}

TEST_CASE("mniw_update: pseudo-proper prior flags relative evidence") {
  const Eigen::Matrix2d tiny = 1e-20 * Eigen::Matrix2d::Identity();
  const MniwParams ni =
      MniwParams::make(Eigen::RowVector2d::Zero(), 1000.0, tiny, 1e-20);
  CHECK(ni.propriety == Propriety::pseudo);
  SplitRng rng(8);
  IncrementMatrix x;
  x.dt = 1.0;
  x.x.resize(8, 2);
  for (int i = 0; i < 8; ++i) x.x.row(i) << rng.normal(), rng.normal();
  const auto up = mniw_update(x, white_acf(1.0, 1.0, 8), ni);
  CHECK(up.relative);
  CHECK(std::isfinite(up.log_evidence));
}

TEST_CASE("sample_inverse_wishart: mean matches Psi / (nu - q - 1)") {
  Eigen::Matrix2d psi;
  psi << 2.0, 0.6, 0.6, 1.1;
  const double nu = 12.0;
  SplitRng rng(9);
  Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
  const int m = 40000;
  for (int i = 0; i < m; ++i) mean += sample_inverse_wishart(psi, nu, rng);
  mean /= m;
  const Eigen::Matrix2d expect = psi / (nu - 3.0);
  CHECK((mean - expect).cwiseAbs().maxCoeff() < 0.02 * expect.norm());
}

TEST_CASE("sample_mniw: conditional structure of mu") {
  Eigen::Matrix2d psi;
  psi << 0.5, 0.0, 0.0, 0.5;
  const MniwParams p = MniwParams::make(Eigen::RowVector2d(1.0, -2.0), 10.0, psi, 15.0);
  SplitRng rng(10);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  const int m = 40000;
  for (int i = 0; i < m; ++i) mean += sample_mniw(p, rng).mu;
  mean /= m;
  CHECK(mean(0) == Approx(1.0).margin(0.01));
  CHECK(mean(1) == Approx(-2.0).margin(0.01));
}

TEST_CASE("mniw guards") {
  IncrementMatrix x;
  x.dt = 1.0;
  x.x.setZero(2, 2);
  // nu_hat = n - 1 = 1 <= q - 1 is rejected for the improper default
  CHECK_THROWS_AS(mniw_update(x, white_acf(1.0, 1.0, 2), MniwParams::improper_default()),
                  numeric_error);
  CHECK_THROWS_AS(MniwParams::make(Eigen::RowVector2d::Zero(), 0.0,
                                   Eigen::Matrix2d::Identity(), 5.0),
                  usage_error);
}
