#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/gausslik.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/models.hpp"

using namespace subdiff;
using namespace subdiff::testing;
using Catch::Approx;

namespace {

IncrementMatrix random_increments(int n, double dt, SplitRng& rng) {
  IncrementMatrix x;
  x.dt = dt;
  x.x.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    x.x(i, 0) = rng.normal();
    x.x(i, 1) = rng.normal();
  }
  return x;
}

AcfVector white_acf(double s2, double dt, int n) {
  AcfVector acf;
  acf.dt = dt;
  acf.gamma.assign(n, 0.0);
  acf.gamma[0] = s2;
  return acf;
}

}  // namespace

TEST_CASE("dl_factor: white noise") {
  const AcfVector acf = white_acf(2.5, 1.0, 16);
  const InnovationsFactor fac(acf, 16);
  for (double v : fac.innovation_variances()) CHECK(v == Approx(2.5));
  for (double a : fac.pacf()) CHECK(a == Approx(0.0).margin(1e-15));
}

TEST_CASE("dl_factor: AR(1) innovation variances collapse to 1") {
  const double phi = 0.6;
  AcfVector acf;
  acf.dt = 1.0;
  acf.gamma.resize(32);
  for (int k = 0; k < 32; ++k)
    acf.gamma[k] = std::pow(phi, k) / (1.0 - phi * phi);
  const InnovationsFactor fac(acf, 32);
  CHECK(fac.innovation_variances()[0] == Approx(1.0 / (1.0 - phi * phi)));
  for (int i = 1; i < 32; ++i)
    CHECK(fac.innovation_variances()[i] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dl_factor: log-det matches dense factorization") {
  const AcfVector acf = fbm_acf(FbmParams{0.3}, 0.1, 128);
  const InnovationsFactor fac(acf, 128);
  CHECK(fac.log_det() ==
        Approx(dense_logdet(dense_toeplitz(acf, 128))).margin(1e-8));
}

TEST_CASE("dl_factor: non-positive-definite input is rejected") {
  AcfVector bad = white_acf(1.0, 1.0, 4);
  bad.gamma[1] = 1.5;  // |gamma_1| > gamma_0
  CHECK_THROWS_AS(InnovationsFactor(bad, 4), numeric_error);
}

TEST_CASE("positive definiteness of model ACFs up to N = 2048") {
  CHECK_NOTHROW(InnovationsFactor(fbm_acf(FbmParams{0.15}, 1.0 / 60, 2048), 2048));
  CHECK_NOTHROW(InnovationsFactor(fbm_acf(FbmParams{0.85}, 1.0 / 60, 2048), 2048));
  const GleDecomposition d = gle_decompose(GleParams{2.0, 1e-3, 50});
  CHECK_NOTHROW(InnovationsFactor(gle_acf(d, 1.0 / 60, 2048), 2048));
}

TEST_CASE("loglik: bivariate standard normal at the origin") {
  IncrementMatrix x;
  x.dt = 1.0;
  x.x.setZero(1, 2);
  LocationScale ls;  // mu = 0, Sigma = I
  CHECK(loglik(x, ls, white_acf(1.0, 1.0, 1)) ==
        Approx(-std::log(2.0 * M_PI)).epsilon(1e-14));
}

TEST_CASE("loglik: equals dense evaluation on random instances") {
  SplitRng rng(123);
  for (int rep = 0; rep < 6; ++rep) {
    SplitRng r = rng.child(rep);
    const int n = 32 + static_cast<int>(r.uniform() * 224);
    const double dt = 1.0 / 60.0;
    AcfVector acf;
    if (rep % 2 == 0) {
      acf = fbm_acf(FbmParams{0.1 + 0.8 * r.uniform()}, dt, n);
    } else {
      acf = gle_acf(gle_decompose(GleParams{1.0 + 2.0 * r.uniform(),
                                            std::exp(-6.0 + 4.0 * r.uniform()), 8}),
                    dt, n);
    }
    IncrementMatrix x = random_increments(n, dt, r);
    x.x *= 0.1;
    LocationScale ls;
    ls.mu << r.normal(), r.normal();
    ls.sigma1 = 0.5 + r.uniform();
    ls.sigma2 = 0.5 + r.uniform();
    ls.rho = 1.6 * r.uniform() - 0.8;
    CHECK(loglik(x, ls, acf) == Approx(dense_loglik(x, ls, acf)).margin(1e-6));
  }
}

TEST_CASE("loglik: exact translation invariance in the drift") {
  SplitRng rng(77);
  const int n = 64;
  const double dt = 0.25;
  const AcfVector acf = fbm_acf(FbmParams{0.4}, dt, n);
  IncrementMatrix x = random_increments(n, dt, rng);
  LocationScale ls;
  ls.mu << 0.3, -0.2;
  const double base = loglik(x, ls, acf);
  IncrementMatrix shifted = x;
  shifted.x.col(0).array() += dt * 1.7;
  shifted.x.col(1).array() += dt * -0.9;
  LocationScale ls2 = ls;
  ls2.mu << 0.3 + 1.7, -0.2 - 0.9;
  CHECK(loglik(shifted, ls2, acf) == Approx(base).margin(1e-10));
}

TEST_CASE("profile_mle: identity-covariance degenerate case") {
  SplitRng rng(31);
  const int n = 40;
  IncrementMatrix x = random_increments(n, 1.0, rng);
  x.x.rowwise() -= x.x.colwise().mean();  // exactly zero-mean rows
  const AcfVector acf = white_acf(1.0, 1.0, n);
  const ProfileMle mle = profile_mle(x, acf);
  CHECK(mle.mu(0) == Approx(0.0).margin(1e-14));
  CHECK(mle.mu(1) == Approx(0.0).margin(1e-14));
  const Eigen::Matrix2d expect = x.x.transpose() * x.x / static_cast<double>(n);
  CHECK((mle.sigma - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("profile_mle: attains the maximum of loglik") {
  SplitRng rng(32);
  const int n = 48;
  const double dt = 0.1;
  const AcfVector acf = fbm_acf(FbmParams{0.6}, dt, n);
  IncrementMatrix x = random_increments(n, dt, rng);
  const ProfileMle mle = profile_mle(x, acf);
  const double at_mle =
      loglik(x, LocationScale::from_sigma(mle.mu, mle.sigma), acf);
  CHECK(mle.loglik == Approx(at_mle).margin(1e-9));
  for (int rep = 0; rep < 10; ++rep) {
    LocationScale ls = LocationScale::from_sigma(mle.mu, mle.sigma);
    ls.mu(0) += 0.2 * rng.normal();
    ls.mu(1) += 0.2 * rng.normal();
    ls.sigma1 *= std::exp(0.2 * rng.normal());
    ls.sigma2 *= std::exp(0.2 * rng.normal());
    ls.rho = std::clamp(ls.rho + 0.1 * rng.normal(), -0.95, 0.95);
    CHECK(loglik(x, ls, acf) <= mle.loglik + 1e-9);
  }
}

TEST_CASE("profile_mle: matches brute-force grid maximization on a tiny instance") {
  SplitRng rng(33);
  const int n = 12;
  const AcfVector acf = white_acf(1.0, 1.0, n);
  IncrementMatrix x = random_increments(n, 1.0, rng);
  x.x *= 0.7;
  const ProfileMle mle = profile_mle(x, acf);
  double best = -1e300;
  // crude grid around the analytic optimum
  for (double m1 = -0.5; m1 <= 0.5; m1 += 0.01)
    for (double m2 = -0.5; m2 <= 0.5; m2 += 0.01) {
      LocationScale ls = LocationScale::from_sigma(
          Eigen::Vector2d(m1, m2), mle.sigma);
      best = std::max(best, loglik(x, ls, acf));
    }
  CHECK(best <= mle.loglik + 1e-9);
  CHECK(mle.loglik - best < 1e-2);  // grid gets close
}

TEST_CASE("profile_mle: Sigma-hat symmetric positive definite on random data") {
  SplitRng rng(34);
  for (int rep = 0; rep < 5; ++rep) {
    SplitRng r = rng.child(rep);
    const int n = 16 + static_cast<int>(r.uniform() * 64);
    const AcfVector acf = fbm_acf(FbmParams{0.2 + 0.6 * r.uniform()}, 1.0, n);
    const ProfileMle mle = profile_mle(random_increments(n, 1.0, r), acf);
    CHECK(mle.sigma(0, 1) == Approx(mle.sigma(1, 0)));
    CHECK(mle.sigma.determinant() > 0.0);
    CHECK(mle.sigma(0, 0) > 0.0);
  }
}

TEST_CASE("simulate: determinism and Brownian whiteness") {
  const AcfVector acf = fbm_acf(FbmParams{0.5}, 1.0, 512);
  LocationScale ls;
  const Trajectory a = simulate_path(ls, acf, 512, SplitRng(42));
  const Trajectory b = simulate_path(ls, acf, 512, SplitRng(42));
  CHECK((a.positions - b.positions).cwiseAbs().maxCoeff() == 0.0);

  const IncrementMatrix inc = increments(a);
  for (int c = 0; c < 2; ++c) {
    double r1 = 0, v = 0;
    for (int i = 0; i + 1 < 512; ++i) r1 += inc.x(i, c) * inc.x(i + 1, c);
    for (int i = 0; i < 512; ++i) v += inc.x(i, c) * inc.x(i, c);
    CHECK(std::abs(r1 / v) < 3.0 / std::sqrt(512.0));
  }
}

TEST_CASE("simulate: sample increment covariances match the ACF") {
  const int n = 1 << 14;
  const GleDecomposition d = gle_decompose(GleParams{2.0, 0.05, 6});
  const AcfVector acf = gle_acf(d, 1.0 / 60.0, n);
  LocationScale ls;
  ls.sigma1 = 1.0;
  ls.sigma2 = 1.0;
  const Trajectory traj = simulate_path(ls, acf, n, SplitRng(7));
  const IncrementMatrix inc = increments(traj);
  for (int k = 0; k <= 5; ++k) {
    double c = 0;
    for (int i = 0; i + k < n; ++i) c += inc.x(i, 0) * inc.x(i + k, 0);
    c /= (n - k);
    // MC standard error of a lag covariance ~ gamma_0 / sqrt(n)
    CHECK(c == Approx(acf.gamma[k]).margin(4.0 * acf.gamma[0] / std::sqrt(n)));
  }
}

TEST_CASE("simulate: pathwise MSD ensemble matches the theoretical MSD") {
  const int n = 200, paths = 200;
  const FbmParams p{0.4};
  const double dt = 1.0 / 60.0;
  const AcfVector acf = fbm_acf(p, dt, n);
  LocationScale ls;
  SplitRng rng(91);
  for (int k : {2, 10, 20}) {
    std::vector<double> stats(paths);
    for (int r = 0; r < paths; ++r) {
      const Trajectory traj = simulate_path(ls, acf, n, rng.child(r));
      stats[r] = pathwise_msd(traj, k, false).value[k - 1];
    }
    const double mean = mean_of(stats);
    const double se = std::sqrt(var_of(stats) / paths);
    CHECK(mean == Approx(fbm_msd(p, k * dt)).margin(3.0 * se));
  }
}

TEST_CASE("residuals: identity whitening returns the raw increments") {
  SplitRng rng(55);
  const int n = 32;
  IncrementMatrix x = random_increments(n, 1.0, rng);
  LocationScale ls;  // mu = 0, Sigma = I
  const auto z = residuals(x, ls, white_acf(1.0, 1.0, n));
  CHECK((z - x.x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("residuals: invariant under common rescaling of (x, sigma1, sigma2)") {
  SplitRng rng(56);
  const int n = 64;
  const double dt = 0.5;
  const AcfVector acf = fbm_acf(FbmParams{0.35}, dt, n);
  IncrementMatrix x = random_increments(n, dt, rng);
  LocationScale ls;
  ls.mu << 0.02, -0.01;
  ls.sigma1 = 0.8;
  ls.sigma2 = 1.3;
  ls.rho = 0.4;
  const auto z1 = residuals(x, ls, acf);
  const double c = 37.0;
  IncrementMatrix xs = x;
  xs.x *= c;
  LocationScale ls2 = ls;
  ls2.mu *= c;
  ls2.sigma1 *= c;
  ls2.sigma2 *= c;
  const auto z2 = residuals(xs, ls2, acf);
  CHECK((z1 - z2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("residuals of simulated data are standard normal") {
  const int n = 300;
  const double dt = 1.0 / 60.0;
  const GleDecomposition d = gle_decompose(GleParams{2.5, 0.02, 4});
  const AcfVector acf = gle_acf(d, dt, n);
  LocationScale ls;
  ls.mu << 0.05, 0.0;
  ls.sigma1 = 0.7;
  ls.sigma2 = 1.1;
  ls.rho = -0.3;
  SplitRng rng(77);

  int ks_pass = 0;
  double pooled_mean = 0.0, pooled_var = 0.0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const Trajectory traj = simulate_path(ls, acf, n, rng.child(r));
    const auto z = residuals(increments(traj), ls, acf);
    std::vector<double> pooled(2 * n);
    for (int i = 0; i < n; ++i) {
      pooled[i] = z(i, 0);
      pooled[n + i] = z(i, 1);
    }
    pooled_mean += mean_of(pooled);
    pooled_var += var_of(pooled);
    const double crit = 1.3581 / std::sqrt(2.0 * n);  // 5% Kolmogorov
    if (ks_distance_std_normal(pooled) < crit) ++ks_pass;
  }
  CHECK(ks_pass >= 93);
  CHECK(pooled_mean / reps == Approx(0.0).margin(4.0 / std::sqrt(2.0 * n)));
  CHECK(pooled_var / reps == Approx(1.0).margin(4.0 / std::sqrt(2.0 * n)));
}
