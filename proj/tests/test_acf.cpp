#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "subdiff/acf.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"

using namespace subdiff;
using Catch::Approx;

TEST_CASE("fbm_acf: Brownian limit and frozen spot values") {
  const AcfVector white = fbm_acf(FbmParams{0.5}, 1.0, 8);
  CHECK(white.gamma[0] == Approx(1.0));
  for (int k = 1; k < 8; ++k) CHECK(white.gamma[k] == Approx(0.0).margin(1e-15));

  CHECK(fbm_acf(FbmParams{0.75}, 1.0, 2).gamma[1] ==
        Approx(0.41421356237309515).epsilon(1e-12));
  CHECK(fbm_acf(FbmParams{0.25}, 1.0, 2).gamma[1] ==
        Approx(-0.2928932188134524).epsilon(1e-12));
}

TEST_CASE("fbm_acf: correlation sign follows H - 1/2") {
  const AcfVector pos = fbm_acf(FbmParams{0.7}, 0.1, 12);
  const AcfVector neg = fbm_acf(FbmParams{0.3}, 0.1, 12);
  for (int k = 1; k < 12; ++k) {
    CHECK(pos.gamma[k] > 0.0);
    CHECK(neg.gamma[k] < 0.0);
  }
}

TEST_CASE("fbm parameter validation") {
  CHECK_THROWS_AS(fbm_acf(FbmParams{0.0}, 1.0, 4), usage_error);
  CHECK_THROWS_AS(fbm_acf(FbmParams{1.0}, 1.0, 4), usage_error);
  CHECK_THROWS_AS(fbm_acf(FbmParams{0.5}, 1.0, 0), usage_error);
}

TEST_CASE("fbm_msd spot values") {
  CHECK(fbm_msd(FbmParams{0.5}, 3.0) == Approx(3.0));
  CHECK(fbm_msd(FbmParams{0.123}, 1.0) == Approx(1.0));
  CHECK(fbm_msd(FbmParams{0.9}, 1.0) == Approx(1.0));
  CHECK(fbm_msd(FbmParams{0.75}, 4.0) == Approx(8.0));
}

TEST_CASE("gle_decompose: K=1 degenerates to scaled Brownian motion") {
  const GleDecomposition d = gle_decompose(GleParams{2.0, 0.25, 1});
  CHECK(d.root.empty());
  CHECK(d.c0sq == Approx(4.0));  // 1/tau
  const AcfVector acf = gle_acf(d, 0.5, 6);
  CHECK(acf.gamma[0] == Approx(2.0));
  for (int k = 1; k < 6; ++k) CHECK(acf.gamma[k] == 0.0);
}

TEST_CASE("gle_decompose: K=2 analytic values") {
  const GleDecomposition d = gle_decompose(GleParams{2.0, 1.0, 2});
  REQUIRE(d.alpha.size() == 2);
  CHECK(d.alpha[0] == Approx(0.25));
  CHECK(d.alpha[1] == Approx(1.0));
  REQUIRE(d.root.size() == 1);
  CHECK(d.root[0] == Approx(0.625).epsilon(1e-9));
  CHECK(d.c0sq == Approx(0.2).epsilon(1e-12));
  CHECK(d.csq[0] == Approx(0.09).epsilon(1e-9));
}

TEST_CASE("gle_acf: K=2 lag-0 frozen value") {
  const GleDecomposition d = gle_decompose(GleParams{2.0, 1.0, 2});
  const AcfVector acf = gle_acf(d, 1.0, 4);
  CHECK(acf.gamma[0] == Approx(0.28365294286658177).epsilon(1e-11));
}

TEST_CASE("gle roots: bracket interiority and residual bound") {
  for (const int k_modes : {10, 50}) {
    for (const double gamma : {1.25, 2.0}) {
      const GleDecomposition d = gle_decompose(GleParams{gamma, 1e-2, k_modes});
      for (std::size_t j = 0; j < d.root.size(); ++j) {
        CHECK(d.root[j] > d.alpha[j]);
        CHECK(d.root[j] < d.alpha[j + 1]);
        double s = 0.0, mag = 0.0;
        for (double a : d.alpha) {
          s += 1.0 / (d.root[j] - a);
          mag += 1.0 / std::abs(d.root[j] - a);
        }
        CHECK(std::abs(s) <= 1e-8 * mag);
      }
      // alpha strictly increasing
      for (std::size_t k = 1; k < d.alpha.size(); ++k)
        CHECK(d.alpha[k] > d.alpha[k - 1]);
    }
  }
}

TEST_CASE("telescoping: summed increment covariances equal the MSD") {
  // Var(X_{n+m} - X_n) = sum_{|k|<m} (m-|k|) gamma_k
  auto telescope = [](const AcfVector& acf, int m) {
    double v = m * acf.gamma[0];
    for (int k = 1; k < m; ++k) v += 2.0 * (m - k) * acf.gamma[k];
    return v;
  };
  SECTION("GLE") {
    const GleDecomposition d = gle_decompose(GleParams{1.7, 3e-2, 12});
    const double dt = 1.0 / 60.0;
    const AcfVector acf = gle_acf(d, dt, 32);
    for (int m = 1; m <= 20; ++m)
      CHECK(telescope(acf, m) ==
            Approx(gle_msd(d, m * dt)).epsilon(1e-8).margin(1e-12));
  }
  SECTION("fBM") {
    const FbmParams p{0.35};
    const double dt = 1.0 / 60.0;
    const AcfVector acf = fbm_acf(p, dt, 32);
    for (int m = 1; m <= 20; ++m)
      CHECK(telescope(acf, m) ==
            Approx(fbm_msd(p, m * dt)).epsilon(1e-8).margin(1e-12));
  }
}

TEST_CASE("gle_msd: boundary behavior") {
  const GleDecomposition d = gle_decompose(GleParams{2.0, 1e-3, 20});
  CHECK(gle_msd(d, 0.0) == 0.0);
  // slope tends to c0sq once every exponential has died
  const double t1 = 2e5, t2 = 4e5;
  const double slope = (gle_msd(d, t2) - gle_msd(d, t1)) / (t2 - t1);
  CHECK(slope == Approx(d.c0sq).epsilon(1e-6));
}

TEST_CASE("gle time-scaling law: MSD(t; gamma, tau) = MSD(t/tau; gamma, 1)") {
  const GleDecomposition unit = gle_decompose(GleParams{1.6, 1.0, 24});
  const double tau = 3.2e-3;
  const GleDecomposition scaled = gle_decompose(GleParams{1.6, tau, 24});
  const GleDecomposition rescaled = unit.rescaled(tau);
  for (double t : {1e-3, 1e-2, 0.5, 4.0}) {
    CHECK(gle_msd(scaled, t) == Approx(gle_msd(unit, t / tau)).epsilon(1e-9));
    CHECK(gle_msd(rescaled, t) == Approx(gle_msd(scaled, t)).epsilon(1e-9));
  }
}

TEST_CASE("gle transient subdiffusion: K=200 slope (derived value)") {
  // Least-squares log-log slope over t in [1e-2, 1] s for gamma = 2,
  // tau = 1e-3.  The asymptotic exponent is 1/gamma = 0.5; at K = 200 the
  // finite-spectrum value over this window is 0.5579 (frozen by an
  // independent scripted evaluation).
  const GleDecomposition d = gle_decompose(GleParams{2.0, 1e-3, 200});
  std::vector<double> lt(40), lm(40);
  for (int i = 0; i < 40; ++i) {
    const double t = std::pow(10.0, -2.0 + 2.0 * i / 39.0);
    lt[i] = std::log(t);
    lm[i] = std::log(gle_msd(d, t));
  }
  const double slope = ls_slope(lt, lm);
  CHECK(slope == Approx(0.5579).margin(2e-3));

  // local slope bottoms out just above 1/gamma inside the window
  const double h = 1.001;
  const double local = (std::log(gle_msd(d, 0.5 * h)) - std::log(gle_msd(d, 0.5 / h))) /
                       (2.0 * std::log(h));
  CHECK(local == Approx(0.536).margin(5e-3));
}

TEST_CASE("gle parameter validation") {
  CHECK_THROWS_AS(gle_decompose(GleParams{0.4, 1.0, 4}), usage_error);
  CHECK_THROWS_AS(gle_decompose(GleParams{2.0, 0.0, 4}), usage_error);
  CHECK_THROWS_AS(gle_decompose(GleParams{2.0, 1.0, 0}), usage_error);
}
