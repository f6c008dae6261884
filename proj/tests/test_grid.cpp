#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/grid.hpp"
#include "subdiff/selection.hpp"
#include "subdiff/transform.hpp"

using namespace subdiff;
using namespace subdiff::testing;
using Catch::Approx;

namespace {

IncrementMatrix simulate_fbm_increments(double hurst, const LocationScale& ls,
                                        int n, double dt, SplitRng rng) {
  const AcfVector acf = fbm_acf(FbmParams{hurst}, dt, n);
  return increments(simulate_path(ls, acf, n, rng));
}

GridSpec small_fbm_grid(int nodes) {
  GridSpec g;
  g.h_nodes = nodes;
  return g;
}

}  // namespace

TEST_CASE("grid_posterior: recovers a simulated Hurst exponent") {
  LocationScale ls;
  ls.sigma1 = 0.3;
  ls.sigma2 = 0.3;
  const double dt = 1.0 / 60.0;
  const int n = 800;
  const IncrementMatrix x = simulate_fbm_increments(0.7, ls, n, dt, SplitRng(1));
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, small_fbm_grid(400), dt, n);
  const PosteriorGrid post = grid_posterior(x, grid, PriorSpec::improper_default());

  std::vector<double> h(post.nodes.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = post.nodes[i].th1;
  const double mean = post.weighted_mean(h);
  double var = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    var += post.norm_w[i] * sq(h[i] - mean);
  CHECK(std::abs(mean - 0.7) < 4.0 * std::sqrt(var));
  CHECK_FALSE(post.proper_prior);
  CHECK_THROWS_AS(post.log_marginal(), usage_error);
}

TEST_CASE("grid_posterior: grid refinement stability of the posterior mean") {
  LocationScale ls;
  ls.sigma1 = 0.25;
  ls.sigma2 = 0.25;
  const double dt = 1.0 / 60.0;
  const int n = 400;
  const IncrementMatrix x = simulate_fbm_increments(0.45, ls, n, dt, SplitRng(2));
  double means[2];
  int idx = 0;
  for (int nodes : {200, 400}) {
    const ThetaGrid grid =
        ThetaGrid::build(Family::fbm, 0, small_fbm_grid(nodes), dt, n);
    const PosteriorGrid post = grid_posterior(x, grid, PriorSpec::improper_default());
    std::vector<double> h(post.nodes.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = post.nodes[i].th1;
    means[idx++] = post.weighted_mean(h);
  }
  CHECK(std::abs(means[0] - means[1]) < 1e-3);
}

TEST_CASE("log_marginal: point-mass grid matches the closed-form evidence") {
  IncrementMatrix x;
  x.dt = 1.0 / 60.0;
  x.x.resize(1, 2);
  x.x << 0.1, -0.05;
  // one-node grid at H = 0.5 (white ACF) with a fixed proper MNIW
  GridSpec spec;
  spec.h_nodes = 1;
  spec.h_min = 0.5;
  spec.h_max = 0.5;
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, spec, x.dt, 1);
  Eigen::Matrix2d psi;
  psi << 0.6, 0.1, 0.1, 0.9;
  const MniwParams mniw = MniwParams::make(Eigen::RowVector2d(0.0, 0.1), 5.0, psi, 8.0);
  const PriorSpec prior = PriorSpec::tabulated({mniw}, {0.0});
  const PosteriorGrid post = grid_posterior(x, grid, prior);

  const auto up = mniw_update(x, grid.acf(0), mniw);
  CHECK(post.log_marginal() == Approx(up.log_evidence).margin(1e-12));

  // student-type closed form for N = 1
  const double g0 = grid.acf(0).gamma[0];
  const double c = g0 + x.dt * x.dt / mniw.omega;
  const Eigen::RowVector2d r = x.x.row(0) - x.dt * mniw.lambda;
  const Eigen::Matrix2d psi1 = psi + r.transpose() * r / c;
  const double student = -std::log(2.0 * M_PI * c) + log_iw_normalizer(psi, 8.0) -
                         log_iw_normalizer(psi1, 9.0);
  CHECK(post.log_marginal() == Approx(student).margin(1e-10));
}

TEST_CASE("log_marginal: scaling the prior density shifts log f(Y) additively") {
  IncrementMatrix x;
  x.dt = 0.1;
  x.x.resize(4, 2);
  x.x << 0.1, 0.0, -0.2, 0.1, 0.05, -0.1, 0.0, 0.2;
  GridSpec spec = small_fbm_grid(20);
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, spec, x.dt, 4);
  Eigen::Matrix2d psi = Eigen::Matrix2d::Identity();
  const MniwParams mniw = MniwParams::make(Eigen::RowVector2d::Zero(), 2.0, psi, 7.0);
  std::vector<MniwParams> per_node(grid.size(), mniw);
  std::vector<double> dens(grid.size(), 0.0), dens_scaled(grid.size(), std::log(3.0));
  const double lm1 =
      grid_posterior(x, grid, PriorSpec::tabulated(per_node, dens)).log_marginal();
  const double lm2 =
      grid_posterior(x, grid, PriorSpec::tabulated(per_node, dens_scaled)).log_marginal();
  CHECK(lm2 - lm1 == Approx(std::log(3.0)).margin(1e-12));
}

TEST_CASE("log_marginal: agrees with importance-sampling Monte Carlo") {
  const TestPrior tp = make_synthetic_test_prior(Family::fbm, 0);
  const double dt = 1.0 / 60.0;
  const int n = 64;
  LocationScale ls_true;
  ls_true.sigma1 = 0.2;
  ls_true.sigma2 = 0.2;
  const IncrementMatrix x = simulate_fbm_increments(0.35, ls_true, n, dt, SplitRng(3));

  GridSpec spec;
  spec.h_nodes = 400;
  spec.h_min = 0.05;
  spec.h_max = 0.65;  // +-6 prior sd around H = 0.35
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, spec, dt, n);
  const double lm =
      grid_posterior(x, grid, PriorSpec::from_test_prior(tp)).log_marginal();

  // Monte Carlo from the conjugate-form prior itself: vartheta from the
  // Gaussian marginal, (mu, Sigma) from the MNIW conditional at vartheta
  SplitRng rng(4);
  const int m = 60000;
  std::vector<double> logp(m);
  for (int s = 0; s < m; ++s) {
    double hurst;
    do {
      hurst = tp.mean(0) + std::sqrt(tp.cov(0, 0)) * rng.normal();
    } while (!(hurst > 0.0 && hurst < 1.0));
    const LocationScale ls = sample_mniw(tp.mniw_at(hurst, 0.0), rng);
    const AcfVector acf = fbm_acf(FbmParams{hurst}, dt, n);
    logp[s] = dense_loglik(x, ls, acf);
  }
  const double mx = *std::max_element(logp.begin(), logp.end());
  double sum = 0, sum2 = 0;
  for (double lp : logp) {
    const double w = std::exp(lp - mx);
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / m;
  const double rel_se = std::sqrt((sum2 / m - mean * mean) / m) / mean;
  CHECK(lm == Approx(mx + std::log(mean)).margin(3.0 * rel_se));
}

TEST_CASE("sample_posterior: node frequencies match the grid weights") {
  LocationScale ls;
  ls.sigma1 = 0.3;
  ls.sigma2 = 0.3;
  const double dt = 1.0 / 60.0;
  const int n = 200;
  const IncrementMatrix x = simulate_fbm_increments(0.4, ls, n, dt, SplitRng(5));
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, small_fbm_grid(100), dt, n);
  const PosteriorGrid post = grid_posterior(x, grid, PriorSpec::improper_default());

  const int m = 100000;
  const auto draws = sample_posterior(post, m, SplitRng(6));

  // chi-square over nodes, low-expectation nodes grouped into one bucket
  std::vector<double> observed(post.norm_w.size() + 1, 0.0);
  for (const auto& d : draws) observed[d.node] += 1.0;
  double chi2 = 0.0, other_obs = 0.0, other_exp = 0.0;
  int groups = 0;
  for (std::size_t i = 0; i < post.norm_w.size(); ++i) {
    const double expect = m * post.norm_w[i];
    if (expect >= 10.0) {
      chi2 += sq(observed[i] - expect) / expect;
      ++groups;
    } else {
      other_obs += observed[i];
      other_exp += expect;
    }
  }
  if (other_exp > 0) {
    chi2 += sq(other_obs - other_exp) / other_exp;
    ++groups;
  }
  const double df = groups - 1;
  // Wilson-Hilferty chi-square quantile at p = 0.01
  const double z = 2.3263;
  const double crit = df * std::pow(1.0 - 2.0 / (9.0 * df) +
                                    z * std::sqrt(2.0 / (9.0 * df)), 3.0);
  CHECK(chi2 < crit);

  // Inverse-Wishart moment identity: E[Sigma] ~ sum_w Psi_hat / (nu_hat - 3)
  Eigen::Matrix2d expect_sigma = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < post.nodes.size(); ++i)
    expect_sigma += post.norm_w[i] * post.nodes[i].cond.psi /
                    (post.nodes[i].cond.nu - 3.0);
  Eigen::Matrix2d mean_sigma = Eigen::Matrix2d::Zero();
  for (const auto& d : draws) mean_sigma += d.params.ls.sigma();
  mean_sigma /= m;
  CHECK((mean_sigma - expect_sigma).cwiseAbs().maxCoeff() <
        0.02 * expect_sigma.norm());
}

TEST_CASE("sample_posterior: point-mass grid pins vartheta") {
  IncrementMatrix x;
  x.dt = 0.5;
  x.x.resize(8, 2);
  SplitRng rng(7);
  for (int i = 0; i < 8; ++i) x.x.row(i) << rng.normal(), rng.normal();
  GridSpec spec;
  spec.h_nodes = 1;
  spec.h_min = spec.h_max = 0.3;
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, spec, x.dt, 8);
  const PosteriorGrid post = grid_posterior(x, grid, PriorSpec::improper_default());
  const auto draws = sample_posterior(post, 50, SplitRng(8));
  for (const auto& d : draws) CHECK(d.params.vartheta.hurst == 0.3);
}

TEST_CASE("GLE posterior: tau below dt approximately returns the prior") {
  // tau = 1e-5 << dt: the data cannot resolve the shortest memory timescale
  const double dt = 1.0 / 60.0;
  const int n = 300;
  const GleDecomposition d = gle_decompose(GleParams{2.0, 1e-5, 2});
  const AcfVector acf = gle_acf(d, dt, n);
  LocationScale ls;
  ls.sigma1 = 0.3;
  ls.sigma2 = 0.3;
  const IncrementMatrix x = increments(simulate_path(ls, acf, n, SplitRng(9)));

  GridSpec spec;
  spec.alpha_nodes = 40;
  spec.logtau_nodes = 50;
  const ThetaGrid grid = ThetaGrid::build(Family::gle, 2, spec, dt, n, 2);
  const PosteriorGrid post = grid_posterior(x, grid, PriorSpec::improper_default(), 2);
  const auto lt = post.node_logtau();
  const double mean_lt = post.weighted_mean(lt);
  double var_lt = 0.0;
  for (std::size_t i = 0; i < lt.size(); ++i)
    var_lt += post.norm_w[i] * sq(lt[i] - mean_lt);
  // prior: log tau ~ N(-6.91, 2.68^2); posterior keeps most of that spread
  CHECK(mean_lt < -4.5);
  CHECK(std::sqrt(var_lt) > 1.5);
}

TEST_CASE("grid guards") {
  GridSpec bad;
  bad.h_nodes = 0;
  CHECK_THROWS_AS(ThetaGrid::build(Family::fbm, 0, bad, 0.1, 4), usage_error);

  // tabulated prior node-count mismatch
  const ThetaGrid grid = ThetaGrid::build(Family::fbm, 0, small_fbm_grid(4), 0.1, 4);
  IncrementMatrix x;
  x.dt = 0.1;
  x.x.setZero(4, 2);
  x.x(0, 0) = 0.1;
  x.x(1, 1) = -0.1;
  x.x(2, 0) = 0.05;
  x.x(3, 1) = 0.2;
  const MniwParams mniw =
      MniwParams::make(Eigen::RowVector2d::Zero(), 1.0, Eigen::Matrix2d::Identity(), 6.0);
  CHECK_THROWS_AS(grid_posterior(x, grid, PriorSpec::tabulated({mniw}, {0.0})),
                  usage_error);
}
