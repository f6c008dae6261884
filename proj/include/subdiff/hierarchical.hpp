#ifndef SUBDIFF_HIERARCHICAL_HPP
#define SUBDIFF_HIERARCHICAL_HPP

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <vector>

#include "subdiff/grid.hpp"
#include "subdiff/testprior.hpp"

namespace subdiff {

/// Gaussian summary of one trajectory's independent posterior in transformed
/// coordinates.
struct NormalApprox {
  Eigen::VectorXd lambda;  // d
  Eigen::MatrixXd omega;   // d x d, positive definite
};

/// Step 1-2: independent grid posteriors per trajectory (parallel), m draws
/// each, transformed-coordinate sample mean and covariance.  The covariance
/// is ridge-regularized when its smallest eigenvalue falls below
/// 1e-12 * trace.
std::vector<NormalApprox> independent_posteriors(
    const std::vector<IncrementMatrix>& xs, const ThetaGrid& grid,
    const PriorSpec& prior, int m_draws, SplitRng rng, int threads = 1);

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct GibbsOptions {
  // Hyperprior exponent omega in pi(l0, O0) propto |O0|^{-(omega+d+1)/2};
  // NaN selects the default -(d+1), the flat prior on Omega_0.  Exponents
  // above -d make an Omega_0 eigenvalue non-integrable at zero, so the
  // chain collapses along any direction whose between-trajectory variance
  // the data cannot resolve; the flat prior keeps the posterior proper
  // (conditionals need T > 2d + 1).
  double omega_exponent = std::numeric_limits<double>::quiet_NaN();
  int n_iter = 10000;  // retained iterations
  int n_burn = 2000;
  bool use_lambda_means = false;  // literal-paper S built from lambda_j
  bool store_theta = false;
};

/// Sampled hyperparameter chain (post burn-in) with diagnostics.
struct HierDraws {
  int d = 0;
  double omega_exponent = 0.0;
  std::vector<Eigen::VectorXd> lambda0;
  std::vector<Eigen::MatrixXd> omega0;
  std::vector<Eigen::MatrixXd> theta;  // optional, T x d per iteration
  double acceptance_rate = 1.0;
  std::vector<double> ess_lambda0;  // effective sample size per component
};

/// Step 3: blocked Gibbs sampler of the multilevel normal model
///   theta_j | l0, O0 ~ N(B_j l0 + (I - B_j) lambda_j, (I - B_j) Omega_j),
///     B_j = Omega_j (Omega_j + O0)^{-1}
///   O0 | theta ~ Inv-Wishart(sum_j (t_j - tbar)(t_j - tbar)', T - 1 + omega)
///   l0 | O0, theta ~ N(tbar, O0 / T)
/// with a Metropolis correction (accept = min{1, g0(old)/g0(new)}) when the
/// first-stage prior g0 is not flat in the transformed coordinates.
HierDraws gibbs_fit(const std::vector<NormalApprox>& approxes,
                    const LogDensity& log_g0, const GibbsOptions& opts,
                    SplitRng rng);

/// Step 4: one theta~ ~ N(l0, O0) per retained hyperparameter state.
std::vector<Eigen::VectorXd> test_prior_draws(const HierDraws& h, SplitRng rng);

/// Step 5: Gaussian fit to the theta~ draws, reported as a conjugate-form
/// TestPrior.  Needs at least 10^3 samples.
TestPrior conjugate_approx(const std::vector<Eigen::VectorXd>& samples,
                           Family family, int n_modes);

/// d-dimensional Inv-Wishart(Psi, nu) draw (Bartlett construction).
Eigen::MatrixXd sample_inverse_wishart_d(const Eigen::MatrixXd& psi, double nu,
                                         SplitRng& rng);

}  // namespace subdiff

#endif  // SUBDIFF_HIERARCHICAL_HPP
