#ifndef SUBDIFF_CHECKS_HPP
#define SUBDIFF_CHECKS_HPP

#include <string>
#include <vector>

#include "subdiff/grid.hpp"
#include "subdiff/testprior.hpp"

namespace subdiff {

/// Predictive check outcome for one statistic.  p_strict uses T > T_obs,
/// p_weak uses ">="; they bracket p_tie, which breaks exact ties with a
/// seeded coin flip.
struct PredictiveResult {
  std::string statistic;
  double t_obs = 0.0;  // for realized discrepancies: mean observed value
  std::vector<double> replicates;
  double p_strict = 0.0;
  double p_weak = 0.0;
  double p_tie = 0.0;
  int r() const { return static_cast<int>(replicates.size()); }
};

/// Prior predictive MSD ensemble (the ergodicity-breaking fan): theta from
/// the prior, one simulated path per draw, detrended pathwise MSD.
std::vector<MsdCurve> prior_predictive_msd(const TestPrior& prior, int n_paths,
                                           int n_steps, double dt, int max_lag,
                                           SplitRng rng, int threads = 1);

/// Posterior predictive p-values for T = detrended pathwise MSD at the given
/// lag times, R replicates drawn via sample_posterior; the grid must be the
/// one the posterior was built on (its node ACFs drive the simulations).
std::vector<PredictiveResult> posterior_predictive_msd_pvalues(
    const IncrementMatrix& x_obs, const PosteriorGrid& post,
    const ThetaGrid& grid, const std::vector<double>& lag_times_s, int R,
    SplitRng rng, int threads = 1);

/// Realized-discrepancy KS check on the conditionally Gaussian residuals:
/// per posterior draw theta, compares KS(Z(x_sim, theta)) to
/// KS(Z(x_obs, theta)) against the exact standard normal, per residual
/// column (major/minor eigenvector of Sigma).
std::vector<PredictiveResult> residual_pvalue_ks(const IncrementMatrix& x_obs,
                                                 const PosteriorGrid& post,
                                                 const ThetaGrid& grid, int R,
                                                 SplitRng rng, int threads = 1);

/// Draws from p(Z | x_obs): residual matrices at posterior draws of theta.
std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> residual_draws(
    const IncrementMatrix& x_obs, const PosteriorGrid& post,
    const ThetaGrid& grid, int n_draws, SplitRng rng, int threads = 1);

/// Statistic helper: detrended pathwise MSD of an increment matrix at lag
/// time t (k = round(t / dt)); bit-identical to trajectory::pathwise_msd.
double msd_statistic(const IncrementMatrix& x, double lag_time_s);

Trajectory trajectory_from_increments(const IncrementMatrix& x,
                                      const std::string& id = "obs");

}  // namespace subdiff

#endif  // SUBDIFF_CHECKS_HPP
