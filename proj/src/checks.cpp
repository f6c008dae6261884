#include "subdiff/checks.hpp"

#include <array>
#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/parallel.hpp"

namespace subdiff {

Trajectory trajectory_from_increments(const IncrementMatrix& x, const std::string& id) {
  Trajectory traj;
  traj.id = id;
  traj.dt = x.dt;
  traj.positions.setZero(x.n() + 1, 2);
  for (Eigen::Index i = 0; i < x.n(); ++i)
    traj.positions.row(i + 1) = traj.positions.row(i) + x.x.row(i);
  return traj;
}

double msd_statistic(const IncrementMatrix& x, double lag_time_s) {
  const int k = static_cast<int>(std::lround(lag_time_s / x.dt));
  if (k < 1 || k > x.n())
    throw usage_error("MSD statistic lag outside [dt, N dt]");
  const Trajectory traj = trajectory_from_increments(x);
  const MsdCurve msd = pathwise_msd(traj, k, /*detrend=*/true);
  return msd.value.back();
}

std::vector<MsdCurve> prior_predictive_msd(const TestPrior& prior, int n_paths,
                                           int n_steps, double dt, int max_lag,
                                           SplitRng rng, int threads) {
  std::vector<MsdCurve> out(n_paths);
  parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t i) {
    SplitRng task_rng = rng.child(i);
    const ModelParams theta = prior.sample(task_rng);
    const AcfVector acf = model_acf(theta.vartheta, dt, n_steps);
    const Trajectory traj =
        simulate_path(theta.ls, acf, n_steps, task_rng.child(1), "prior-pred");
    out[i] = pathwise_msd(traj, max_lag, /*detrend=*/true);
  });
  return out;
}

namespace {

struct ReplicateDraws {
  std::vector<PosteriorDraw> draws;
};

PredictiveResult make_result(const std::string& name, double t_obs,
                             std::vector<double> reps,
                             const std::vector<double>& t_obs_per_rep,
                             SplitRng& tie_rng) {
  PredictiveResult res;
  res.statistic = name;
  res.t_obs = t_obs;
  res.replicates = std::move(reps);
  int strict = 0, weak = 0, tie_count = 0;
  for (std::size_t r = 0; r < res.replicates.size(); ++r) {
    const double ref = t_obs_per_rep.empty() ? t_obs : t_obs_per_rep[r];
    if (res.replicates[r] > ref) ++strict;
    if (res.replicates[r] >= ref) ++weak;
    if (res.replicates[r] == ref) ++tie_count;
  }
  const int n = static_cast<int>(res.replicates.size());
  res.p_strict = static_cast<double>(strict) / n;
  res.p_weak = static_cast<double>(weak) / n;
  int tie_up = 0;
  for (int t = 0; t < tie_count; ++t)
    if (tie_rng.uniform() < 0.5) ++tie_up;
  res.p_tie = static_cast<double>(strict + tie_up) / n;
  return res;
}

}  // namespace

std::vector<PredictiveResult> posterior_predictive_msd_pvalues(
    const IncrementMatrix& x_obs, const PosteriorGrid& post,
    const ThetaGrid& grid, const std::vector<double>& lag_times_s, int R,
    SplitRng rng, int threads) {
  if (R < 1) throw usage_error("need R >= 1 replicates");
  const auto draws = sample_posterior(post, R, rng.child(0));
  const int n_steps = static_cast<int>(x_obs.n());

  std::vector<std::vector<double>> t_sim(lag_times_s.size(),
                                         std::vector<double>(R));
  parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
    const PosteriorDraw& d = draws[r];
    const Trajectory sim = simulate_path(d.params.ls, grid.acf(d.node), n_steps,
                                         rng.child(1000 + r), "post-pred");
    const IncrementMatrix x_sim = increments(sim);
    for (std::size_t s = 0; s < lag_times_s.size(); ++s)
      t_sim[s][r] = msd_statistic(x_sim, lag_times_s[s]);
  });

  std::vector<PredictiveResult> out;
  SplitRng tie_rng = rng.child(2);
  for (std::size_t s = 0; s < lag_times_s.size(); ++s) {
    const double t_obs = msd_statistic(x_obs, lag_times_s[s]);
    out.push_back(make_result("msd@" + format_full(lag_times_s[s]) + "s", t_obs,
                              std::move(t_sim[s]), {}, tie_rng));
  }
  return out;
}

std::vector<PredictiveResult> residual_pvalue_ks(const IncrementMatrix& x_obs,
                                                 const PosteriorGrid& post,
                                                 const ThetaGrid& grid, int R,
                                                 SplitRng rng, int threads) {
  if (R < 1) throw usage_error("need R >= 1 replicates");
  const auto draws = sample_posterior(post, R, rng.child(0));
  const int n_steps = static_cast<int>(x_obs.n());

  std::vector<std::array<double, 2>> ks_obs(R), ks_sim(R);
  parallel_for(static_cast<std::size_t>(R), threads, [&](std::size_t r) {
    const PosteriorDraw& d = draws[r];
    const AcfVector& acf = grid.acf(d.node);
    const auto z_obs = residuals(x_obs, d.params.ls, acf);
    const Trajectory sim =
        simulate_path(d.params.ls, acf, n_steps, rng.child(1000 + r), "ks");
    const auto z_sim = residuals(increments(sim), d.params.ls, acf);
    for (int c = 0; c < 2; ++c) {
      std::vector<double> col_obs(z_obs.rows()), col_sim(z_sim.rows());
      for (Eigen::Index i = 0; i < z_obs.rows(); ++i) {
        col_obs[i] = z_obs(i, c);
        col_sim[i] = z_sim(i, c);
      }
      ks_obs[r][c] = ks_distance_std_normal(std::move(col_obs));
      ks_sim[r][c] = ks_distance_std_normal(std::move(col_sim));
    }
  });

  std::vector<PredictiveResult> out;
  SplitRng tie_rng = rng.child(2);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> sims(R), obs(R);
    double mean_obs = 0.0;
    for (int r = 0; r < R; ++r) {
      sims[r] = ks_sim[r][c];
      obs[r] = ks_obs[r][c];
      mean_obs += obs[r];
    }
    mean_obs /= R;
    out.push_back(make_result("ks_z" + std::to_string(c + 1), mean_obs,
                              std::move(sims), obs, tie_rng));
  }
  return out;
}

std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> residual_draws(
    const IncrementMatrix& x_obs, const PosteriorGrid& post,
    const ThetaGrid& grid, int n_draws, SplitRng rng, int threads) {
  const auto draws = sample_posterior(post, n_draws, rng.child(0));
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> out(n_draws);
  parallel_for(static_cast<std::size_t>(n_draws), threads, [&](std::size_t r) {
    out[r] = residuals(x_obs, draws[r].params.ls, grid.acf(draws[r].node));
  });
  return out;
}

}  // namespace subdiff
