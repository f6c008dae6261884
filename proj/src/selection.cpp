#include "subdiff/selection.hpp"

#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/transform.hpp"

namespace subdiff {

PreparedModel prepare_model(const ModelSpec& spec, double dt, int nlags, int threads) {
  PreparedModel pm{spec, ThetaGrid::build(spec.family, spec.n_modes, spec.grid,
                                          dt, nlags, threads)};
  return pm;
}

namespace {

void check_compare_priors(const std::vector<PreparedModel>& models) {
  bool any_pseudo = false, any_proper = false;
  for (const auto& m : models) {
    if (m.spec.prior.kind() == PriorSpec::Kind::improper_default)
      throw usage_error("compare: model " + m.spec.label() +
                        " has an improper prior; marginal likelihood undefined");
    if (m.spec.prior.pseudo())
      any_pseudo = true;
    else
      any_proper = true;
  }
  if (any_pseudo && any_proper)
    throw usage_error("compare: cannot mix pseudo-proper and proper priors");
  if (any_pseudo) {
    const MniwParams* first = models[0].spec.prior.fixed_mniw();
    for (const auto& m : models) {
      const MniwParams* p = m.spec.prior.fixed_mniw();
      if (!p || !first || p->nu != first->nu || (p->psi - first->psi).norm() != 0.0)
        throw usage_error(
            "compare: pseudo-proper priors must share (Psi, nu) so the dropped "
            "normalizer cancels");
    }
  }
}

}  // namespace

ComparisonResult compare(const IncrementMatrix& x,
                         const std::vector<PreparedModel>& models,
                         const std::vector<double>& prior_odds, int threads) {
  if (models.empty()) throw usage_error("compare: no models");
  if (prior_odds.size() != models.size())
    throw usage_error("compare: need one prior odds entry per model");
  double odds_sum = 0.0;
  for (double q : prior_odds) {
    if (!(q > 0.0)) throw usage_error("compare: prior odds must be positive");
    odds_sum += q;
  }
  check_compare_priors(models);

  ComparisonResult out;
  const std::size_t k = models.size();
  out.labels.resize(k);
  out.log_marginal.resize(k);
  out.prior_prob.resize(k);
  out.posterior_prob.resize(k);
  out.log_bayes_factor.resize(k, k);

  for (std::size_t i = 0; i < k; ++i) {
    out.labels[i] = models[i].spec.label();
    out.prior_prob[i] = prior_odds[i] / odds_sum;
    const PosteriorGrid g = grid_posterior(x, models[i].grid, models[i].spec.prior, threads);
    // pseudo-proper evidence is relative; the shared constant cancels below
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& node : g.nodes) mx = std::max(mx, node.logw);
    double s = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
      s += g.quad_w[j] * std::exp(g.nodes[j].logw - mx);
    out.log_marginal[i] = mx + std::log(s);
  }

  std::vector<double> log_post(k);
  for (std::size_t i = 0; i < k; ++i)
    log_post[i] = std::log(out.prior_prob[i]) + out.log_marginal[i];
  const double lse = log_sum_exp(log_post);
  for (std::size_t i = 0; i < k; ++i) out.posterior_prob[i] = std::exp(log_post[i] - lse);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      out.log_bayes_factor(i, j) = out.log_marginal[i] - out.log_marginal[j];
  return out;
}

SelectionStudyResult selection_study(const std::vector<PreparedModel>& models,
                                     int n_datasets, int n_steps, double dt,
                                     SplitRng rng, int threads) {
  for (const auto& m : models) {
    if (!m.spec.prior.proper())
      throw usage_error("selection_study: all model priors must be proper");
    if (m.spec.prior.kind() != PriorSpec::Kind::test_prior)
      throw usage_error("selection_study: generator priors must be conjugate-form "
                        "test priors (needed to draw parameters)");
  }
  const std::size_t k = models.size();

  // (generator g, dataset i) -> log marginal under every model
  struct DatasetResult {
    bool ok = false;
    std::vector<double> log_marginal;
  };
  std::vector<DatasetResult> results(k * static_cast<std::size_t>(n_datasets));

  parallel_for(results.size(), threads, [&](std::size_t task) {
    const std::size_t g = task / n_datasets;
    const std::size_t i = task % n_datasets;
    SplitRng task_rng = rng.child(task);
    DatasetResult& res = results[task];
    try {
      const TestPrior& tp = *models[g].spec.prior.test_prior();
      const ModelParams theta = tp.sample(task_rng);
      const AcfVector acf = model_acf(theta.vartheta, dt, n_steps);
      const Trajectory traj =
          simulate_path(theta.ls, acf, n_steps, task_rng.child(1), "study");
      const IncrementMatrix x = increments(traj);
      res.log_marginal.resize(k);
      for (std::size_t m = 0; m < k; ++m) {
        const PosteriorGrid post = grid_posterior(x, models[m].grid, models[m].spec.prior, 1);
        res.log_marginal[m] = post.log_marginal();
      }
      res.ok = true;
    } catch (const numeric_error&) {
      res.ok = false;  // recorded, excluded, counted
    }
  });

  SelectionStudyResult out;
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t a = 0; a < k; ++a) {
      if (a == g) continue;
      SelectionCell cell;
      cell.generator = models[g].spec.label();
      cell.alternative = models[a].spec.label();
      double sum_p = 0.0;
      int wins = 0;
      for (int i = 0; i < n_datasets; ++i) {
        const DatasetResult& res = results[g * n_datasets + i];
        if (!res.ok) {
          ++cell.n_failed;
          continue;
        }
        const double lbf = res.log_marginal[g] - res.log_marginal[a];
        const double p = 1.0 / (1.0 + std::exp(-lbf));  // equal prior odds
        sum_p += p;
        if (p > 0.5) ++wins;
        ++cell.n_ok;
      }
      if (cell.n_ok > 0) {
        cell.mean_prob_correct = sum_p / cell.n_ok;
        cell.win_rate = static_cast<double>(wins) / cell.n_ok;
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

PriorSensitivityResult prior_sensitivity_study(const Trajectory& base,
                                               int n_sim, int gle_modes,
                                               const GridSpec& fbm_grid_spec,
                                               const GridSpec& gle_grid_spec,
                                               SplitRng rng, int threads) {
  const IncrementMatrix x0 = increments(base);
  const int n = static_cast<int>(x0.n());
  const double dt = base.dt;

  const ThetaGrid fbm_grid =
      ThetaGrid::build(Family::fbm, 0, fbm_grid_spec, dt, n, threads);
  const ThetaGrid gle_grid =
      ThetaGrid::build(Family::gle, gle_modes, gle_grid_spec, dt, n, threads);

  // grid-argmax MLEs of the profile likelihood
  auto grid_mle = [&](const ThetaGrid& grid) {
    std::vector<double> ll(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
      ll[i] = profile_mle(x0, grid.acf(i)).loglik;
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (ll[i] > ll[best]) best = i;
    return best;
  };
  const std::size_t fbm_best = grid_mle(fbm_grid);
  const std::size_t gle_best = grid_mle(gle_grid);

  PriorSensitivityResult out;
  out.fbm_mle = SubdiffParams::fbm(fbm_grid.th1(fbm_best));
  out.gle_mle = SubdiffParams::gle(1.0 / gle_grid.th1(gle_best),
                                   std::exp(gle_grid.th2(gle_best)), gle_modes);
  const ProfileMle fbm_ls = profile_mle(x0, fbm_grid.acf(fbm_best));
  const ProfileMle gle_ls = profile_mle(x0, gle_grid.acf(gle_best));

  // near-improper conjugate prior of the sensitivity appendix
  Eigen::Matrix2d tiny = 1e-20 * Eigen::Matrix2d::Identity();
  const MniwParams ni_prior =
      MniwParams::make(Eigen::RowVector2d::Zero(), 1000.0, tiny, 1e-20);

  struct Task {
    std::string generator;
    const AcfVector* acf;
    LocationScale ls;
  };
  std::vector<Task> gens = {
      {"fbm", &fbm_grid.acf(fbm_best),
       LocationScale::from_sigma(fbm_ls.mu, fbm_ls.sigma)},
      {model_label(Family::gle, gle_modes), &gle_grid.acf(gle_best),
       LocationScale::from_sigma(gle_ls.mu, gle_ls.sigma)}};

  struct SimResult {
    std::vector<PriorSensitivityRow> rows;
  };
  std::vector<SimResult> sims(2 * static_cast<std::size_t>(n_sim));

  parallel_for(sims.size(), threads, [&](std::size_t task) {
    const std::size_t g = task / n_sim;
    const int i = static_cast<int>(task % n_sim);
    SplitRng task_rng = rng.child(task);
    const Trajectory traj =
        simulate_path(gens[g].ls, *gens[g].acf, n, task_rng, "s4");
    const IncrementMatrix x = increments(traj);

    auto log_marg = [&](const ThetaGrid& grid, const PriorSpec& prior) {
      const PosteriorGrid post = grid_posterior(x, grid, prior, 1);
      double mx = -std::numeric_limits<double>::infinity();
      for (const auto& node : post.nodes) mx = std::max(mx, node.logw);
      double s = 0.0;
      for (std::size_t j = 0; j < post.nodes.size(); ++j)
        s += post.quad_w[j] * std::exp(post.nodes[j].logw - mx);
      return mx + std::log(s);
    };

    // double-use prior: posterior of the same dataset under the improper default
    auto double_use = [&](const ThetaGrid& grid) {
      const PosteriorGrid first =
          grid_posterior(x, grid, PriorSpec::improper_default(), 1);
      std::vector<MniwParams> node_priors(first.nodes.size());
      std::vector<double> node_logdens(first.nodes.size());
      double mx = -std::numeric_limits<double>::infinity();
      for (const auto& node : first.nodes) mx = std::max(mx, node.logw);
      double z = 0.0;
      for (std::size_t j = 0; j < first.nodes.size(); ++j)
        z += first.quad_w[j] * std::exp(first.nodes[j].logw - mx);
      const double log_z = mx + std::log(z);
      for (std::size_t j = 0; j < first.nodes.size(); ++j) {
        node_priors[j] = first.nodes[j].cond;
        node_logdens[j] = first.nodes[j].logw - log_z;  // normalized density over vartheta
      }
      return PriorSpec::tabulated(std::move(node_priors), std::move(node_logdens));
    };

    const PriorSpec ni = PriorSpec::conjugate_fixed(ni_prior);
    const double lf_ni = log_marg(fbm_grid, ni);
    const double lg_ni = log_marg(gle_grid, ni);
    const double lf_2x = log_marg(fbm_grid, double_use(fbm_grid));
    const double lg_2x = log_marg(gle_grid, double_use(gle_grid));

    SimResult& res = sims[task];
    PriorSensitivityRow ni_row{gens[g].generator, "noninformative", i, 0.0, 0.0};
    ni_row.p_gle = 1.0 / (1.0 + std::exp(lf_ni - lg_ni));
    ni_row.p_fbm = 1.0 - ni_row.p_gle;
    PriorSensitivityRow du_row{gens[g].generator, "double-use", i, 0.0, 0.0};
    du_row.p_gle = 1.0 / (1.0 + std::exp(lf_2x - lg_2x));
    du_row.p_fbm = 1.0 - du_row.p_gle;
    res.rows = {ni_row, du_row};
  });

  for (auto& s : sims)
    for (auto& r : s.rows) out.rows.push_back(std::move(r));
  return out;
}

TestPrior make_synthetic_test_prior(Family family, int n_modes) {
  TestPrior tp;
  tp.family = family;
  tp.n_modes = n_modes;
  const int d = transformed_dim(family);
  tp.mean = Eigen::VectorXd::Zero(d);
  tp.cov = Eigen::MatrixXd::Zero(d, d);
  // location-scale block shared by both families:
  //   mu ~ N(0, 0.005^2), log sigma ~ N(log 0.2, 0.15^2), rho ~ N(0, 0.1^2)
  const int o = family == Family::fbm ? 1 : 2;
  tp.mean(o) = 0.0;
  tp.mean(o + 1) = 0.0;
  tp.mean(o + 2) = std::log(0.2);
  tp.mean(o + 3) = std::log(0.2);
  tp.mean(o + 4) = 0.0;
  tp.cov(o, o) = sq(0.005);
  tp.cov(o + 1, o + 1) = sq(0.005);
  tp.cov(o + 2, o + 2) = sq(0.15);
  tp.cov(o + 3, o + 3) = sq(0.15);
  tp.cov(o + 4, o + 4) = sq(0.1);
  if (family == Family::fbm) {
    tp.mean(0) = 0.35;
    tp.cov(0, 0) = sq(0.05);
  } else {
    // Moment-matched onto the Gaussian for (alpha log tau, log tau).
    // Small K gets a single visible OU memory (tau ~ 0.08 s, alpha ~ 0.5);
    // dense spectra (K >= 10) get the dispersed sub-frame regime (tau ~
    // 1e-3 s, alpha spread toward 1) where neighboring K are hard to tell
    // apart.
    const double ma = n_modes >= 10 ? 0.7 : 0.5;
    const double va = n_modes >= 10 ? sq(0.15) : sq(0.08);
    const double ml = n_modes >= 10 ? -6.9 : -2.5;
    const double vl = n_modes >= 10 ? sq(1.5) : sq(0.5);
    tp.mean(0) = ma * ml;
    tp.mean(1) = ml;
    tp.cov(0, 0) = ma * ma * vl + ml * ml * va + va * vl;
    tp.cov(0, 1) = tp.cov(1, 0) = ma * vl;
    tp.cov(1, 1) = vl;
  }
  return tp;
}

}  // namespace subdiff
