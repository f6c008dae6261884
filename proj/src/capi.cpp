#include "subdiff/subdiff_c.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "subdiff/checks.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/hierarchical.hpp"
#include "subdiff/io.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/selection.hpp"
#include "subdiff/transform.hpp"
#include "subdiff/version.hpp"

using namespace subdiff;

struct sd_trajectory_t {
  Trajectory traj;
};
struct sd_prior_t {
  PriorSpec spec = PriorSpec::improper_default();
};
struct sd_posterior_t {
  PosteriorGrid grid;
};
struct sd_table_t {
  Table table;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return SD_OK;
  } catch (const usage_error& e) {
    return fail(SD_ERR_USAGE, e.what());
  } catch (const data_error& e) {
    return fail(SD_ERR_DATA, e.what());
  } catch (const numeric_error& e) {
    return fail(SD_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(SD_ERR_NUMERIC, e.what());
  }
}

Family to_family(int family) {
  if (family == SD_FAMILY_FBM) return Family::fbm;
  if (family == SD_FAMILY_GLE) return Family::gle;
  throw usage_error("unknown family code " + std::to_string(family));
}

GridSpec to_grid_spec(const sd_grid_spec* spec) {
  if (spec == nullptr) return GridSpec{};
  GridSpec g;
  g.h_nodes = spec->h_nodes;
  g.h_min = spec->h_min;
  g.h_max = spec->h_max;
  g.alpha_nodes = spec->alpha_nodes;
  g.logtau_nodes = spec->logtau_nodes;
  g.alpha_min = spec->alpha_min;
  g.alpha_max = spec->alpha_max;
  g.logtau_min = spec->logtau_min;
  g.logtau_max = spec->logtau_max;
  return g;
}

std::vector<std::string> provenance_lines(const char* provenance) {
  std::vector<std::string> lines;
  lines.push_back(std::string("subdiff ") + kVersion);
  if (provenance != nullptr && *provenance != '\0') {
    std::stringstream ss{std::string(provenance)};
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
  }
  return lines;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw usage_error(message);
}

void save_table(const Table& table, const char* path, const char* provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error(std::string("cannot write ") + path);
  table.write_csv(out, provenance_lines(provenance));
  if (!out) throw data_error(std::string("write failed for ") + path);
}

Table predictive_table(const std::vector<PredictiveResult>& results) {
  Table t;
  t.columns = {"statistic", "t_obs", "replicates", "p_strict", "p_weak", "p_tie"};
  for (const auto& r : results)
    t.add_row({r.statistic, format_full(r.t_obs), std::to_string(r.r()),
               format_full(r.p_strict), format_full(r.p_weak), format_full(r.p_tie)});
  return t;
}

PreparedModel prepare(int family, int n_modes, const sd_prior_t* prior,
                      const sd_grid_spec* grid, double dt, int nlags, int threads) {
  require(prior != nullptr, "null prior");
  ModelSpec spec;
  spec.family = to_family(family);
  spec.n_modes = n_modes;
  spec.prior = prior->spec;
  spec.grid = to_grid_spec(grid);
  return prepare_model(spec, dt, nlags, threads);
}

}  // namespace

extern "C" {

const char* sd_version(void) { return kVersion; }

const char* sd_last_error(void) { return g_last_error.c_str(); }

void sd_grid_spec_default(sd_grid_spec* spec) {
  const GridSpec g;
  spec->h_nodes = g.h_nodes;
  spec->h_min = g.h_min;
  spec->h_max = g.h_max;
  spec->alpha_nodes = g.alpha_nodes;
  spec->logtau_nodes = g.logtau_nodes;
  spec->alpha_min = g.alpha_min;
  spec->alpha_max = g.alpha_max;
  spec->logtau_min = g.logtau_min;
  spec->logtau_max = g.logtau_max;
}

int sd_trajectory_open(const char* path, double expected_dt, sd_trajectory_t** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<sd_trajectory_t>();
    handle->traj = ingest_csv_file(path, expected_dt);
    *out = handle.release();
  });
}

int sd_trajectory_from_arrays(const double* x, const double* y, size_t n_points,
                              double dt, const char* id, sd_trajectory_t** out) {
  return guarded([&] {
    require(x != nullptr && y != nullptr && out != nullptr, "null argument");
    if (n_points < 3) throw data_error("need at least 3 positions");
    if (!(dt > 0)) throw data_error("dt must be positive");
    auto handle = std::make_unique<sd_trajectory_t>();
    handle->traj.id = id == nullptr ? "" : id;
    handle->traj.dt = dt;
    handle->traj.positions.resize(static_cast<Eigen::Index>(n_points), 2);
    for (size_t i = 0; i < n_points; ++i) {
      handle->traj.positions(static_cast<Eigen::Index>(i), 0) = x[i];
      handle->traj.positions(static_cast<Eigen::Index>(i), 1) = y[i];
    }
    *out = handle.release();
  });
}

int sd_trajectory_save(const sd_trajectory_t* traj, const char* path,
                       const char* provenance) {
  return guarded([&] {
    require(traj != nullptr && path != nullptr, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error(std::string("cannot write ") + path);
    write_csv(out, traj->traj, provenance_lines(provenance));
    if (!out) throw data_error(std::string("write failed for ") + path);
  });
}

size_t sd_trajectory_size(const sd_trajectory_t* traj) {
  return traj == nullptr ? 0 : static_cast<size_t>(traj->traj.positions.rows());
}

double sd_trajectory_dt(const sd_trajectory_t* traj) {
  return traj == nullptr ? 0.0 : traj->traj.dt;
}

void sd_trajectory_free(sd_trajectory_t* traj) { delete traj; }

int sd_trajectory_msd(const sd_trajectory_t* traj, int max_lag, int detrend,
                      int sum_coords, sd_table_t** out) {
  return guarded([&] {
    require(traj != nullptr && out != nullptr, "null argument");
    const int lag = max_lag <= 0 ? default_max_lag(traj->traj) : max_lag;
    const MsdCurve msd =
        pathwise_msd(traj->traj, lag, detrend != 0, sum_coords != 0);
    auto handle = std::make_unique<sd_table_t>();
    handle->table.columns = {"lag_s", "msd_um2", "n_terms"};
    for (std::size_t k = 0; k < msd.lag_s.size(); ++k)
      handle->table.add_row({format_full(msd.lag_s[k]), format_full(msd.value[k]),
                             std::to_string(msd.n_terms[k])});
    *out = handle.release();
  });
}

int sd_simulate(int family, int n_modes, const double* vartheta,
                const double* mu2, const double* sigma3, int n_steps, double dt,
                uint64_t seed, sd_trajectory_t** out) {
  return guarded([&] {
    require(vartheta != nullptr && mu2 != nullptr && sigma3 != nullptr &&
                out != nullptr,
            "null argument");
    SubdiffParams p = to_family(family) == Family::fbm
                          ? SubdiffParams::fbm(vartheta[0])
                          : SubdiffParams::gle(vartheta[0], vartheta[1], n_modes);
    LocationScale ls;
    ls.mu << mu2[0], mu2[1];
    ls.sigma1 = sigma3[0];
    ls.sigma2 = sigma3[1];
    ls.rho = sigma3[2];
    const AcfVector acf = model_acf(p, dt, n_steps);
    auto handle = std::make_unique<sd_trajectory_t>();
    handle->traj = simulate_path(ls, acf, n_steps, SplitRng(seed), "sim");
    *out = handle.release();
  });
}

int sd_prior_default(double nu0, sd_prior_t** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    auto handle = std::make_unique<sd_prior_t>();
    handle->spec = PriorSpec::improper_default(nu0);
    *out = handle.release();
  });
}

int sd_prior_load(const char* path, sd_prior_t** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<sd_prior_t>();
    handle->spec = PriorSpec::from_test_prior(test_prior_from_json(read_text_file(path)));
    *out = handle.release();
  });
}

int sd_prior_synthetic(int family, int n_modes, sd_prior_t** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    auto handle = std::make_unique<sd_prior_t>();
    handle->spec = PriorSpec::from_test_prior(
        make_synthetic_test_prior(to_family(family), n_modes));
    *out = handle.release();
  });
}

int sd_prior_save(const sd_prior_t* prior, const char* path, const char* provenance) {
  return guarded([&] {
    require(prior != nullptr && path != nullptr, "null argument");
    const TestPrior* tp = prior->spec.test_prior();
    require(tp != nullptr, "only conjugate-form test priors serialize to file");
    write_text_file(path, to_json(*tp, provenance_lines(provenance)));
  });
}

void sd_prior_free(sd_prior_t* prior) { delete prior; }

int sd_fit(const sd_trajectory_t* traj, int family, int n_modes,
           const sd_prior_t* prior, const sd_grid_spec* grid, int threads,
           sd_posterior_t** out) {
  return guarded([&] {
    require(traj != nullptr && out != nullptr, "null argument");
    const IncrementMatrix x = increments(traj->traj);
    const PreparedModel pm = prepare(family, n_modes, prior, grid, x.dt,
                                     static_cast<int>(x.n()), threads);
    auto handle = std::make_unique<sd_posterior_t>();
    handle->grid = grid_posterior(x, pm.grid, pm.spec.prior, threads);
    *out = handle.release();
  });
}

int sd_posterior_save(const sd_posterior_t* post, const char* path,
                      const char* provenance) {
  return guarded([&] {
    require(post != nullptr && path != nullptr, "null argument");
    write_text_file(path, to_json(post->grid, provenance_lines(provenance)));
  });
}

int sd_posterior_load(const char* path, sd_posterior_t** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<sd_posterior_t>();
    handle->grid = posterior_grid_from_json(read_text_file(path));
    *out = handle.release();
  });
}

int sd_posterior_summary(const sd_posterior_t* post, sd_table_t** out) {
  return guarded([&] {
    require(post != nullptr && out != nullptr, "null argument");
    const PosteriorGrid& g = post->grid;
    auto handle = std::make_unique<sd_table_t>();
    handle->table.columns = {"parameter", "mean", "q025", "q975"};
    const auto alpha = g.node_alpha();
    handle->table.add_row({"alpha", format_full(g.weighted_mean(alpha)),
                           format_full(g.weighted_quantile(alpha, 0.025)),
                           format_full(g.weighted_quantile(alpha, 0.975))});
    if (g.family == Family::gle) {
      const auto lt = g.node_logtau();
      std::vector<double> tau(lt.size());
      for (std::size_t i = 0; i < lt.size(); ++i) tau[i] = std::exp(lt[i]);
      handle->table.add_row({"tau", format_full(g.weighted_mean(tau)),
                             format_full(g.weighted_quantile(tau, 0.025)),
                             format_full(g.weighted_quantile(tau, 0.975))});
    }
    *out = handle.release();
  });
}

int sd_posterior_log_marginal(const sd_posterior_t* post, double* out) {
  return guarded([&] {
    require(post != nullptr && out != nullptr, "null argument");
    *out = post->grid.log_marginal();
  });
}

void sd_posterior_free(sd_posterior_t* post) { delete post; }

int sd_compare(const sd_trajectory_t* traj, size_t n_models, const int* families,
               const int* n_modes, const sd_prior_t* const* priors,
               const sd_grid_spec* const* grids, const double* prior_odds,
               int threads, sd_table_t** marginals, sd_table_t** bayes_factors) {
  return guarded([&] {
    require(traj != nullptr && families != nullptr && n_modes != nullptr &&
                priors != nullptr && prior_odds != nullptr && marginals != nullptr,
            "null argument");
    const IncrementMatrix x = increments(traj->traj);
    std::vector<PreparedModel> models;
    models.reserve(n_models);
    for (size_t i = 0; i < n_models; ++i)
      models.push_back(prepare(families[i], n_modes[i], priors[i],
                               grids == nullptr ? nullptr : grids[i], x.dt,
                               static_cast<int>(x.n()), threads));
    const ComparisonResult res =
        compare(x, models, std::vector<double>(prior_odds, prior_odds + n_models),
                threads);

    auto mt = std::make_unique<sd_table_t>();
    mt->table.columns = {"model", "log_marginal", "prior_prob", "posterior_prob"};
    for (size_t i = 0; i < n_models; ++i)
      mt->table.add_row({res.labels[i], format_full(res.log_marginal[i]),
                         format_full(res.prior_prob[i]),
                         format_full(res.posterior_prob[i])});
    *marginals = mt.release();

    if (bayes_factors != nullptr) {
      auto bt = std::make_unique<sd_table_t>();
      bt->table.columns = {"model_i", "model_j", "log_bf_ij"};
      for (size_t i = 0; i < n_models; ++i)
        for (size_t j = 0; j < n_models; ++j)
          if (i != j)
            bt->table.add_row({res.labels[i], res.labels[j],
                               format_full(res.log_bayes_factor(i, j))});
      *bayes_factors = bt.release();
    }
  });
}

int sd_hier_fit(const sd_trajectory_t* const* trajs, size_t n_trajs, int family,
                int n_modes, const sd_grid_spec* grid, int m_draws, int n_iter,
                int n_burn, double omega_exponent, uint64_t seed, int threads,
                const char* chain_path, const char* chain_provenance,
                sd_prior_t** test_prior, sd_table_t** diagnostics) {
  return guarded([&] {
    require(trajs != nullptr && test_prior != nullptr, "null argument");
    require(n_trajs > 0, "no trajectories");
    std::vector<IncrementMatrix> xs;
    xs.reserve(n_trajs);
    const double dt = trajs[0]->traj.dt;
    Eigen::Index n = trajs[0]->traj.n_increments();
    for (size_t j = 0; j < n_trajs; ++j) {
      require(trajs[j] != nullptr, "null trajectory");
      if (std::abs(trajs[j]->traj.dt - dt) > 1e-9 * dt)
        throw data_error("trajectories must share dt for the hierarchical fit");
      n = std::max(n, trajs[j]->traj.n_increments());
      xs.push_back(increments(trajs[j]->traj));
    }
    const Family fam = to_family(family);
    const ThetaGrid tg = ThetaGrid::build(fam, n_modes, to_grid_spec(grid), dt,
                                          static_cast<int>(n), threads);
    SplitRng rng(seed);
    const auto approxes = independent_posteriors(xs, tg, PriorSpec::improper_default(),
                                                 m_draws, rng.child(1), threads);
    GibbsOptions opts;
    opts.n_iter = n_iter;
    opts.n_burn = n_burn;
    opts.omega_exponent = omega_exponent;
    const double nu0 = 0.0;
    const HierDraws chain = gibbs_fit(
        approxes,
        [fam, nu0](const Eigen::VectorXd& v) { return log_g0_transformed(fam, v, nu0); },
        opts, rng.child(2));
    const auto draws = test_prior_draws(chain, rng.child(3));
    const TestPrior tp = conjugate_approx(draws, fam, n_modes);

    if (chain_path != nullptr && *chain_path != '\0')
      write_text_file(chain_path, to_json(chain, provenance_lines(chain_provenance)));

    auto prior_handle = std::make_unique<sd_prior_t>();
    prior_handle->spec = PriorSpec::from_test_prior(tp);

    if (diagnostics != nullptr) {
      auto dt_table = std::make_unique<sd_table_t>();
      dt_table->table.columns = {"quantity", "value"};
      dt_table->table.add_row({"n_train", std::to_string(n_trajs)});
      dt_table->table.add_row({"acceptance_rate", format_full(chain.acceptance_rate)});
      for (std::size_t k = 0; k < chain.ess_lambda0.size(); ++k)
        dt_table->table.add_row({"ess_lambda0_" + std::to_string(k),
                                 format_full(chain.ess_lambda0[k])});
      *diagnostics = dt_table.release();
    }
    *test_prior = prior_handle.release();
  });
}

int sd_check_msd(const sd_trajectory_t* traj, int family, int n_modes,
                 const sd_prior_t* prior, const sd_grid_spec* grid,
                 const double* lag_times_s, size_t n_lags, int replicates,
                 uint64_t seed, int threads, sd_table_t** out) {
  return guarded([&] {
    require(traj != nullptr && lag_times_s != nullptr && out != nullptr,
            "null argument");
    const IncrementMatrix x = increments(traj->traj);
    const PreparedModel pm = prepare(family, n_modes, prior, grid, x.dt,
                                     static_cast<int>(x.n()), threads);
    require(pm.spec.prior.proper(), "predictive checks need a proper prior");
    const PosteriorGrid post = grid_posterior(x, pm.grid, pm.spec.prior, threads);
    const auto results = posterior_predictive_msd_pvalues(
        x, post, pm.grid, std::vector<double>(lag_times_s, lag_times_s + n_lags),
        replicates, SplitRng(seed), threads);
    auto handle = std::make_unique<sd_table_t>();
    handle->table = predictive_table(results);
    *out = handle.release();
  });
}

int sd_check_ks(const sd_trajectory_t* traj, int family, int n_modes,
                const sd_prior_t* prior, const sd_grid_spec* grid, int replicates,
                uint64_t seed, int threads, sd_table_t** out) {
  return guarded([&] {
    require(traj != nullptr && out != nullptr, "null argument");
    const IncrementMatrix x = increments(traj->traj);
    const PreparedModel pm = prepare(family, n_modes, prior, grid, x.dt,
                                     static_cast<int>(x.n()), threads);
    require(pm.spec.prior.proper(), "predictive checks need a proper prior");
    const PosteriorGrid post = grid_posterior(x, pm.grid, pm.spec.prior, threads);
    const auto results =
        residual_pvalue_ks(x, post, pm.grid, replicates, SplitRng(seed), threads);
    auto handle = std::make_unique<sd_table_t>();
    handle->table = predictive_table(results);
    *out = handle.release();
  });
}

int sd_residual_draws(const sd_trajectory_t* traj, int family, int n_modes,
                      const sd_prior_t* prior, const sd_grid_spec* grid,
                      int n_draws, uint64_t seed, int threads, sd_table_t** out) {
  return guarded([&] {
    require(traj != nullptr && out != nullptr, "null argument");
    const IncrementMatrix x = increments(traj->traj);
    const PreparedModel pm = prepare(family, n_modes, prior, grid, x.dt,
                                     static_cast<int>(x.n()), threads);
    const PosteriorGrid post = grid_posterior(x, pm.grid, pm.spec.prior, threads);
    const auto draws =
        residual_draws(x, post, pm.grid, n_draws, SplitRng(seed), threads);
    auto handle = std::make_unique<sd_table_t>();
    handle->table.columns = {"draw", "index", "z1", "z2"};
    for (std::size_t r = 0; r < draws.size(); ++r)
      for (Eigen::Index i = 0; i < draws[r].rows(); ++i)
        handle->table.add_row({std::to_string(r), std::to_string(i),
                               format_full(draws[r](i, 0)),
                               format_full(draws[r](i, 1))});
    *out = handle.release();
  });
}

int sd_prior_predictive_msd(const sd_prior_t* test_prior, int n_paths,
                            int n_steps, double dt, int max_lag, uint64_t seed,
                            int threads, sd_table_t** out) {
  return guarded([&] {
    require(test_prior != nullptr && out != nullptr, "null argument");
    const TestPrior* tp = test_prior->spec.test_prior();
    require(tp != nullptr, "prior predictive needs a conjugate-form test prior");
    const int lag = max_lag <= 0 ? n_steps / 2 : max_lag;
    const auto curves = prior_predictive_msd(*tp, n_paths, n_steps, dt, lag,
                                             SplitRng(seed), threads);
    auto handle = std::make_unique<sd_table_t>();
    handle->table.columns = {"path", "lag_s", "msd_um2"};
    for (std::size_t p = 0; p < curves.size(); ++p)
      for (std::size_t k = 0; k < curves[p].lag_s.size(); ++k)
        handle->table.add_row({std::to_string(p), format_full(curves[p].lag_s[k]),
                               format_full(curves[p].value[k])});
    *out = handle.release();
  });
}

int sd_experiment_table1(size_t n_models, const int* families, const int* n_modes,
                         const sd_prior_t* const* test_priors,
                         const sd_grid_spec* const* grids, int n_datasets,
                         int n_steps, double dt, uint64_t seed, int threads,
                         sd_table_t** out) {
  return guarded([&] {
    require(families != nullptr && n_modes != nullptr && test_priors != nullptr &&
                out != nullptr,
            "null argument");
    std::vector<PreparedModel> models;
    for (size_t i = 0; i < n_models; ++i)
      models.push_back(prepare(families[i], n_modes[i], test_priors[i],
                               grids == nullptr ? nullptr : grids[i], dt, n_steps,
                               threads));
    const SelectionStudyResult res =
        selection_study(models, n_datasets, n_steps, dt, SplitRng(seed), threads);
    auto handle = std::make_unique<sd_table_t>();
    handle->table.columns = {"generator", "alternative", "mean_prob_correct",
                             "win_rate", "n_ok", "n_failed"};
    for (const auto& cell : res.cells)
      handle->table.add_row({cell.generator, cell.alternative,
                             format_full(cell.mean_prob_correct),
                             format_full(cell.win_rate), std::to_string(cell.n_ok),
                             std::to_string(cell.n_failed)});
    *out = handle.release();
  });
}

int sd_experiment_s4(const sd_trajectory_t* base, int n_sim, int gle_modes,
                     const sd_grid_spec* fbm_grid, const sd_grid_spec* gle_grid,
                     uint64_t seed, int threads, sd_table_t** out) {
  return guarded([&] {
    require(base != nullptr && out != nullptr, "null argument");
    const PriorSensitivityResult res = prior_sensitivity_study(
        base->traj, n_sim, gle_modes, to_grid_spec(fbm_grid), to_grid_spec(gle_grid),
        SplitRng(seed), threads);
    auto handle = std::make_unique<sd_table_t>();
    handle->table.columns = {"generator", "prior", "dataset", "p_fbm", "p_gle"};
    for (const auto& row : res.rows)
      handle->table.add_row({row.generator, row.prior, std::to_string(row.dataset),
                             format_full(row.p_fbm), format_full(row.p_gle)});
    *out = handle.release();
  });
}

size_t sd_table_num_rows(const sd_table_t* table) {
  return table == nullptr ? 0 : table->table.rows.size();
}

size_t sd_table_num_cols(const sd_table_t* table) {
  return table == nullptr ? 0 : table->table.columns.size();
}

const char* sd_table_column_name(const sd_table_t* table, size_t col) {
  if (table == nullptr || col >= table->table.columns.size()) return nullptr;
  return table->table.columns[col].c_str();
}

const char* sd_table_cell(const sd_table_t* table, size_t row, size_t col) {
  if (table == nullptr || row >= table->table.rows.size() ||
      col >= table->table.rows[row].size())
    return nullptr;
  return table->table.rows[row][col].c_str();
}

int sd_table_save_csv(const sd_table_t* table, const char* path,
                      const char* provenance) {
  return guarded([&] {
    require(table != nullptr && path != nullptr, "null argument");
    save_table(table->table, path, provenance);
  });
}

void sd_table_free(sd_table_t* table) { delete table; }

}  // extern "C"
