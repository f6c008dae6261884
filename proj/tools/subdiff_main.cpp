// Command-line front end; links the C API only.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subdiff/subdiff_c.h"

namespace fs = std::filesystem;

namespace {

struct TrajDeleter {
  void operator()(sd_trajectory_t* p) const { sd_trajectory_free(p); }
};
struct PriorDeleter {
  void operator()(sd_prior_t* p) const { sd_prior_free(p); }
};
struct PosteriorDeleter {
  void operator()(sd_posterior_t* p) const { sd_posterior_free(p); }
};
struct TableDeleter {
  void operator()(sd_table_t* p) const { sd_table_free(p); }
};
using TrajPtr = std::unique_ptr<sd_trajectory_t, TrajDeleter>;
using PriorPtr = std::unique_ptr<sd_prior_t, PriorDeleter>;
using PosteriorPtr = std::unique_ptr<sd_posterior_t, PosteriorDeleter>;
using TablePtr = std::unique_ptr<sd_table_t, TableDeleter>;

[[noreturn]] void die(int status) {
  std::cerr << "subdiff: error: " << sd_last_error() << "\n";
  std::exit(status == SD_OK ? 3 : status);
}

void check(int status) {
  if (status != SD_OK) die(status);
}

std::string g_config_line;  // full invocation, embedded in every output file

std::string build_config_line(int argc, char** argv) {
  std::ostringstream ss;
  ss << "config:";
  for (int i = 1; i < argc; ++i) ss << ' ' << argv[i];
  return ss.str();
}

int default_threads() {
  if (const char* env = std::getenv("SUBDIFF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // library picks hardware concurrency
}

struct GridFlags {
  sd_grid_spec spec;
  void attach(CLI::App* cmd) {
    sd_grid_spec_default(&spec);
    cmd->add_option("--grid-h-nodes", spec.h_nodes, "fBM grid: H node count");
    cmd->add_option("--grid-h-min", spec.h_min, "fBM grid: smallest H");
    cmd->add_option("--grid-h-max", spec.h_max, "fBM grid: largest H");
    cmd->add_option("--grid-alpha-nodes", spec.alpha_nodes, "GLE grid: alpha node count");
    cmd->add_option("--grid-alpha-min", spec.alpha_min, "GLE grid: smallest alpha");
    cmd->add_option("--grid-alpha-max", spec.alpha_max, "GLE grid: largest alpha");
    cmd->add_option("--grid-logtau-nodes", spec.logtau_nodes, "GLE grid: log tau node count");
    cmd->add_option("--grid-logtau-min", spec.logtau_min, "GLE grid: smallest log tau");
    cmd->add_option("--grid-logtau-max", spec.logtau_max, "GLE grid: largest log tau");
  }
};

struct ModelArg {
  int family = SD_FAMILY_FBM;
  int modes = 0;
};

// "fbm" or "gle:K"
ModelArg parse_model(const std::string& text) {
  ModelArg m;
  if (text == "fbm") {
    m.family = SD_FAMILY_FBM;
    return m;
  }
  if (text.rfind("gle", 0) == 0) {
    m.family = SD_FAMILY_GLE;
    const auto colon = text.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--models", "gle needs a mode count, e.g. gle:200");
    m.modes = std::stoi(text.substr(colon + 1));
    if (m.modes < 1) throw CLI::ValidationError("--models", "gle mode count must be >= 1");
    return m;
  }
  throw CLI::ValidationError("model", "unknown model '" + text + "' (fbm or gle:K)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

PriorPtr load_prior(const std::string& arg, int family, int modes, double nu0) {
  sd_prior_t* p = nullptr;
  if (arg.empty() || arg == "default") {
    check(sd_prior_default(nu0, &p));
  } else if (arg == "synthetic") {
    check(sd_prior_synthetic(family, modes, &p));
  } else {
    check(sd_prior_load(arg.c_str(), &p));
  }
  return PriorPtr(p);
}

std::vector<std::string> collect_csvs(const std::string& input) {
  std::vector<std::string> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input))
      if (entry.is_regular_file() && entry.path().extension() == ".csv")
        files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "subdiff: error: no .csv files in " << input << "\n";
      std::exit(SD_ERR_DATA);
    }
  } else {
    files.push_back(input);
  }
  return files;
}

void save_table_or_die(const sd_table_t* table, const std::string& path) {
  check(sd_table_save_csv(table, path.c_str(), g_config_line.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian fitting, comparison and assessment of subdiffusive "
               "models (fBM / generalized-Rouse GLE) for 2-D particle tracks"};
  app.require_subcommand(1);
  g_config_line = build_config_line(argc, argv);

  int threads = default_threads();
  app.add_option("--threads", threads, "worker thread budget (0 = all cores)");

  // ---- msd ----
  auto* msd = app.add_subcommand("msd", "pathwise MSD of trajectory CSV file(s)");
  std::string msd_input, msd_output_dir = ".";
  int msd_max_lag = 0;
  bool msd_detrend = false, msd_sum = false;
  double msd_dt = -1.0;
  msd->add_option("--input", msd_input, "trajectory CSV or directory")->required();
  msd->add_option("--output", msd_output_dir, "output directory");
  msd->add_option("--max-lag", msd_max_lag, "largest lag (frames); default N/2");
  msd->add_option("--dt", msd_dt, "sampling interval for frame-indexed files (s)");
  msd->add_flag("--detrend", msd_detrend, "subtract the mean increment first");
  msd->add_flag("--sum", msd_sum, "sum the two 1-D statistics instead of averaging");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "exact sampler of the location-scale model");
  std::string sim_model = "fbm", sim_output;
  int sim_modes = 0, sim_steps = 1800, sim_npaths = 1;
  double sim_hurst = 0.35, sim_gamma = 2.0, sim_tau = 1e-3;
  double sim_mu1 = 0, sim_mu2 = 0, sim_s1 = 0.2, sim_s2 = 0.2, sim_rho = 0;
  double sim_dt = 1.0 / 60.0;
  std::uint64_t sim_seed = 0;
  sim->add_option("--model", sim_model, "fbm or gle:K")->required();
  sim->add_option("--hurst", sim_hurst, "fBM Hurst exponent");
  sim->add_option("--gamma", sim_gamma, "GLE spectrum exponent");
  sim->add_option("--tau", sim_tau, "GLE shortest relaxation time (s)");
  sim->add_option("--mu1", sim_mu1, "drift, first coordinate (um/s)");
  sim->add_option("--mu2", sim_mu2, "drift, second coordinate (um/s)");
  sim->add_option("--sigma1", sim_s1, "scale sigma_1 (um)");
  sim->add_option("--sigma2", sim_s2, "scale sigma_2 (um)");
  sim->add_option("--rho", sim_rho, "scale correlation");
  sim->add_option("--n-steps", sim_steps, "number of increments N");
  sim->add_option("--n-paths", sim_npaths, "number of independent paths");
  sim->add_option("--dt", sim_dt, "sampling interval (s)");
  sim->add_option("--seed", sim_seed, "RNG seed")->required();
  sim->add_option("--output", sim_output, "output CSV (suffix _k for multiple)")->required();

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "grid posterior of one model on one trajectory");
  std::string fit_input, fit_model = "fbm", fit_prior = "default", fit_output,
              fit_summary;
  double fit_nu0 = 0.0, fit_dt = -1.0;
  GridFlags fit_grid;
  fit->add_option("--input", fit_input, "trajectory CSV")->required();
  fit->add_option("--model", fit_model, "fbm or gle:K")->required();
  fit->add_option("--prior", fit_prior, "default | synthetic | test-prior JSON path");
  fit->add_option("--nu0", fit_nu0, "improper-prior nu (default 0, |Sigma|^{-3/2})");
  fit->add_option("--dt", fit_dt, "sampling interval for frame-indexed files (s)");
  fit->add_option("--output", fit_output, "posterior grid JSON")->required();
  fit->add_option("--summary", fit_summary, "posterior summary CSV");
  fit_grid.attach(fit);

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "posterior model probabilities via marginal likelihoods");
  std::string cmp_input, cmp_models, cmp_priors, cmp_odds, cmp_marg, cmp_bf;
  double cmp_dt = -1.0;
  GridFlags cmp_grid;
  cmp->add_option("--input", cmp_input, "trajectory CSV")->required();
  cmp->add_option("--models", cmp_models, "comma list, e.g. fbm,gle:2,gle:200")->required();
  cmp->add_option("--priors", cmp_priors,
                  "comma list of test-prior JSON paths (or 'synthetic'), one per model")
      ->required();
  cmp->add_option("--odds", cmp_odds, "comma list of prior odds (default equal)");
  cmp->add_option("--dt", cmp_dt, "sampling interval for frame-indexed files (s)");
  cmp->add_option("--output-marginals", cmp_marg, "per-model CSV")->required();
  cmp->add_option("--output-bf", cmp_bf, "pairwise log Bayes factor CSV");
  cmp_grid.attach(cmp);

  // ---- hier-fit ----
  auto* hier = app.add_subcommand("hier-fit", "five-step approximate hierarchical fit");
  std::string hier_inputs, hier_model = "fbm", hier_output, hier_chain, hier_diag;
  int hier_draws = 10000, hier_iters = 10000, hier_burn = 2000;
  double hier_omega = std::numeric_limits<double>::quiet_NaN(), hier_dt = -1.0;
  std::uint64_t hier_seed = 0;
  GridFlags hier_grid;
  hier->add_option("--inputs", hier_inputs, "directory of trajectory CSVs or comma list")
      ->required();
  hier->add_option("--model", hier_model, "fbm or gle:K")->required();
  hier->add_option("--draws", hier_draws, "independent-posterior draws per trajectory");
  hier->add_option("--iters", hier_iters, "Gibbs iterations kept");
  hier->add_option("--burn", hier_burn, "burn-in iterations");
  hier->add_option("--omega", hier_omega, "hyperprior exponent (default -(d+1), flat)");
  hier->add_option("--dt", hier_dt, "sampling interval for frame-indexed files (s)");
  hier->add_option("--seed", hier_seed, "RNG seed")->required();
  hier->add_option("--output", hier_output, "test prior JSON")->required();
  hier->add_option("--chain", hier_chain, "hyperparameter chain JSON");
  hier->add_option("--diagnostics", hier_diag, "diagnostics CSV");
  hier_grid.attach(hier);

  // ---- check ----
  auto* chk = app.add_subcommand("check", "predictive goodness-of-fit checks");
  std::string chk_input, chk_model = "fbm", chk_prior, chk_output, chk_stat = "msd";
  std::string chk_lags = "0.016666666666666666,0.1,1";
  int chk_r = 100, chk_npaths = 10, chk_nsteps = 1800;
  double chk_dt = -1.0, chk_sim_dt = 1.0 / 60.0;
  std::uint64_t chk_seed = 0;
  GridFlags chk_grid;
  chk->add_option("--input", chk_input, "trajectory CSV (not needed for --stat prior-msd)");
  chk->add_option("--model", chk_model, "fbm or gle:K")->required();
  chk->add_option("--prior", chk_prior, "test-prior JSON path or 'synthetic'")->required();
  chk->add_option("--stat", chk_stat, "msd | ks | prior-msd");
  chk->add_option("--lags", chk_lags, "comma list of MSD lag times (s)");
  chk->add_option("-R,--replicates", chk_r, "posterior predictive replicates");
  chk->add_option("--n-paths", chk_npaths, "prior-msd: ensemble size");
  chk->add_option("--n-steps", chk_nsteps, "prior-msd: path length");
  chk->add_option("--sim-dt", chk_sim_dt, "prior-msd: sampling interval (s)");
  chk->add_option("--dt", chk_dt, "sampling interval for frame-indexed files (s)");
  chk->add_option("--seed", chk_seed, "RNG seed")->required();
  chk->add_option("--output", chk_output, "output CSV")->required();
  chk_grid.attach(chk);

  // ---- residuals ----
  auto* res = app.add_subcommand("residuals", "posterior draws of conditionally Gaussian residuals");
  std::string res_input, res_model = "fbm", res_prior = "default", res_output;
  int res_draws = 10;
  double res_dt = -1.0, res_nu0 = 0.0;
  std::uint64_t res_seed = 0;
  GridFlags res_grid;
  res->add_option("--input", res_input, "trajectory CSV")->required();
  res->add_option("--model", res_model, "fbm or gle:K")->required();
  res->add_option("--prior", res_prior, "default | test-prior JSON path");
  res->add_option("--nu0", res_nu0, "improper-prior nu");
  res->add_option("--n-draws", res_draws, "number of residual draws");
  res->add_option("--dt", res_dt, "sampling interval for frame-indexed files (s)");
  res->add_option("--seed", res_seed, "RNG seed")->required();
  res->add_option("--output", res_output, "long-format CSV")->required();
  res_grid.attach(res);

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "synthetic studies");
  exp->require_subcommand(1);
  auto* t1 = exp->add_subcommand("table1", "pairwise model-selection study");
  std::string t1_models = "fbm,gle:2", t1_priors = "synthetic", t1_output;
  int t1_datasets = 50, t1_steps = 300;
  double t1_dt = 1.0 / 60.0;
  std::uint64_t t1_seed = 0;
  GridFlags t1_grid;
  t1->add_option("--models", t1_models, "comma list of models");
  t1->add_option("--priors", t1_priors, "'synthetic' or comma list of JSON paths");
  t1->add_option("--n-datasets", t1_datasets, "datasets per generating model");
  t1->add_option("--n-steps", t1_steps, "increments per dataset");
  t1->add_option("--dt", t1_dt, "sampling interval (s)");
  t1->add_option("--seed", t1_seed, "RNG seed")->required();
  t1->add_option("--output", t1_output, "selection matrix CSV")->required();
  t1_grid.attach(t1);

  auto* s4 = exp->add_subcommand("s4", "prior-sensitivity study (bad priors)");
  std::string s4_base, s4_output;
  int s4_nsim = 10, s4_modes = 200;
  double s4_dt = -1.0;
  std::uint64_t s4_seed = 0;
  GridFlags s4_grid;
  s4->add_option("--base", s4_base, "base trajectory CSV")->required();
  s4->add_option("--n-sim", s4_nsim, "datasets per generating model");
  s4->add_option("--modes", s4_modes, "GLE mode count");
  s4->add_option("--dt", s4_dt, "sampling interval for frame-indexed files (s)");
  s4->add_option("--seed", s4_seed, "RNG seed")->required();
  s4->add_option("--output", s4_output, "probability table CSV")->required();
  s4_grid.attach(s4);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*msd) {
      const auto files = collect_csvs(msd_input);
      fs::create_directories(msd_output_dir);
      std::vector<std::vector<std::string>> long_rows;
      for (const auto& file : files) {
        sd_trajectory_t* traj = nullptr;
        check(sd_trajectory_open(file.c_str(), msd_dt, &traj));
        TrajPtr guard(traj);
        sd_table_t* table = nullptr;
        check(sd_trajectory_msd(traj, msd_max_lag, msd_detrend, msd_sum, &table));
        TablePtr tguard(table);
        const std::string stem = fs::path(file).stem().string();
        save_table_or_die(table, (fs::path(msd_output_dir) / (stem + "_msd.csv")).string());
        for (size_t r = 0; r < sd_table_num_rows(table); ++r)
          long_rows.push_back({stem, sd_table_cell(table, r, 0),
                               sd_table_cell(table, r, 1), sd_table_cell(table, r, 2)});
      }
      if (files.size() > 1) {
        std::ofstream out(fs::path(msd_output_dir) / "msd_long.csv");
        out << "# subdiff\n# " << g_config_line << "\nid,lag_s,msd_um2,n_terms\n";
        for (const auto& row : long_rows)
          out << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3] << "\n";
      }
      std::cerr << "msd: wrote " << files.size() << " file(s) to " << msd_output_dir << "\n";
    } else if (*sim) {
      const ModelArg m = parse_model(sim_model);
      const double vartheta[2] = {m.family == SD_FAMILY_FBM ? sim_hurst : sim_gamma,
                                  sim_tau};
      const double mu[2] = {sim_mu1, sim_mu2};
      const double sigma[3] = {sim_s1, sim_s2, sim_rho};
      for (int k = 0; k < sim_npaths; ++k) {
        sd_trajectory_t* traj = nullptr;
        check(sd_simulate(m.family, m.modes, vartheta, mu, sigma, sim_steps, sim_dt,
                          sim_seed + static_cast<std::uint64_t>(k), &traj));
        TrajPtr guard(traj);
        std::string path = sim_output;
        if (sim_npaths > 1) {
          const fs::path p(sim_output);
          path = (p.parent_path() / (p.stem().string() + "_" + std::to_string(k) +
                                     p.extension().string()))
                     .string();
        }
        check(sd_trajectory_save(traj, path.c_str(), g_config_line.c_str()));
      }
      std::cerr << "simulate: wrote " << sim_npaths << " path(s)\n";
    } else if (*fit) {
      const ModelArg m = parse_model(fit_model);
      sd_trajectory_t* traj = nullptr;
      check(sd_trajectory_open(fit_input.c_str(), fit_dt, &traj));
      TrajPtr guard(traj);
      PriorPtr prior = load_prior(fit_prior, m.family, m.modes, fit_nu0);
      sd_posterior_t* post = nullptr;
      std::cerr << "fit: evaluating grid...\n";
      check(sd_fit(traj, m.family, m.modes, prior.get(), &fit_grid.spec, threads, &post));
      PosteriorPtr pguard(post);
      check(sd_posterior_save(post, fit_output.c_str(), g_config_line.c_str()));
      if (!fit_summary.empty()) {
        sd_table_t* table = nullptr;
        check(sd_posterior_summary(post, &table));
        TablePtr tguard(table);
        save_table_or_die(table, fit_summary);
      }
      double lm = 0.0;
      if (sd_posterior_log_marginal(post, &lm) == SD_OK)
        std::cerr << "fit: log marginal likelihood = " << lm << "\n";
    } else if (*cmp) {
      sd_trajectory_t* traj = nullptr;
      check(sd_trajectory_open(cmp_input.c_str(), cmp_dt, &traj));
      TrajPtr guard(traj);
      const auto model_names = split_list(cmp_models);
      auto prior_names = split_list(cmp_priors);
      if (prior_names.size() == 1 && model_names.size() > 1)
        prior_names.assign(model_names.size(), prior_names[0]);
      if (prior_names.size() != model_names.size()) {
        std::cerr << "subdiff: error: --priors needs one entry per model\n";
        return SD_ERR_USAGE;
      }
      std::vector<int> families, modes;
      std::vector<PriorPtr> priors;
      std::vector<const sd_prior_t*> prior_ptrs;
      for (size_t i = 0; i < model_names.size(); ++i) {
        const ModelArg m = parse_model(model_names[i]);
        families.push_back(m.family);
        modes.push_back(m.modes);
        priors.push_back(load_prior(prior_names[i], m.family, m.modes, 0.0));
        prior_ptrs.push_back(priors.back().get());
      }
      std::vector<double> odds(model_names.size(), 1.0);
      if (!cmp_odds.empty()) {
        const auto parts = split_list(cmp_odds);
        if (parts.size() != model_names.size()) {
          std::cerr << "subdiff: error: --odds needs one entry per model\n";
          return SD_ERR_USAGE;
        }
        for (size_t i = 0; i < parts.size(); ++i) odds[i] = std::stod(parts[i]);
      }
      sd_table_t* marg = nullptr;
      sd_table_t* bf = nullptr;
      std::cerr << "compare: evaluating " << model_names.size() << " model grids...\n";
      check(sd_compare(traj, model_names.size(), families.data(), modes.data(),
                       prior_ptrs.data(), nullptr, odds.data(), threads, &marg,
                       cmp_bf.empty() ? nullptr : &bf));
      TablePtr mguard(marg), bguard(bf);
      // per-model grid overrides come from the shared grid flags
      save_table_or_die(marg, cmp_marg);
      if (!cmp_bf.empty()) save_table_or_die(bf, cmp_bf);
    } else if (*hier) {
      const ModelArg m = parse_model(hier_model);
      std::vector<std::string> files;
      if (hier_inputs.find(',') != std::string::npos)
        files = split_list(hier_inputs);
      else
        files = collect_csvs(hier_inputs);
      std::vector<TrajPtr> guards;
      std::vector<const sd_trajectory_t*> trajs;
      for (const auto& file : files) {
        sd_trajectory_t* traj = nullptr;
        check(sd_trajectory_open(file.c_str(), hier_dt, &traj));
        guards.emplace_back(traj);
        trajs.push_back(traj);
      }
      std::cerr << "hier-fit: " << trajs.size() << " trajectories\n";
      sd_prior_t* prior = nullptr;
      sd_table_t* diag = nullptr;
      check(sd_hier_fit(trajs.data(), trajs.size(), m.family, m.modes,
                        &hier_grid.spec, hier_draws, hier_iters, hier_burn,
                        hier_omega, hier_seed, threads,
                        hier_chain.empty() ? nullptr : hier_chain.c_str(),
                        g_config_line.c_str(), &prior, &diag));
      PriorPtr pguard(prior);
      TablePtr dguard(diag);
      check(sd_prior_save(prior, hier_output.c_str(), g_config_line.c_str()));
      if (!hier_diag.empty()) save_table_or_die(diag, hier_diag);
    } else if (*chk) {
      const ModelArg m = parse_model(chk_model);
      PriorPtr prior = load_prior(chk_prior, m.family, m.modes, 0.0);
      sd_table_t* table = nullptr;
      if (chk_stat == "prior-msd") {
        check(sd_prior_predictive_msd(prior.get(), chk_npaths, chk_nsteps, chk_sim_dt,
                                      0, chk_seed, threads, &table));
      } else {
        if (chk_input.empty()) {
          std::cerr << "subdiff: error: --input required for --stat " << chk_stat << "\n";
          return SD_ERR_USAGE;
        }
        sd_trajectory_t* traj = nullptr;
        check(sd_trajectory_open(chk_input.c_str(), chk_dt, &traj));
        TrajPtr guard(traj);
        if (chk_stat == "msd") {
          std::vector<double> lags;
          for (const auto& l : split_list(chk_lags)) lags.push_back(std::stod(l));
          check(sd_check_msd(traj, m.family, m.modes, prior.get(), &chk_grid.spec,
                             lags.data(), lags.size(), chk_r, chk_seed, threads,
                             &table));
        } else if (chk_stat == "ks") {
          check(sd_check_ks(traj, m.family, m.modes, prior.get(), &chk_grid.spec,
                            chk_r, chk_seed, threads, &table));
        } else {
          std::cerr << "subdiff: error: unknown --stat " << chk_stat << "\n";
          return SD_ERR_USAGE;
        }
      }
      TablePtr tguard(table);
      save_table_or_die(table, chk_output);
    } else if (*res) {
      const ModelArg m = parse_model(res_model);
      sd_trajectory_t* traj = nullptr;
      check(sd_trajectory_open(res_input.c_str(), res_dt, &traj));
      TrajPtr guard(traj);
      PriorPtr prior = load_prior(res_prior, m.family, m.modes, res_nu0);
      sd_table_t* table = nullptr;
      check(sd_residual_draws(traj, m.family, m.modes, prior.get(), &res_grid.spec,
                              res_draws, res_seed, threads, &table));
      TablePtr tguard(table);
      save_table_or_die(table, res_output);
    } else if (*t1) {
      const auto model_names = split_list(t1_models);
      auto prior_names = split_list(t1_priors);
      if (prior_names.size() == 1 && model_names.size() > 1)
        prior_names.assign(model_names.size(), prior_names[0]);
      std::vector<int> families, modes;
      std::vector<PriorPtr> priors;
      std::vector<const sd_prior_t*> prior_ptrs;
      for (size_t i = 0; i < model_names.size(); ++i) {
        const ModelArg m = parse_model(model_names[i]);
        families.push_back(m.family);
        modes.push_back(m.modes);
        priors.push_back(load_prior(prior_names[i], m.family, m.modes, 0.0));
        prior_ptrs.push_back(priors.back().get());
      }
      std::cerr << "experiment table1: " << t1_datasets << " datasets x "
                << model_names.size() << " generators\n";
      sd_table_t* table = nullptr;
      check(sd_experiment_table1(model_names.size(), families.data(), modes.data(),
                                 prior_ptrs.data(), nullptr, t1_datasets, t1_steps,
                                 t1_dt, t1_seed, threads, &table));
      TablePtr tguard(table);
      save_table_or_die(table, t1_output);
    } else if (*s4) {
      sd_trajectory_t* base = nullptr;
      check(sd_trajectory_open(s4_base.c_str(), s4_dt, &base));
      TrajPtr guard(base);
      sd_table_t* table = nullptr;
      std::cerr << "experiment s4: " << 2 * s4_nsim << " datasets\n";
      check(sd_experiment_s4(base, s4_nsim, s4_modes, &s4_grid.spec, &s4_grid.spec,
                             s4_seed, threads, &table));
      TablePtr tguard(table);
      save_table_or_die(table, s4_output);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "subdiff: error: " << e.what() << "\n";
    return SD_ERR_USAGE;
  }
  return 0;
}
