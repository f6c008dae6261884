/* subdiff C API: opaque handles + integer status codes.
 *
 * Every function returns SD_OK (0) on success or a nonzero status; the
 * message for the most recent failure on the calling thread is available
 * via sd_last_error().  Handles returned through out-parameters are owned
 * by the caller and released with the matching sd_*_free function.
 *
 * Status codes mirror the CLI exit codes: 1 usage, 2 data, 3 numeric.
 */
#ifndef SUBDIFF_C_H
#define SUBDIFF_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  SD_OK = 0,
  SD_ERR_USAGE = 1,
  SD_ERR_DATA = 2,
  SD_ERR_NUMERIC = 3
};

enum {
  SD_FAMILY_FBM = 0,
  SD_FAMILY_GLE = 1
};

typedef struct sd_trajectory_t sd_trajectory_t;
typedef struct sd_prior_t sd_prior_t;
typedef struct sd_posterior_t sd_posterior_t;
typedef struct sd_table_t sd_table_t;

/* Integration grid over vartheta; zero-initialize then override, or call
 * sd_grid_spec_default. */
typedef struct sd_grid_spec {
  int h_nodes;
  double h_min, h_max;
  int alpha_nodes, logtau_nodes;
  double alpha_min, alpha_max;
  double logtau_min, logtau_max;
} sd_grid_spec;

const char* sd_version(void);
const char* sd_last_error(void);
void sd_grid_spec_default(sd_grid_spec* spec);

/* ---- trajectories ---- */

/* expected_dt < 0 means "no hint" (required for frame-indexed files). */
int sd_trajectory_open(const char* path, double expected_dt, sd_trajectory_t** out);
int sd_trajectory_from_arrays(const double* x, const double* y, size_t n_points,
                              double dt, const char* id, sd_trajectory_t** out);
int sd_trajectory_save(const sd_trajectory_t* traj, const char* path,
                       const char* provenance);
size_t sd_trajectory_size(const sd_trajectory_t* traj); /* N+1 positions */
double sd_trajectory_dt(const sd_trajectory_t* traj);
void sd_trajectory_free(sd_trajectory_t* traj);

/* max_lag <= 0 selects the floor(N/2) default. */
int sd_trajectory_msd(const sd_trajectory_t* traj, int max_lag, int detrend,
                      int sum_coords, sd_table_t** out);

/* Exact location-scale sampler.  vartheta: {H} for fBM, {gamma, tau} for GLE. */
int sd_simulate(int family, int n_modes, const double* vartheta,
                const double* mu2, const double* sigma3 /* s1, s2, rho */,
                int n_steps, double dt, uint64_t seed, sd_trajectory_t** out);

/* ---- priors ---- */

int sd_prior_default(double nu0, sd_prior_t** out);
int sd_prior_load(const char* path, sd_prior_t** out); /* test-prior JSON */
int sd_prior_synthetic(int family, int n_modes, sd_prior_t** out);
int sd_prior_save(const sd_prior_t* prior, const char* path, const char* provenance);
void sd_prior_free(sd_prior_t* prior);

/* ---- fitting ---- */

int sd_fit(const sd_trajectory_t* traj, int family, int n_modes,
           const sd_prior_t* prior, const sd_grid_spec* grid, int threads,
           sd_posterior_t** out);
int sd_posterior_save(const sd_posterior_t* post, const char* path,
                      const char* provenance);
int sd_posterior_load(const char* path, sd_posterior_t** out);
/* Posterior mean and central 95% interval of alpha (and tau for GLE). */
int sd_posterior_summary(const sd_posterior_t* post, sd_table_t** out);
int sd_posterior_log_marginal(const sd_posterior_t* post, double* out);
void sd_posterior_free(sd_posterior_t* post);

/* ---- model comparison ---- */

int sd_compare(const sd_trajectory_t* traj, size_t n_models, const int* families,
               const int* n_modes, const sd_prior_t* const* priors,
               const sd_grid_spec* const* grids, const double* prior_odds,
               int threads, sd_table_t** marginals, sd_table_t** bayes_factors);

/* ---- hierarchical fit (five-step approximation) ---- */

/* chain_path (nullable) dumps the hyperparameter chain as versioned JSON. */
int sd_hier_fit(const sd_trajectory_t* const* trajs, size_t n_trajs, int family,
                int n_modes, const sd_grid_spec* grid, int m_draws, int n_iter,
                int n_burn, double omega_exponent /* NaN = default */, uint64_t seed, int threads,
                const char* chain_path, const char* chain_provenance,
                sd_prior_t** test_prior, sd_table_t** diagnostics);

/* ---- predictive checks ---- */

int sd_check_msd(const sd_trajectory_t* traj, int family, int n_modes,
                 const sd_prior_t* prior, const sd_grid_spec* grid,
                 const double* lag_times_s, size_t n_lags, int replicates,
                 uint64_t seed, int threads, sd_table_t** out);
int sd_check_ks(const sd_trajectory_t* traj, int family, int n_modes,
                const sd_prior_t* prior, const sd_grid_spec* grid,
                int replicates, uint64_t seed, int threads, sd_table_t** out);
int sd_residual_draws(const sd_trajectory_t* traj, int family, int n_modes,
                      const sd_prior_t* prior, const sd_grid_spec* grid,
                      int n_draws, uint64_t seed, int threads, sd_table_t** out);
int sd_prior_predictive_msd(const sd_prior_t* test_prior, int n_paths,
                            int n_steps, double dt, int max_lag, uint64_t seed,
                            int threads, sd_table_t** out);

/* ---- experiments ---- */

int sd_experiment_table1(size_t n_models, const int* families, const int* n_modes,
                         const sd_prior_t* const* test_priors,
                         const sd_grid_spec* const* grids, int n_datasets,
                         int n_steps, double dt, uint64_t seed, int threads,
                         sd_table_t** out);
int sd_experiment_s4(const sd_trajectory_t* base, int n_sim, int gle_modes,
                     const sd_grid_spec* fbm_grid, const sd_grid_spec* gle_grid,
                     uint64_t seed, int threads, sd_table_t** out);

/* ---- tables ---- */

size_t sd_table_num_rows(const sd_table_t* table);
size_t sd_table_num_cols(const sd_table_t* table);
const char* sd_table_column_name(const sd_table_t* table, size_t col);
const char* sd_table_cell(const sd_table_t* table, size_t row, size_t col);
int sd_table_save_csv(const sd_table_t* table, const char* path,
                      const char* provenance);
void sd_table_free(sd_table_t* table);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SUBDIFF_C_H */
