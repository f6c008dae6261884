#ifndef SUBDIFF_SELECTION_HPP
#define SUBDIFF_SELECTION_HPP

#include <string>
#include <vector>

#include "subdiff/grid.hpp"

namespace subdiff {

/// A candidate model: family, mode count, its parameter prior and the
/// integration grid for vartheta.
struct ModelSpec {
  Family family = Family::fbm;
  int n_modes = 2;
  PriorSpec prior = PriorSpec::improper_default();
  GridSpec grid;

  std::string label() const { return model_label(family, n_modes); }
};

/// Model spec with its ACF grid prebuilt; reuse across datasets.
struct PreparedModel {
  ModelSpec spec;
  ThetaGrid grid;
};
PreparedModel prepare_model(const ModelSpec& spec, double dt, int nlags,
                            int threads = 1);

struct ComparisonResult {
  std::vector<std::string> labels;
  std::vector<double> log_marginal;
  std::vector<double> prior_prob;
  std::vector<double> posterior_prob;
  Eigen::MatrixXd log_bayes_factor;  // (i, j) = log f_i - log f_j
};

/// Posterior model probabilities p(M_i | x) = q_i f_i / sum_k q_k f_k.
/// Priors must be proper, or all pseudo-proper with identical (Psi, nu) so
/// the dropped normalizer cancels.
ComparisonResult compare(const IncrementMatrix& x,
                         const std::vector<PreparedModel>& models,
                         const std::vector<double>& prior_odds,
                         int threads = 1);

/// Per-cell pairwise summary of the selection study: the two Table-1 numbers.
struct SelectionCell {
  std::string generator, alternative;
  double mean_prob_correct = 0.0;  // average p(correct | x), pairwise equal odds
  double win_rate = 0.0;           // fraction of datasets where correct model wins
  int n_ok = 0;
  int n_failed = 0;
};

struct SelectionStudyResult {
  std::vector<SelectionCell> cells;
};

/// Simulates n_datasets trajectories per generating model with parameters
/// drawn from that model's (proper) prior, then tabulates every ordered
/// pairwise comparison.  Deterministic given seed; per-dataset failures are
/// excluded and counted.
SelectionStudyResult selection_study(const std::vector<PreparedModel>& models,
                                     int n_datasets, int n_steps, double dt,
                                     SplitRng rng, int threads = 1);

struct PriorSensitivityRow {
  std::string generator;  // "fbm" or "gle-K"
  std::string prior;      // "noninformative" or "double-use"
  int dataset = 0;
  double p_fbm = 0.0;
  double p_gle = 0.0;
};

struct PriorSensitivityResult {
  SubdiffParams fbm_mle;
  SubdiffParams gle_mle;
  std::vector<PriorSensitivityRow> rows;
};

/// Appendix-style prior-sensitivity experiment: fits grid-argmax MLEs of fBM
/// and GLE-K to the base trajectory, simulates n_sim datasets from each, and
/// compares the two models under (i) a near-improper conjugate prior
/// (Psi = 1e-20 I, nu = 1e-20, Lambda = 0, kappa = 1000) and (ii) the
/// double-use prior p(theta | x) from the default improper fit of the same
/// dataset.
PriorSensitivityResult prior_sensitivity_study(const Trajectory& base,
                                               int n_sim, int gle_modes,
                                               const GridSpec& fbm_grid,
                                               const GridSpec& gle_grid,
                                               SplitRng rng, int threads = 1);

/// Synthetic proper priors for desk-scale studies (documented constants;
/// subdiffusive fBM around H = 0.35, GLE with visible OU memory at 60 Hz).
TestPrior make_synthetic_test_prior(Family family, int n_modes);

}  // namespace subdiff

#endif  // SUBDIFF_SELECTION_HPP
