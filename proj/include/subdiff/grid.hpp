#ifndef SUBDIFF_GRID_HPP
#define SUBDIFF_GRID_HPP

#include <cstddef>
#include <vector>

#include "subdiff/mniw.hpp"
#include "subdiff/models.hpp"
#include "subdiff/prior.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/trajectory.hpp"

namespace subdiff {

/// Deterministic integration grids over vartheta: 1-D in H for fBM, 2-D in
/// (alpha = 1/gamma, log tau) for GLE.  Defaults span the (0,2) prior support
/// of alpha and the 99% prior interval of tau.
struct GridSpec {
  int h_nodes = 400;
  double h_min = 0.005, h_max = 0.995;
  int alpha_nodes = 80, logtau_nodes = 80;
  double alpha_min = 0.02, alpha_max = 1.98;
  double logtau_min = -16.0, logtau_max = 1.0;
};

/// Grid nodes with their increment ACFs cached (one GLE decomposition per
/// distinct alpha, rescaled across the log tau axis).  Immutable and safe to
/// share across threads and datasets.
class ThetaGrid {
 public:
  static ThetaGrid build(Family family, int n_modes, const GridSpec& spec,
                         double dt, int nlags, int threads = 1);

  Family family() const { return family_; }
  int n_modes() const { return n_modes_; }
  double dt() const { return dt_; }
  int nlags() const { return nlags_; }
  std::size_t size() const { return th1_.size(); }
  double th1(std::size_t i) const { return th1_[i]; }
  double th2(std::size_t i) const { return th2_[i]; }
  double quad_weight(std::size_t i) const { return quad_w_[i]; }
  const AcfVector& acf(std::size_t i) const { return acf_[i]; }
  const GridSpec& spec() const { return spec_; }

 private:
  Family family_ = Family::fbm;
  int n_modes_ = 0;
  double dt_ = 0.0;
  int nlags_ = 0;
  GridSpec spec_;
  std::vector<double> th1_, th2_, quad_w_;
  std::vector<AcfVector> acf_;
};

struct PosteriorNode {
  double th1 = 0.0, th2 = 0.0;
  double logw = 0.0;  // log pi(vartheta) + log f(Y | vartheta)
  MniwParams cond;    // proper MNIW conditional
};

/// Grid posterior over vartheta with conjugate conditionals per node.
struct PosteriorGrid {
  Family family = Family::fbm;
  int n_modes = 0;
  double dt = 0.0;
  Eigen::Index n_obs = 0;
  bool proper_prior = false;
  bool relative_evidence = false;
  std::vector<PosteriorNode> nodes;
  std::vector<double> quad_w;
  std::vector<double> norm_w;  // normalized quad_w * exp(logw - max), sums to 1

  /// log f(Y) by trapezoid quadrature with max-shift; usage_error when the
  /// prior is improper (marginal defined only up to a constant).
  double log_marginal() const;

  double weighted_mean(const std::vector<double>& values) const;
  double weighted_quantile(const std::vector<double>& values, double p) const;
  std::vector<double> node_alpha() const;   // 2H or alpha
  std::vector<double> node_logtau() const;  // GLE only
};

PosteriorGrid grid_posterior(const IncrementMatrix& x, const ThetaGrid& grid,
                             const PriorSpec& prior, int threads = 1);

struct PosteriorDraw {
  ModelParams params;
  std::size_t node = 0;
};

/// theta draws: node by normalized weight, then Sigma ~ Inv-Wishart and
/// mu | Sigma Gaussian from the node's MNIW conditional.
std::vector<PosteriorDraw> sample_posterior(const PosteriorGrid& g, int m, SplitRng rng);

}  // namespace subdiff

#endif  // SUBDIFF_GRID_HPP
