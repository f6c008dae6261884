#ifndef SUBDIFF_TESTPRIOR_HPP
#define SUBDIFF_TESTPRIOR_HPP

#include <Eigen/Core>

#include "subdiff/mniw.hpp"
#include "subdiff/models.hpp"
#include "subdiff/rng.hpp"

namespace subdiff {

/// Data-driven prior pi_test(theta) in conjugate form: a d-variate Gaussian
/// fitted to transformed-parameter draws.  The vartheta marginal is the
/// Gaussian's leading block; the conditional of (mu, Sigma) given vartheta is
/// re-expressed as an MNIW via Gaussian conditioning, log-normal moments of
/// Sigma_ii, the exponential tilt for Sigma_12 and the method-of-moments map.
struct TestPrior {
  Family family = Family::fbm;
  int n_modes = 2;
  Eigen::VectorXd mean;  // d = 6 (fBM) or 7 (GLE)
  Eigen::MatrixXd cov;   // d x d, positive definite

  int d() const { return static_cast<int>(mean.size()); }
  int d_vartheta() const;

  /// Log prior density of vartheta in grid-node coordinates (H, or
  /// (alpha, log tau) with the |log tau| Jacobian).
  double log_vartheta_density(double th1, double th2) const;

  /// Conditional MNIW at a grid node; always proper (nu = q+3 + positive).
  MniwParams mniw_at(double th1, double th2) const;

  /// Draw a full theta; rejection keeps H in (0,1) resp. gamma in (0.5, 200).
  ModelParams sample(SplitRng& rng) const;

  /// Transformed-coordinate draw without validity rejection.
  Eigen::VectorXd sample_transformed(SplitRng& rng) const;
};

/// Gaussian -> MNIW conditional moments at fixed vartheta (Appendix-style
/// construction, exposed for tests).
MniwParams mniw_from_conditional_moments(const Eigen::Vector2d& mu_mean,
                                         const Eigen::Vector2d& mu_var,
                                         const Eigen::Vector3d& w_mean,
                                         const Eigen::Matrix3d& w_cov);

}  // namespace subdiff

#endif  // SUBDIFF_TESTPRIOR_HPP
