#ifndef SUBDIFF_TRANSFORM_HPP
#define SUBDIFF_TRANSFORM_HPP

#include <Eigen/Core>

#include "subdiff/models.hpp"

namespace subdiff {

/// Normalizing transformation theta -> theta~ used for the hierarchical fit:
///   fBM: (H, mu1, mu2, log sigma1, log sigma2, rho), d = 6
///   GLE: (log(tau)/gamma, log(tau), mu1, mu2, log sigma1, log sigma2, rho), d = 7
int transformed_dim(Family f);
int vartheta_dim(Family f);  // 1 or 2

Eigen::VectorXd to_transformed(const ModelParams& p);

/// Inverse transform; throws numeric_error when the coordinates do not map to
/// a valid parameter (H outside (0,1), gamma = v2/v1 outside (0.5, 200),
/// |rho| >= 1).
ModelParams from_transformed(Family f, int n_modes, const Eigen::VectorXd& v);
bool transformed_valid(Family f, const Eigen::VectorXd& v);

/// Log density (up to a constant) of the default prior of the location-scale
/// model expressed in theta~ coordinates; -inf outside the support.  Flat in
/// H (resp. alpha), mu and log sigma; the rho factor is (1-rho^2)^{-(nu0+3)/2}
/// and GLE carries the log tau normal prior with the (alpha, log tau) ->
/// theta~ Jacobian 1/|log tau|.
double log_g0_transformed(Family f, const Eigen::VectorXd& v, double nu0 = 0.0);

/// Default prior on vartheta in grid-node coordinates (H for fBM, (alpha,
/// log tau) for GLE): Lebesgue on alpha in (0,2) and
/// log tau ~ N(-6.91, 2.68^2).
double log_default_vartheta_density(Family f, double th1, double th2);

inline constexpr double kLogTauPriorMean = -6.91;
inline constexpr double kLogTauPriorSd = 2.68;

}  // namespace subdiff

#endif  // SUBDIFF_TRANSFORM_HPP
