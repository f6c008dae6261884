#ifndef SUBDIFF_MNIW_HPP
#define SUBDIFF_MNIW_HPP

#include <Eigen/Core>

#include "subdiff/acf.hpp"
#include "subdiff/gausslik.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/trajectory.hpp"

namespace subdiff {

/// Prior regimes for the MNIW family.  `proper` supports absolute marginal
/// likelihoods.  `pseudo` means Omega/Psi are positive but nu <= q-1, so the
/// Inverse-Wishart normalizer is undefined; evidence is then computed without
/// the prior normalizer and is valid only relative to the same (Psi, nu).
/// `improper` is the default location-scale invariant prior Lambda=0,
/// Omega=0, Psi=0 with nu_hat = nu + n - p.
enum class Propriety { proper, pseudo, improper };

/// Matrix-Normal-Inverse-Wishart hyperparameters for p=1 regressor (the
/// constant dt column) and q=2 responses:
///   Sigma | vartheta ~ Inv-Wishart(Psi, nu)
///   mu | Sigma ~ N(Lambda, Sigma / Omega)        (Omega = kappa, scalar)
struct MniwParams {
  Eigen::RowVector2d lambda = Eigen::RowVector2d::Zero();
  double omega = 0.0;
  Eigen::Matrix2d psi = Eigen::Matrix2d::Zero();
  double nu = 0.0;
  Propriety propriety = Propriety::improper;

  static MniwParams improper_default(double nu0 = 0.0);
  static MniwParams make(const Eigen::RowVector2d& lambda, double omega,
                         const Eigen::Matrix2d& psi, double nu);
};

/// log Xi(Psi, nu) = (nu/2) log|Psi| - (nu q / 2) log 2 - log Gamma_q(nu/2).
double log_iw_normalizer(const Eigen::Matrix2d& psi, double nu);

/// Sufficient blocks of [Y | X]' V^{-1} [Y | X] with X the constant dt
/// column, from one Durbin-Levinson pass.
struct GaussSuffStats {
  Eigen::Matrix2d s;       // Y' V^-1 Y
  Eigen::RowVector2d u;    // X' V^-1 Y
  double t = 0.0;          // X' V^-1 X
  double logdet_v = 0.0;
  Eigen::Index n = 0;
  double dt = 0.0;
};
GaussSuffStats gauss_suff_stats(const IncrementMatrix& x, const AcfVector& acf);

struct MniwUpdateResult {
  MniwParams posterior;           // always proper on exit
  double log_evidence = 0.0;      // log f(Y | vartheta)
  bool relative = false;          // true when the prior normalizer was dropped
};

/// Conjugate update and matrix-normal evidence
///   f(Y|vartheta) = (2 pi)^{-nq/2} (|Omega|/|Omega_hat|)^{q/2} |V|^{-q/2}
///                   Xi(Psi, nu) / Xi(Psi_hat, nu_hat).
/// For the improper default the evidence lacks the prior's (undefined)
/// constant and is flagged relative; same for pseudo-proper priors.
MniwUpdateResult mniw_update(const GaussSuffStats& stats, const MniwParams& prior);
MniwUpdateResult mniw_update(const IncrementMatrix& x, const AcfVector& acf,
                             const MniwParams& prior);

/// Sigma ~ Inv-Wishart(Psi, nu) via the Bartlett construction.
Eigen::Matrix2d sample_inverse_wishart(const Eigen::Matrix2d& psi, double nu, SplitRng& rng);

/// (mu, Sigma) from a proper MNIW.
LocationScale sample_mniw(const MniwParams& p, SplitRng& rng);

}  // namespace subdiff

#endif  // SUBDIFF_MNIW_HPP
