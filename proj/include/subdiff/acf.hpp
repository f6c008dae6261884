#ifndef SUBDIFF_ACF_HPP
#define SUBDIFF_ACF_HPP

#include <vector>

namespace subdiff {

/// fBM subdiffusion parameter; 0 < H < 1, alpha = 2H.
struct FbmParams {
  double hurst = 0.5;
};

/// GLE with generalized Rouse relaxation spectrum tau_k = tau * (K/k)^gamma;
/// alpha = 1/gamma, so gamma > 1/2 keeps alpha in (0, 2).
struct GleParams {
  double gamma = 2.0;
  double tau = 1e-3;   // seconds, shortest relaxation time
  int n_modes = 200;   // K >= 1
};

/// OU-sum form of the zero-mass GLE: rates alpha_k = (1/tau)(k/K)^gamma, the
/// K-1 stationary points r_j of q(y) = prod(y - alpha_k) with
/// alpha_j < r_j < alpha_{j+1}, the Brownian weight c0sq = (sum 1/alpha_k)^-1
/// and the OU weights csq_j = C_j^2 / (2 r_j).  Unit physical prefactor; all
/// absolute scale lives in the location-scale Sigma.
struct GleDecomposition {
  std::vector<double> alpha;  // K, strictly increasing
  std::vector<double> root;   // K-1
  std::vector<double> csq;    // K-1
  double c0sq = 0.0;

  /// Same spectrum shape at a different tau: rates scale by 1/tau, csq is
  /// invariant (the MSD time-scaling law).
  GleDecomposition rescaled(double tau) const;
};

/// Increment autocovariance at lags 0..nlags-1 for time step dt; the first
/// row of the Toeplitz matrix V.
struct AcfVector {
  double dt = 0.0;
  std::vector<double> gamma;

  int nlags() const { return static_cast<int>(gamma.size()); }
};

/// gamma_k = 1/2 dt^{2H} (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}).
AcfVector fbm_acf(const FbmParams& p, double dt, int nlags);

/// MSD(t) = t^{2H}.
double fbm_msd(const FbmParams& p, double t);

/// Roots located by golden-section search on sum_k log|y - alpha_k| over each
/// bracket, to relative tolerance 1e-12 of the bracket width.
GleDecomposition gle_decompose(const GleParams& p);

/// gamma_k = c0sq*dt*1{k=0} + sum_j csq_j (2e^{-r|k|dt} - e^{-r|k-1|dt} - e^{-r|k+1|dt}).
AcfVector gle_acf(const GleDecomposition& d, double dt, int nlags);

/// MSD(t) = c0sq*t + sum_j 2 csq_j (1 - e^{-r_j t}).
double gle_msd(const GleDecomposition& d, double t);

}  // namespace subdiff

#endif  // SUBDIFF_ACF_HPP
