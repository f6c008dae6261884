#ifndef SUBDIFF_GAUSSLIK_HPP
#define SUBDIFF_GAUSSLIK_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "subdiff/acf.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/trajectory.hpp"

namespace subdiff {

/// Drift and scale of the location-scale model X(t) = mu t + Sigma^{1/2} Z(t).
/// Sigma is parametrized by (sigma1 > 0, sigma2 > 0, rho in (-1,1)).
struct LocationScale {
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;

  Eigen::Matrix2d sigma() const;
  static LocationScale from_sigma(const Eigen::Vector2d& mu, const Eigen::Matrix2d& sigma);
};

/// Innovations (Durbin-Levinson) factorization of the symmetric Toeplitz
/// matrix with first row acf.gamma[0..n-1]: one-step prediction coefficients
/// and innovation variances v_0..v_{n-1}.  Only the partial autocorrelations
/// are stored (O(n)); coefficient rows are replayed on demand, so whiten /
/// colored passes cost O(n^2) time and O(n) space.
class InnovationsFactor {
 public:
  InnovationsFactor(const AcfVector& acf, int n);

  int size() const { return static_cast<int>(v_.size()); }
  double log_det() const { return logdet_; }
  const std::vector<double>& innovation_variances() const { return v_; }
  const std::vector<double>& pacf() const { return pacf_; }

  /// e = A y with A the unit-lower-triangular whitener: e_m = y_m - E[y_m | past].
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& y) const;

  /// Inverse pass: z_m = sum_j phi_{m,j} z_{m-j} + sqrt(v_m) eps_m.
  Eigen::MatrixXd colored(const Eigen::MatrixXd& eps) const;

 private:
  std::vector<double> v_;
  std::vector<double> pacf_;
  double logdet_ = 0.0;
};

/// B' V^{-1} B and log|V| for the n x m matrix B, in one Durbin-Levinson
/// sweep (no factor object retained).
struct DlQuadratic {
  Eigen::MatrixXd btvib;  // m x m
  double logdet_v = 0.0;
};
DlQuadratic dl_quadratic(const AcfVector& acf, const Eigen::MatrixXd& b);

/// Matrix-normal increment log-likelihood
///   -1/2 { tr[V^{-1}(x - dt mu)' Sigma^{-1} (x - dt mu)] + N log|Sigma|
///          + 2 log|V| } - N log(2 pi),
/// evaluated in O(N^2) time with one factorization shared by both columns.
double loglik(const IncrementMatrix& x, const LocationScale& ls, const AcfVector& acf);

/// Conditional MLE of (mu, Sigma) given the ACF, and the attained maximum of
/// loglik (the profile log-likelihood, same constant as loglik).
struct ProfileMle {
  Eigen::Vector2d mu;
  Eigen::Matrix2d sigma;
  double loglik = 0.0;
};
ProfileMle profile_mle(const IncrementMatrix& x, const AcfVector& acf);

/// Exact stationary-Gaussian sampler via the innovations recursion run
/// forward; deterministic given the generator state.
Trajectory simulate_path(const LocationScale& ls, const AcfVector& acf,
                         int n_steps, SplitRng rng, const std::string& id = "sim");

/// Conditionally Gaussian residuals Z = V^{-1/2} (x - dt mu) Sigma^{-1/2}:
/// columns of x are projected onto the eigenvectors of Sigma (largest
/// eigenvalue first, first nonzero component positive), scaled by the inverse
/// root eigenvalue, then whitened by the innovations recursion.  Under the
/// true model the entries are iid N(0,1).
Eigen::Matrix<double, Eigen::Dynamic, 2> residuals(const IncrementMatrix& x,
                                                   const LocationScale& ls,
                                                   const AcfVector& acf);

}  // namespace subdiff

#endif  // SUBDIFF_GAUSSLIK_HPP
