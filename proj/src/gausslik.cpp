#include "subdiff/gausslik.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"

namespace subdiff {

Eigen::Matrix2d LocationScale::sigma() const {
  Eigen::Matrix2d s;
  const double off = sigma1 * sigma2 * rho;
  s << sigma1 * sigma1, off, off, sigma2 * sigma2;
  return s;
}

LocationScale LocationScale::from_sigma(const Eigen::Vector2d& mu,
                                        const Eigen::Matrix2d& sigma) {
  LocationScale ls;
  ls.mu = mu;
  if (!(sigma(0, 0) > 0.0 && sigma(1, 1) > 0.0))
    throw numeric_error("Sigma diagonal must be positive");
  ls.sigma1 = std::sqrt(sigma(0, 0));
  ls.sigma2 = std::sqrt(sigma(1, 1));
  ls.rho = 0.5 * (sigma(0, 1) + sigma(1, 0)) / (ls.sigma1 * ls.sigma2);
  if (!(std::abs(ls.rho) < 1.0)) throw numeric_error("|rho| must be < 1");
  return ls;
}

namespace {

void check_acf_n(const AcfVector& acf, Eigen::Index n) {
  if (n < 1) throw usage_error("need n >= 1");
  if (acf.nlags() < n)
    throw usage_error("AcfVector covers " + std::to_string(acf.nlags()) +
                      " lags, need " + std::to_string(n));
}

/// One Durbin-Levinson sweep.  step(m, phi, v_m) is invoked for every index
/// m = 0..n-1 with phi[1..m] the prediction coefficients of y_m on
/// y_{m-1}..y_0 (phi unused entries undefined) and v_m the innovation
/// variance.  Throws if the Toeplitz matrix is not positive definite.
template <class Step>
void dl_sweep(const double* g, Eigen::Index n, Step&& step) {
  std::vector<double> phi(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> phi_prev(static_cast<std::size_t>(n) + 1, 0.0);
  double v = g[0];
  if (!(v > 0.0)) throw numeric_error("covariance not positive definite (gamma_0 <= 0)");
  step(0, phi_prev.data(), v);
  for (Eigen::Index m = 1; m < n; ++m) {
    double num = g[m];
    for (Eigen::Index j = 1; j < m; ++j) num -= phi_prev[j] * g[m - j];
    const double a = num / v;
    for (Eigen::Index j = 1; j < m; ++j)
      phi[j] = phi_prev[j] - a * phi_prev[m - j];
    phi[m] = a;
    v *= (1.0 - a * a);
    if (!(v > 0.0))
      throw numeric_error("covariance not positive definite (innovation variance <= 0 at index " +
                          std::to_string(m) + ")");
    step(m, phi.data(), v);
    std::swap(phi, phi_prev);
  }
}

}  // namespace

InnovationsFactor::InnovationsFactor(const AcfVector& acf, int n) {
  check_acf_n(acf, n);
  v_.reserve(n);
  pacf_.reserve(n);
  dl_sweep(acf.gamma.data(), n, [&](Eigen::Index m, const double* phi, double v) {
    v_.push_back(v);
    pacf_.push_back(m == 0 ? 0.0 : phi[m]);
    logdet_ += std::log(v);
  });
}

Eigen::MatrixXd InnovationsFactor::whiten(const Eigen::MatrixXd& y) const {
  const Eigen::Index n = static_cast<Eigen::Index>(v_.size());
  if (y.rows() != n) throw usage_error("whiten: row count mismatch");
  const Eigen::Index q = y.cols();
  Eigen::MatrixXd e(n, q);
  e.row(0) = y.row(0);
  std::vector<double> phi(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> phi_prev(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index m = 1; m < n; ++m) {
    const double a = pacf_[m];
    for (Eigen::Index j = 1; j < m; ++j)
      phi[j] = phi_prev[j] - a * phi_prev[m - j];
    phi[m] = a;
    for (Eigen::Index c = 0; c < q; ++c) {
      double pred = 0.0;
      for (Eigen::Index j = 1; j <= m; ++j) pred += phi[j] * y(m - j, c);
      e(m, c) = y(m, c) - pred;
    }
    std::swap(phi, phi_prev);
  }
  return e;
}

Eigen::MatrixXd InnovationsFactor::colored(const Eigen::MatrixXd& eps) const {
  const Eigen::Index n = static_cast<Eigen::Index>(v_.size());
  if (eps.rows() != n) throw usage_error("colored: row count mismatch");
  const Eigen::Index q = eps.cols();
  Eigen::MatrixXd z(n, q);
  z.row(0) = std::sqrt(v_[0]) * eps.row(0);
  std::vector<double> phi(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> phi_prev(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index m = 1; m < n; ++m) {
    const double a = pacf_[m];
    for (Eigen::Index j = 1; j < m; ++j)
      phi[j] = phi_prev[j] - a * phi_prev[m - j];
    phi[m] = a;
    const double sd = std::sqrt(v_[m]);
    for (Eigen::Index c = 0; c < q; ++c) {
      double pred = 0.0;
      for (Eigen::Index j = 1; j <= m; ++j) pred += phi[j] * z(m - j, c);
      z(m, c) = pred + sd * eps(m, c);
    }
    std::swap(phi, phi_prev);
  }
  return z;
}

DlQuadratic dl_quadratic(const AcfVector& acf, const Eigen::MatrixXd& b) {
  const Eigen::Index n = b.rows();
  check_acf_n(acf, n);
  const Eigen::Index q = b.cols();
  DlQuadratic out;
  out.btvib = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd e(q);
  dl_sweep(acf.gamma.data(), n, [&](Eigen::Index m, const double* phi, double v) {
    for (Eigen::Index c = 0; c < q; ++c) {
      double pred = 0.0;
      for (Eigen::Index j = 1; j <= m; ++j) pred += phi[j] * b(m - j, c);
      e(c) = b(m, c) - pred;
    }
    out.btvib.selfadjointView<Eigen::Lower>().rankUpdate(e, 1.0 / v);
    out.logdet_v += std::log(v);
  });
  out.btvib = out.btvib.selfadjointView<Eigen::Lower>();
  return out;
}

double loglik(const IncrementMatrix& x, const LocationScale& ls, const AcfVector& acf) {
  const Eigen::Index n = x.n();
  Eigen::MatrixXd centered = x.x;
  centered.col(0).array() -= x.dt * ls.mu(0);
  centered.col(1).array() -= x.dt * ls.mu(1);
  const DlQuadratic dq = dl_quadratic(acf, centered);

  const Eigen::Matrix2d sigma = ls.sigma();
  Eigen::LLT<Eigen::Matrix2d> llt(sigma);
  if (llt.info() != Eigen::Success) throw numeric_error("Sigma not positive definite");
  const double logdet_sigma = 2.0 * std::log(llt.matrixL()(0, 0)) +
                              2.0 * std::log(llt.matrixL()(1, 1));
  const double trace = llt.solve(dq.btvib).trace();
  return -0.5 * (trace + n * logdet_sigma + 2.0 * dq.logdet_v) -
         n * std::log(2.0 * M_PI);
}

ProfileMle profile_mle(const IncrementMatrix& x, const AcfVector& acf) {
  const Eigen::Index n = x.n();
  if (n < 2) throw usage_error("profile_mle needs N > 1");
  Eigen::MatrixXd b(n, 3);
  b.leftCols<2>() = x.x;
  b.col(2).setConstant(x.dt);
  const DlQuadratic dq = dl_quadratic(acf, b);
  const Eigen::Matrix2d s = dq.btvib.topLeftCorner<2, 2>();
  const Eigen::RowVector2d u = dq.btvib.bottomLeftCorner<1, 2>();
  const double t = dq.btvib(2, 2);
  if (!(t > 0)) throw numeric_error("X'V^{-1}X not positive");

  ProfileMle out;
  const Eigen::RowVector2d beta = u / t;
  out.mu = beta.transpose();
  const Eigen::Matrix2d ss = s - u.transpose() * u / t;  // generalized residual cross-product
  out.sigma = ss / static_cast<double>(n);
  Eigen::LLT<Eigen::Matrix2d> llt(out.sigma);
  if (llt.info() != Eigen::Success)
    throw numeric_error("profile Sigma not positive definite");
  const double logdet_sigma_hat = 2.0 * std::log(llt.matrixL()(0, 0)) +
                                  2.0 * std::log(llt.matrixL()(1, 1));
  out.loglik = -0.5 * (2.0 * n + n * logdet_sigma_hat + 2.0 * dq.logdet_v) -
               n * std::log(2.0 * M_PI);
  return out;
}

Trajectory simulate_path(const LocationScale& ls, const AcfVector& acf,
                         int n_steps, SplitRng rng, const std::string& id) {
  if (n_steps < 2) throw usage_error("simulate needs at least 2 steps");
  const InnovationsFactor fac(acf, n_steps);
  Eigen::MatrixXd eps(n_steps, 2);
  for (Eigen::Index i = 0; i < n_steps; ++i)
    for (Eigen::Index c = 0; c < 2; ++c) eps(i, c) = rng.normal();
  Eigen::MatrixXd z = fac.colored(eps);

  Eigen::LLT<Eigen::Matrix2d> llt(ls.sigma());
  if (llt.info() != Eigen::Success) throw numeric_error("Sigma not positive definite");
  const Eigen::Matrix2d l = llt.matrixL();
  Eigen::MatrixXd inc = z * l.transpose();
  inc.col(0).array() += acf.dt * ls.mu(0);
  inc.col(1).array() += acf.dt * ls.mu(1);

  Trajectory traj;
  traj.id = id;
  traj.dt = acf.dt;
  traj.positions.setZero(n_steps + 1, 2);
  for (Eigen::Index i = 0; i < n_steps; ++i)
    traj.positions.row(i + 1) = traj.positions.row(i) + inc.row(i);
  return traj;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> residuals(const IncrementMatrix& x,
                                                   const LocationScale& ls,
                                                   const AcfVector& acf) {
  const Eigen::Index n = x.n();
  const Eigen::Matrix2d sigma = ls.sigma();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0))
    throw numeric_error("Sigma not positive definite");
  Eigen::Vector2d evals = es.eigenvalues();
  Eigen::Matrix2d evecs = es.eigenvectors();
  evals.reverseInPlace();
  evecs = evecs.rowwise().reverse().eval();  // largest eigenvalue first
  if (evals(0) == evals(1)) evecs.setIdentity();  // exact tie: fixed basis
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < 2; ++r) {
      if (evecs(r, c) != 0.0) {
        if (evecs(r, c) < 0.0) evecs.col(c) = -evecs.col(c);
        break;
      }
    }
  }

  Eigen::MatrixXd centered = x.x;
  centered.col(0).array() -= x.dt * ls.mu(0);
  centered.col(1).array() -= x.dt * ls.mu(1);
  Eigen::MatrixXd proj = centered * evecs;  // projections onto eigenvectors

  const InnovationsFactor fac(acf, static_cast<int>(n));
  Eigen::MatrixXd e = fac.whiten(proj);
  const auto& v = fac.innovation_variances();
  Eigen::Matrix<double, Eigen::Dynamic, 2> z(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sd = std::sqrt(v[static_cast<std::size_t>(i)]);
    z(i, 0) = e(i, 0) / (sd * std::sqrt(evals(0)));
    z(i, 1) = e(i, 1) / (sd * std::sqrt(evals(1)));
  }
  return z;
}

}  // namespace subdiff
