#include "subdiff/testprior.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/transform.hpp"

namespace subdiff {

int TestPrior::d_vartheta() const { return vartheta_dim(family); }

namespace {

/// Node coordinates -> transformed vartheta block.
Eigen::VectorXd node_to_vartheta(Family family, double th1, double th2) {
  if (family == Family::fbm) {
    Eigen::VectorXd v(1);
    v << th1;
    return v;
  }
  // node (alpha, log tau) -> (alpha * log tau, log tau)
  Eigen::VectorXd v(2);
  v << th1 * th2, th2;
  return v;
}

}  // namespace

double TestPrior::log_vartheta_density(double th1, double th2) const {
  const int dv = d_vartheta();
  const Eigen::VectorXd x = node_to_vartheta(family, th1, th2);
  const Eigen::VectorXd m = mean.head(dv);
  const Eigen::MatrixXd v = cov.topLeftCorner(dv, dv);
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success)
    throw numeric_error("test prior vartheta covariance not positive definite");
  const Eigen::VectorXd z = llt.matrixL().solve(x - m);
  double logdet = 0.0;
  for (int i = 0; i < dv; ++i) logdet += std::log(llt.matrixL()(i, i));
  double lp = -0.5 * z.squaredNorm() - logdet - 0.5 * dv * std::log(2.0 * M_PI);
  if (family == Family::gle) {
    if (!(th1 > 0.0 && th1 < 2.0))
      return -std::numeric_limits<double>::infinity();
    lp += std::log(std::abs(th2));  // |d theta~ / d(alpha, log tau)| = |log tau|
  } else if (!(th1 > 0.0 && th1 < 1.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return lp;
}

MniwParams mniw_from_conditional_moments(const Eigen::Vector2d& mu_mean,
                                         const Eigen::Vector2d& mu_var,
                                         const Eigen::Vector3d& w_mean,
                                         const Eigen::Matrix3d& w_cov) {
  constexpr int q = 2;
  const double m1 = w_mean(0), m2 = w_mean(1), m3 = w_mean(2);
  const double v11 = w_cov(0, 0), v22 = w_cov(1, 1), v12 = w_cov(0, 1);
  if (!(v11 > 0.0 && v22 > 0.0))
    throw numeric_error("degenerate log-sigma variance in conjugate approximation");

  // log-normal moments of Sigma_ii = exp(2 w_i)
  const double s11 = std::exp(2.0 * m1 + 2.0 * v11);
  const double s22 = std::exp(2.0 * m2 + 2.0 * v22);
  const double d1 = (std::exp(4.0 * v11) - 1.0) * std::exp(4.0 * m1 + 4.0 * v11);
  const double d2 = (std::exp(4.0 * v22) - 1.0) * std::exp(4.0 * m2 + 4.0 * v22);

  // exponential tilt for Sigma_12 = w3 exp(w1 + w2), a = (1, 1, 0)
  const double tilt = std::exp(m1 + m2 + 0.5 * (v11 + v22 + 2.0 * v12));
  double s12 = (m3 + w_cov(2, 0) + w_cov(2, 1)) * tilt;
  const double s12_max = 0.99 * std::sqrt(s11 * s22);
  if (std::abs(s12) > s12_max) s12 = s12 < 0 ? -s12_max : s12_max;

  Eigen::Matrix2d sigma_bar;
  sigma_bar << s11, s12, s12, s22;

  const double nu = q + 3.0 + (2.0 / q) * (s11 * s11 / d1 + s22 * s22 / d2);
  if (!(nu > q + 1.0))
    throw numeric_error("moment-matched nu <= q+1: degenerate variance estimate");
  const Eigen::Matrix2d psi = (nu - q - 1.0) * sigma_bar;
  const double upsilon = 0.5 * (mu_var(0) / s11 + mu_var(1) / s22);
  if (!(upsilon > 0.0)) throw numeric_error("degenerate mu variance in conjugate approximation");

  return MniwParams::make(mu_mean.transpose(), 1.0 / upsilon, psi, nu);
}

MniwParams TestPrior::mniw_at(double th1, double th2) const {
  const int dv = d_vartheta();
  const int dr = d() - dv;  // 5: (mu1, mu2, w1, w2, w3)
  const Eigen::VectorXd x = node_to_vartheta(family, th1, th2);

  const Eigen::MatrixXd v_tt = cov.topLeftCorner(dv, dv);
  const Eigen::MatrixXd v_rt = cov.bottomLeftCorner(dr, dv);
  const Eigen::MatrixXd v_rr = cov.bottomRightCorner(dr, dr);
  Eigen::LLT<Eigen::MatrixXd> llt(v_tt);
  if (llt.info() != Eigen::Success)
    throw numeric_error("test prior vartheta covariance not positive definite");
  const Eigen::MatrixXd gain = v_rt * llt.solve(Eigen::MatrixXd::Identity(dv, dv));
  const Eigen::VectorXd m_cond = mean.tail(dr) + gain * (x - mean.head(dv));
  const Eigen::MatrixXd v_cond = v_rr - gain * v_rt.transpose();

  const Eigen::Vector2d mu_mean = m_cond.head(2);
  const Eigen::Vector2d mu_var(v_cond(0, 0), v_cond(1, 1));
  const Eigen::Vector3d w_mean = m_cond.tail(3);
  const Eigen::Matrix3d w_cov = v_cond.bottomRightCorner(3, 3);
  return mniw_from_conditional_moments(mu_mean, mu_var, w_mean, w_cov);
}

Eigen::VectorXd TestPrior::sample_transformed(SplitRng& rng) const {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw numeric_error("test prior covariance not positive definite");
  Eigen::VectorXd z(d());
  for (int i = 0; i < d(); ++i) z(i) = rng.normal();
  return mean + llt.matrixL() * z;
}

ModelParams TestPrior::sample(SplitRng& rng) const {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Eigen::VectorXd v = sample_transformed(rng);
    if (transformed_valid(family, v)) return from_transformed(family, n_modes, v);
  }
  throw numeric_error("test prior sampling: support rejection did not terminate");
}

}  // namespace subdiff
