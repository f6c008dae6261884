#include "subdiff/mniw.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"

namespace subdiff {

namespace {
constexpr int kQ = 2;

double logdet2(const Eigen::Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(det > 0.0) || !(m(0, 0) > 0.0))
    throw numeric_error("2x2 matrix not positive definite");
  return std::log(det);
}
}  // namespace

MniwParams MniwParams::improper_default(double nu0) {
  MniwParams p;
  p.nu = nu0;
  p.propriety = Propriety::improper;
  return p;
}

MniwParams MniwParams::make(const Eigen::RowVector2d& lambda, double omega,
                            const Eigen::Matrix2d& psi, double nu) {
  MniwParams p;
  p.lambda = lambda;
  p.omega = omega;
  p.psi = psi;
  p.nu = nu;
  const bool pos = omega > 0.0 && psi(0, 0) > 0.0 &&
                   psi(0, 0) * psi(1, 1) - psi(0, 1) * psi(1, 0) > 0.0;
  if (!pos) throw usage_error("conjugate prior needs Omega > 0 and Psi positive definite");
  p.propriety = nu > kQ - 1 ? Propriety::proper : Propriety::pseudo;
  return p;
}

double log_iw_normalizer(const Eigen::Matrix2d& psi, double nu) {
  return 0.5 * nu * logdet2(psi) - 0.5 * nu * kQ * std::log(2.0) -
         log_multigamma(kQ, 0.5 * nu);
}

GaussSuffStats gauss_suff_stats(const IncrementMatrix& x, const AcfVector& acf) {
  const Eigen::Index n = x.n();
  Eigen::MatrixXd b(n, 3);
  b.leftCols<2>() = x.x;
  b.col(2).setConstant(x.dt);
  const DlQuadratic dq = dl_quadratic(acf, b);
  GaussSuffStats st;
  st.s = dq.btvib.topLeftCorner<2, 2>();
  st.u = dq.btvib.bottomLeftCorner<1, 2>();
  st.t = dq.btvib(2, 2);
  st.logdet_v = dq.logdet_v;
  st.n = n;
  st.dt = x.dt;
  return st;
}

MniwUpdateResult mniw_update(const GaussSuffStats& stats, const MniwParams& prior) {
  const double n = static_cast<double>(stats.n);
  const Eigen::RowVector2d beta_hat = stats.u / stats.t;
  const Eigen::Matrix2d ss = stats.s - stats.u.transpose() * stats.u / stats.t;

  MniwUpdateResult out;
  out.posterior.propriety = Propriety::proper;
  double log_ev = -0.5 * n * kQ * std::log(2.0 * M_PI) - 0.5 * kQ * stats.logdet_v;

  if (prior.propriety == Propriety::improper) {
    // Lambda = 0, Omega = 0, Psi = 0, nu_hat = nu + n - p
    out.posterior.lambda = beta_hat;
    out.posterior.omega = stats.t;
    out.posterior.psi = ss;
    out.posterior.nu = prior.nu + n - 1.0;
    out.relative = true;
    log_ev += -0.5 * kQ * std::log(stats.t);
  } else {
    out.posterior.omega = prior.omega + stats.t;
    out.posterior.nu = prior.nu + n;
    out.posterior.lambda =
        (stats.t * beta_hat + prior.omega * prior.lambda) / out.posterior.omega;
    const Eigen::RowVector2d d = beta_hat - prior.lambda;
    out.posterior.psi =
        prior.psi + ss +
        (stats.t * prior.omega / out.posterior.omega) * d.transpose() * d;
    log_ev += 0.5 * kQ * (std::log(prior.omega) - std::log(out.posterior.omega));
    if (prior.propriety == Propriety::proper) {
      log_ev += log_iw_normalizer(prior.psi, prior.nu);
    } else {
      out.relative = true;  // prior normalizer undefined, dropped as a constant
    }
  }

  if (!(out.posterior.nu > kQ - 1))
    throw numeric_error("posterior nu_hat <= q-1: insufficient data");
  log_ev -= log_iw_normalizer(out.posterior.psi, out.posterior.nu);
  out.log_evidence = log_ev;
  return out;
}

MniwUpdateResult mniw_update(const IncrementMatrix& x, const AcfVector& acf,
                             const MniwParams& prior) {
  return mniw_update(gauss_suff_stats(x, acf), prior);
}

Eigen::Matrix2d sample_inverse_wishart(const Eigen::Matrix2d& psi, double nu,
                                       SplitRng& rng) {
  if (!(nu > kQ - 1)) throw usage_error("Inv-Wishart sampling needs nu > q-1");
  // W ~ Wishart(Psi^{-1}, nu) by Bartlett, then Sigma = W^{-1}
  Eigen::LLT<Eigen::Matrix2d> llt(psi.inverse());
  if (llt.info() != Eigen::Success) throw numeric_error("Psi not positive definite");
  const Eigen::Matrix2d l = llt.matrixL();
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  a(0, 0) = std::sqrt(rng.chi_squared(nu));
  a(1, 1) = std::sqrt(rng.chi_squared(nu - 1.0));
  a(1, 0) = rng.normal();
  const Eigen::Matrix2d la = l * a;
  return (la * la.transpose()).inverse();
}

LocationScale sample_mniw(const MniwParams& p, SplitRng& rng) {
  if (p.propriety != Propriety::proper)
    throw usage_error("cannot sample from a non-proper MNIW");
  const Eigen::Matrix2d sigma = sample_inverse_wishart(p.psi, p.nu, rng);
  Eigen::LLT<Eigen::Matrix2d> llt(sigma / p.omega);
  Eigen::Vector2d z(rng.normal(), rng.normal());
  const Eigen::Vector2d mu = p.lambda.transpose() + llt.matrixL() * z;
  return LocationScale::from_sigma(mu, sigma);
}

}  // namespace subdiff
