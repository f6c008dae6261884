#include "subdiff/transform.hpp"

#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"

namespace subdiff {

namespace {
constexpr double kGammaLo = 0.5;
constexpr double kGammaHi = 200.0;

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}
}  // namespace

int transformed_dim(Family f) { return f == Family::fbm ? 6 : 7; }
int vartheta_dim(Family f) { return f == Family::fbm ? 1 : 2; }

Eigen::VectorXd to_transformed(const ModelParams& p) {
  const int d = transformed_dim(p.vartheta.family);
  Eigen::VectorXd v(d);
  int i = 0;
  if (p.vartheta.family == Family::fbm) {
    v(i++) = p.vartheta.hurst;
  } else {
    v(i++) = std::log(p.vartheta.tau) / p.vartheta.gamma;
    v(i++) = std::log(p.vartheta.tau);
  }
  v(i++) = p.ls.mu(0);
  v(i++) = p.ls.mu(1);
  v(i++) = std::log(p.ls.sigma1);
  v(i++) = std::log(p.ls.sigma2);
  v(i++) = p.ls.rho;
  return v;
}

bool transformed_valid(Family f, const Eigen::VectorXd& v) {
  if (v.size() != transformed_dim(f)) return false;
  const double rho = v(v.size() - 1);
  if (!(std::abs(rho) < 1.0)) return false;
  if (f == Family::fbm) return v(0) > 0.0 && v(0) < 1.0;
  if (v(0) == 0.0) return false;
  const double gamma = v(1) / v(0);
  return gamma > kGammaLo && gamma < kGammaHi;
}

ModelParams from_transformed(Family f, int n_modes, const Eigen::VectorXd& v) {
  if (!transformed_valid(f, v))
    throw numeric_error("transformed coordinates outside the valid parameter range");
  ModelParams p;
  int i = 0;
  if (f == Family::fbm) {
    p.vartheta = SubdiffParams::fbm(v(i++));
  } else {
    const double gamma = v(1) / v(0);
    p.vartheta = SubdiffParams::gle(gamma, std::exp(v(1)), n_modes);
    i = 2;
  }
  p.ls.mu(0) = v(i++);
  p.ls.mu(1) = v(i++);
  p.ls.sigma1 = std::exp(v(i++));
  p.ls.sigma2 = std::exp(v(i++));
  p.ls.rho = v(i++);
  return p;
}

double log_g0_transformed(Family f, const Eigen::VectorXd& v, double nu0) {
  if (!transformed_valid(f, v)) return -std::numeric_limits<double>::infinity();
  const double rho = v(v.size() - 1);
  double lp = -0.5 * (nu0 + 3.0) * std::log1p(-rho * rho);
  if (nu0 != 0.0) {
    const double ls1 = v(v.size() - 3), ls2 = v(v.size() - 2);
    lp -= nu0 * (ls1 + ls2);
  }
  if (f == Family::gle) {
    // theta~ = (alpha log tau, log tau); d(alpha, log tau)/d(theta~) = 1/|log tau|
    lp += log_normal_pdf(v(1), kLogTauPriorMean, kLogTauPriorSd) -
          std::log(std::abs(v(1)));
  }
  return lp;
}

double log_default_vartheta_density(Family f, double th1, double th2) {
  if (f == Family::fbm) {
    // alpha = 2H uniform on (0,2): density 1 in H on (0,1)
    if (!(th1 > 0.0 && th1 < 1.0))
      return -std::numeric_limits<double>::infinity();
    return 0.0;
  }
  if (!(th1 > 0.0 && th1 < 2.0))
    return -std::numeric_limits<double>::infinity();
  return std::log(0.5) + log_normal_pdf(th2, kLogTauPriorMean, kLogTauPriorSd);
}

}  // namespace subdiff
