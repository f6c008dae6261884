#include "subdiff/hierarchical.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/math_util.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/transform.hpp"

namespace subdiff {

std::vector<NormalApprox> independent_posteriors(
    const std::vector<IncrementMatrix>& xs, const ThetaGrid& grid,
    const PriorSpec& prior, int m_draws, SplitRng rng, int threads) {
  if (m_draws < 2) throw usage_error("independent_posteriors needs m >= 2");
  const int d = transformed_dim(grid.family());
  std::vector<NormalApprox> out(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t j) {
    const PosteriorGrid post = grid_posterior(xs[j], grid, prior, 1);
    const auto draws = sample_posterior(post, m_draws, rng.child(j));
    Eigen::MatrixXd t(m_draws, d);
    for (int k = 0; k < m_draws; ++k)
      t.row(k) = to_transformed(draws[static_cast<std::size_t>(k)].params).transpose();
    NormalApprox na;
    na.lambda = t.colwise().mean().transpose();
    const Eigen::MatrixXd centered = t.rowwise() - na.lambda.transpose();
    na.omega = centered.transpose() * centered / static_cast<double>(m_draws - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(na.omega);
    const double tr = na.omega.trace();
    if (es.eigenvalues()(0) < 1e-12 * tr)
      na.omega += (1e-10 * tr / d) * Eigen::MatrixXd::Identity(d, d);
    es.compute(na.omega);
    if (!(es.eigenvalues()(0) > 0.0))
      throw numeric_error("degenerate independent-posterior covariance for trajectory " +
                          std::to_string(j));
    out[j] = std::move(na);
  });
  return out;
}

Eigen::MatrixXd sample_inverse_wishart_d(const Eigen::MatrixXd& psi, double nu,
                                         SplitRng& rng) {
  const int d = static_cast<int>(psi.rows());
  if (!(nu > d - 1)) throw usage_error("Inv-Wishart sampling needs nu > d-1");
  Eigen::LLT<Eigen::MatrixXd> llt(psi);
  if (llt.info() != Eigen::Success)
    throw numeric_error("Inv-Wishart scale not positive definite");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(nu - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // Sigma = (L A^{-T})(L A^{-T})' with psi = L L'; positive definite by
  // construction, no explicit matrix inverses
  const Eigen::MatrixXd m = a.triangularView<Eigen::Lower>()
                                .transpose()
                                .solve<Eigen::OnTheRight>(Eigen::MatrixXd(llt.matrixL()));
  return m * m.transpose();
}

/// Symmetric square root with eigenvalues clamped at zero; tolerates the
/// semidefinite matrices that arise when a hierarchy component collapses.
static Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal();
}

HierDraws gibbs_fit(const std::vector<NormalApprox>& approxes,
                    const LogDensity& log_g0, const GibbsOptions& opts,
                    SplitRng rng) {
  const int t_count = static_cast<int>(approxes.size());
  if (t_count == 0) throw usage_error("gibbs_fit: no trajectories");
  const int d = static_cast<int>(approxes[0].lambda.size());
  const double omega =
      std::isnan(opts.omega_exponent) ? -(d + 1.0) : opts.omega_exponent;
  if (t_count <= d + 2)
    throw usage_error("gibbs_fit needs T > d + 2 trajectories (T = " +
                      std::to_string(t_count) + ", d = " + std::to_string(d) + ")");
  if (!(t_count - 1.0 + omega > d - 1.0))
    throw usage_error("gibbs_fit: Omega_0 conditional improper (need T - 1 + omega > d - 1)");

  Eigen::MatrixXd theta(t_count, d);
  for (int j = 0; j < t_count; ++j) theta.row(j) = approxes[j].lambda.transpose();
  Eigen::VectorXd lambda_bar = theta.colwise().mean().transpose();

  // fixed scatter of the approximation means, for the literal-paper variant
  Eigen::MatrixXd s_lambda = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < t_count; ++j) {
    const Eigen::VectorXd c = approxes[j].lambda - lambda_bar;
    s_lambda += c * c.transpose();
  }

  Eigen::VectorXd l0 = lambda_bar;
  Eigen::MatrixXd o0 = s_lambda / std::max(1, t_count - 1);
  o0 += 1e-12 * o0.trace() / d * Eigen::MatrixXd::Identity(d, d);

  HierDraws out;
  out.d = d;
  out.omega_exponent = omega;
  out.lambda0.reserve(opts.n_iter);
  out.omega0.reserve(opts.n_iter);

  std::vector<double> log_g0_cur(t_count, 0.0);
  if (log_g0)
    for (int j = 0; j < t_count; ++j) log_g0_cur[j] = log_g0(theta.row(j).transpose());

  long long accepted = 0, proposals = 0;
  const int total_iters = opts.n_burn + opts.n_iter;
  for (int it = 0; it < total_iters; ++it) {
    // theta_j | l0, O0
    for (int j = 0; j < t_count; ++j) {
      const Eigen::MatrixXd& oj = approxes[j].omega;
      const Eigen::MatrixXd c = oj + o0;
      Eigen::LLT<Eigen::MatrixXd> llt_c(c);
      if (llt_c.info() != Eigen::Success)
        throw numeric_error("gibbs_fit: Omega_j + Omega_0 not positive definite");
      // B_j = Omega_j C^{-1};  mean = lambda_j + B_j (l0 - lambda_j)
      const Eigen::VectorXd mean =
          approxes[j].lambda + oj * llt_c.solve(l0 - approxes[j].lambda);
      // (I - B_j) Omega_j = O0 - O0 C^{-1} O0, symmetric by construction
      Eigen::MatrixXd cov = o0 - o0 * llt_c.solve(o0);
      cov = 0.5 * (cov + cov.transpose());
      Eigen::VectorXd z(d);
      for (int k = 0; k < d; ++k) z(k) = rng.normal();
      const Eigen::VectorXd proposal = mean + psd_sqrt(cov) * z;
      if (!log_g0) {
        theta.row(j) = proposal.transpose();
      } else {
        ++proposals;
        const double lg_new = log_g0(proposal);
        // target carries 1/g0: accept with min{1, g0(old)/g0(new)}
        bool accept = false;
        if (std::isfinite(lg_new)) {
          const double log_ratio = log_g0_cur[j] - lg_new;
          accept = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
        }
        if (accept) {
          theta.row(j) = proposal.transpose();
          log_g0_cur[j] = lg_new;
          ++accepted;
        }
      }
    }

    // O0 | theta (lambda_0 marginalized): Inv-Wishart(S_theta, T - 1 + omega)
    const Eigen::VectorXd tbar = theta.colwise().mean().transpose();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    if (opts.use_lambda_means) {
      s = s_lambda;
    } else {
      for (int j = 0; j < t_count; ++j) {
        const Eigen::VectorXd c = theta.row(j).transpose() - tbar;
        s += c * c.transpose();
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt_s(s);
    if (llt_s.info() != Eigen::Success)
      throw numeric_error("gibbs_fit: scatter matrix S singular");
    o0 = sample_inverse_wishart_d(s, t_count - 1.0 + omega, rng);

    // l0 | O0, theta ~ N(tbar, O0 / T)
    Eigen::VectorXd z(d);
    for (int k = 0; k < d; ++k) z(k) = rng.normal();
    l0 = tbar + psd_sqrt(o0 / t_count) * z;

    if (it >= opts.n_burn) {
      out.lambda0.push_back(l0);
      out.omega0.push_back(o0);
      if (opts.store_theta) out.theta.push_back(theta);
    }
  }

  out.acceptance_rate = proposals == 0 ? 1.0 : static_cast<double>(accepted) / proposals;

  // effective sample size of each lambda_0 component (initial positive
  // autocorrelation estimator)
  const int m = static_cast<int>(out.lambda0.size());
  out.ess_lambda0.assign(d, static_cast<double>(m));
  for (int k = 0; k < d; ++k) {
    std::vector<double> x(m);
    double mean = 0;
    for (int i = 0; i < m; ++i) mean += out.lambda0[i](k);
    mean /= m;
    for (int i = 0; i < m; ++i) x[i] = out.lambda0[i](k) - mean;
    double c0 = 0;
    for (int i = 0; i < m; ++i) c0 += x[i] * x[i];
    c0 /= m;
    if (!(c0 > 0)) continue;
    double rho_sum = 0.0;
    for (int lag = 1; lag < m / 2; ++lag) {
      double c = 0;
      for (int i = 0; i + lag < m; ++i) c += x[i] * x[i + lag];
      c /= m;
      const double rho = c / c0;
      if (rho <= 0.0) break;
      rho_sum += rho;
    }
    out.ess_lambda0[k] = m / (1.0 + 2.0 * rho_sum);
  }
  return out;
}

std::vector<Eigen::VectorXd> test_prior_draws(const HierDraws& h, SplitRng rng) {
  if (h.lambda0.empty()) throw usage_error("test_prior_draws: empty chain");
  std::vector<Eigen::VectorXd> out;
  out.reserve(h.lambda0.size());
  for (std::size_t i = 0; i < h.lambda0.size(); ++i) {
    Eigen::VectorXd z(h.d);
    for (int k = 0; k < h.d; ++k) z(k) = rng.normal();
    out.push_back(h.lambda0[i] + psd_sqrt(h.omega0[i]) * z);
  }
  return out;
}

TestPrior conjugate_approx(const std::vector<Eigen::VectorXd>& samples,
                           Family family, int n_modes) {
  if (samples.size() < 1000)
    throw usage_error("conjugate_approx needs at least 10^3 samples");
  const int d = transformed_dim(family);
  if (samples[0].size() != d)
    throw usage_error("conjugate_approx: sample dimension mismatch");
  const auto m = static_cast<double>(samples.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& s : samples) mean += s;
  mean /= m;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    const Eigen::VectorXd c = s - mean;
    cov += c * c.transpose();
  }
  cov /= (m - 1.0);

  TestPrior tp;
  tp.family = family;
  tp.n_modes = n_modes;
  tp.mean = mean;
  tp.cov = cov;
  return tp;
}

}  // namespace subdiff
