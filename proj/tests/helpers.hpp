#ifndef SUBDIFF_TESTS_HELPERS_HPP
#define SUBDIFF_TESTS_HELPERS_HPP

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/Core>
#include <cmath>

#include "subdiff/acf.hpp"
#include "subdiff/gausslik.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/trajectory.hpp"

namespace subdiff::testing {

// Dense-matrix reference implementations, deliberately independent of the
// Durbin-Levinson code paths they check.

inline Eigen::MatrixXd dense_toeplitz(const AcfVector& acf, Eigen::Index n) {
  Eigen::MatrixXd v(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      v(i, j) = acf.gamma[static_cast<std::size_t>(std::abs(i - j))];
  return v;
}

inline double dense_logdet(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  double ld = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    ld += 2.0 * std::log(llt.matrixL()(i, i));
  return ld;
}

inline double dense_loglik(const IncrementMatrix& x, const LocationScale& ls,
                           const AcfVector& acf) {
  const Eigen::Index n = x.n();
  const Eigen::MatrixXd v = dense_toeplitz(acf, n);
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  Eigen::MatrixXd centered = x.x;
  centered.col(0).array() -= x.dt * ls.mu(0);
  centered.col(1).array() -= x.dt * ls.mu(1);
  const Eigen::MatrixXd vi_c = llt.solve(centered);
  const Eigen::Matrix2d sigma = ls.sigma();
  const Eigen::Matrix2d q = centered.transpose() * vi_c;
  const double trace = sigma.llt().solve(q).trace();
  const double logdet_sigma = std::log(sigma.determinant());
  return -0.5 * (trace + n * logdet_sigma + 2.0 * dense_logdet(v)) -
         n * std::log(2.0 * M_PI);
}

inline Trajectory make_trajectory(const std::vector<double>& xs,
                                  const std::vector<double>& ys, double dt) {
  Trajectory t;
  t.id = "test";
  t.dt = dt;
  t.positions.resize(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    t.positions(static_cast<Eigen::Index>(i), 0) = xs[i];
    t.positions(static_cast<Eigen::Index>(i), 1) = ys[i];
  }
  return t;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace subdiff::testing

#endif  // SUBDIFF_TESTS_HELPERS_HPP
