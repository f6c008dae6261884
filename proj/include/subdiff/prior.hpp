#ifndef SUBDIFF_PRIOR_HPP
#define SUBDIFF_PRIOR_HPP

#include <memory>
#include <optional>
#include <vector>

#include "subdiff/mniw.hpp"
#include "subdiff/models.hpp"
#include "subdiff/testprior.hpp"

namespace subdiff {

/// Prior over theta = (vartheta, mu, Sigma) for grid fitting.
///  - improper_default: location-scale invariant prior (Lambda=0, Omega=0,
///    Psi=0, configurable nu0) with the default vartheta priors; relative
///    evidence only.
///  - conjugate_fixed: one MNIW for all vartheta, default vartheta priors.
///  - test_prior: hierarchical data-driven prior in conjugate form.
///  - tabulated: per-grid-node MNIW and vartheta log-density (the double-use
///    prior of the sensitivity study); aligned with a specific ThetaGrid.
class PriorSpec {
 public:
  enum class Kind { improper_default, conjugate_fixed, test_prior, tabulated };

  static PriorSpec improper_default(double nu0 = 0.0);
  static PriorSpec conjugate_fixed(const MniwParams& base);
  static PriorSpec from_test_prior(const TestPrior& tp);
  static PriorSpec tabulated(std::vector<MniwParams> per_node,
                             std::vector<double> log_density_per_node);

  Kind kind() const { return kind_; }
  /// Absolute marginal likelihoods available.
  bool proper() const;
  /// Evidence defined only up to a shared constant (pseudo-proper MNIW).
  bool pseudo() const;
  double nu0() const { return nu0_; }
  const TestPrior* test_prior() const { return tp_ ? &*tp_ : nullptr; }
  const MniwParams* fixed_mniw() const { return fixed_ ? &*fixed_ : nullptr; }

  MniwParams mniw_at(Family family, double th1, double th2,
                     std::ptrdiff_t node_index) const;
  double log_vartheta_density(Family family, double th1, double th2,
                              std::ptrdiff_t node_index) const;
  std::size_t tabulated_size() const { return node_mniw_.size(); }

 private:
  Kind kind_ = Kind::improper_default;
  double nu0_ = 0.0;
  std::optional<MniwParams> fixed_;
  std::optional<TestPrior> tp_;
  std::vector<MniwParams> node_mniw_;
  std::vector<double> node_logdens_;
};

}  // namespace subdiff

#endif  // SUBDIFF_PRIOR_HPP
