#include "subdiff/prior.hpp"

#include "subdiff/errors.hpp"
#include "subdiff/transform.hpp"

namespace subdiff {

PriorSpec PriorSpec::improper_default(double nu0) {
  PriorSpec p;
  p.kind_ = Kind::improper_default;
  p.nu0_ = nu0;
  return p;
}

PriorSpec PriorSpec::conjugate_fixed(const MniwParams& base) {
  if (base.propriety == Propriety::improper)
    throw usage_error("conjugate_fixed needs Omega > 0 and Psi > 0");
  PriorSpec p;
  p.kind_ = Kind::conjugate_fixed;
  p.fixed_ = base;
  return p;
}

PriorSpec PriorSpec::from_test_prior(const TestPrior& tp) {
  PriorSpec p;
  p.kind_ = Kind::test_prior;
  p.tp_ = tp;
  return p;
}

PriorSpec PriorSpec::tabulated(std::vector<MniwParams> per_node,
                               std::vector<double> log_density_per_node) {
  if (per_node.size() != log_density_per_node.size() || per_node.empty())
    throw usage_error("tabulated prior: mismatched or empty node arrays");
  PriorSpec p;
  p.kind_ = Kind::tabulated;
  p.node_mniw_ = std::move(per_node);
  p.node_logdens_ = std::move(log_density_per_node);
  return p;
}

bool PriorSpec::proper() const {
  switch (kind_) {
    case Kind::improper_default:
      return false;
    case Kind::conjugate_fixed:
      return fixed_->propriety == Propriety::proper;
    case Kind::test_prior:
    case Kind::tabulated:
      return true;
  }
  return false;
}

bool PriorSpec::pseudo() const {
  return kind_ == Kind::conjugate_fixed && fixed_->propriety == Propriety::pseudo;
}

MniwParams PriorSpec::mniw_at(Family family, double th1, double th2,
                              std::ptrdiff_t node_index) const {
  switch (kind_) {
    case Kind::improper_default:
      return MniwParams::improper_default(nu0_);
    case Kind::conjugate_fixed:
      return *fixed_;
    case Kind::test_prior:
      return tp_->mniw_at(th1, th2);
    case Kind::tabulated:
      if (node_index < 0 || node_index >= static_cast<std::ptrdiff_t>(node_mniw_.size()))
        throw usage_error("tabulated prior: node index out of range");
      return node_mniw_[static_cast<std::size_t>(node_index)];
  }
  throw usage_error("bad prior kind");
}

double PriorSpec::log_vartheta_density(Family family, double th1, double th2,
                                       std::ptrdiff_t node_index) const {
  switch (kind_) {
    case Kind::improper_default:
    case Kind::conjugate_fixed:
      return log_default_vartheta_density(family, th1, th2);
    case Kind::test_prior:
      return tp_->log_vartheta_density(th1, th2);
    case Kind::tabulated:
      if (node_index < 0 || node_index >= static_cast<std::ptrdiff_t>(node_logdens_.size()))
        throw usage_error("tabulated prior: node index out of range");
      return node_logdens_[static_cast<std::size_t>(node_index)];
  }
  throw usage_error("bad prior kind");
}

}  // namespace subdiff
