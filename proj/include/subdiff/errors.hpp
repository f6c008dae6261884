#ifndef SUBDIFF_ERRORS_HPP
#define SUBDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace subdiff {

/// Malformed or inconsistent input data (bad CSV, non-uniform sampling, ...).
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (covariance not positive definite, degenerate moments,
/// all-node underflow, ...).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// API misuse (marginal likelihood of an improper prior, bad grid spec, ...).
class usage_error : public std::logic_error {
 public:
  explicit usage_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace subdiff

#endif  // SUBDIFF_ERRORS_HPP
