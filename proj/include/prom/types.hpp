#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace prom {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Mat<double>;
using VectorXd = Vec<double>;

/// Invalid input: malformed config, violated precondition, bad dimensions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation failed to produce a usable number (non-convergence,
/// ill-conditioning, rank deficiency).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query outside the parameter domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

}  // namespace prom
