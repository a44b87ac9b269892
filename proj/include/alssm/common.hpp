#ifndef ALSSM_COMMON_HPP
#define ALSSM_COMMON_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace alssm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Invalid parameters, malformed configs, bad input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular systems, non-finite iterates, failed factorizations.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

// Force exact symmetry; filters and smoothers call this after every
// covariance-producing step.
inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace alssm

#endif  // ALSSM_COMMON_HPP
