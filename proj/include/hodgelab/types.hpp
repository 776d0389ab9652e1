#ifndef HODGELAB_TYPES_HPP_
#define HODGELAB_TYPES_HPP_

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace hodgelab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;
using Triplet = Eigen::Triplet<double>;

/// Structural problems: shape mismatches, invalid configurations,
/// inconsistent chains. CLI maps these to exit code 1.
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical problems: solver non-convergence, data outside the
/// admissible set (e.g. right-hand side not in the range).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// c_A in (0, inf]; the unbounded case is an explicit state, never a
/// sentinel float.
struct PoincareConstant {
  bool unbounded = false;
  double value = 0.0;  // valid only when !unbounded

  static PoincareConstant infinite() { return {true, 0.0}; }
  static PoincareConstant finite(double v) { return {false, v}; }
};

}  // namespace hodgelab

#endif  // HODGELAB_TYPES_HPP_
