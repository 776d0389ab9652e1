#ifndef HODGELAB_DUAL_NORM_HPP_
#define HODGELAB_DUAL_NORM_HPP_

#include <Eigen/SparseCholesky>

#include <optional>
#include <vector>

#include "hodgelab/operator.hpp"
#include "hodgelab/spectral.hpp"

namespace hodgelab {

/// Norm of the extension Atilde x in D(A*)': a single SPD solve against
/// the cached graph Gram matrix G_graph = G_cod + B^T G_dom B.
class DualNormProblem {
 public:
  explicit DualNormProblem(ComplexOperator op);

  const ComplexOperator& op() const { return op_; }
  const SpMat& adjoint() const { return adjoint_; }

  /// sup over phi != 0 of <A* phi, x> / sqrt(|phi|^2 + |A* phi|^2).
  double dual_norm(const Vec& x) const;

  /// G_graph^{-1} w
  Vec solve_graph(const Vec& w) const;

 private:
  ComplexOperator op_;
  SpMat adjoint_;  // B
  Eigen::SimplicialLDLT<SpMat> graph_llt_;
};

struct ReducedDualNorm {
  double full = 0.0;
  double reduced = 0.0;
  double rel_gap = 0.0;
};

/// The norm identity |Atilde x| = |cAtilde iota* x| between the full and
/// the reduced extensions.
ReducedDualNorm reduced_dual_norm_identity(const DualNormProblem& problem, const Vec& x);

struct CompactnessDiagnostics {
  std::vector<double> projection_modulus;  // Cauchy modulus of (pi_{R(A*)} x_n)
  std::vector<double> dual_modulus;        // Cauchy modulus of (Atilde x_n)
  double c_a = 0.0;
  // dual <= projection and projection <= sqrt(1 + c_a^2) * dual per tail index
  bool equivalence_ok = false;
  double worst_ratio = 0.0;
};

/// Finite-family surrogate for the relative-compactness equivalences:
/// Cauchy moduli of the two sequences plus the two-sided bound tying them.
/// Relative compactness itself is not decidable from finitely many members.
CompactnessDiagnostics sequence_compactness_diagnostics(const DualNormProblem& problem,
                                                        const std::vector<Vec>& xs);

struct ReducedExtensionCondition {
  double cond_extension = 0.0;  // condition number of the reduced extension
  double sigma_ratio = 0.0;     // sigma_max / sigma_min of the reduced operator
};

/// Both are finite exactly when the reduced operator is a topological
/// isomorphism; in the graph-dual norm the extension condition equals
/// f(sigma_max)/f(sigma_min) with f(s) = s/sqrt(1+s^2) <= sigma_ratio.
ReducedExtensionCondition reduced_extension_condition(const DualNormProblem& problem);

}  // namespace hodgelab

#endif  // HODGELAB_DUAL_NORM_HPP_
