#ifndef HODGELAB_SOLVE_HPP_
#define HODGELAB_SOLVE_HPP_

#include <functional>

#include "hodgelab/operator.hpp"
#include "hodgelab/types.hpp"

namespace hodgelab {

/// Matrix-free symmetric positive (semi-)definite operator.
using LinOp = std::function<Vec(const Vec&)>;

struct CgResult {
  Vec x;
  double rel_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Plain preconditioned CG on S x = b.  For a consistent semi-definite
/// system with b in R(S) the iterates stay in R(S) and the limit is the
/// minimal-norm solution.
CgResult conjugate_gradient(const LinOp& s, const Vec& b, double rel_tol = 1e-12,
                            int max_iter = 0, const Vec* diag_precond = nullptr);

/// Largest eigenvalue of a symmetric PSD operator by power iteration.
double largest_eigenvalue(const LinOp& s, Index dim, unsigned seed = 0,
                          double rel_tol = 1e-10, int max_iter = 10000);

/// Smallest nonzero eigenvalue of a symmetric PSD operator.  Shift-invert
/// Krylov with Rayleigh-Ritz extraction: the subspace is grown by CG solves
/// of S w = v (consistent, since every basis vector is re-projected onto
/// R(S) via the minimal-norm solve of S y = S w), and the Ritz pair is
/// certified with fresh matvecs, so a kernel-collapsed iterate cannot pass.
/// max_outer caps the number of inverse applies.
double smallest_positive_eigenvalue(const LinOp& s, Index dim, double lambda_max,
                                    unsigned seed = 0, double rel_tol = 1e-7,
                                    int max_outer = 200);

struct LeastSquaresResult {
  Vec x;                 // minimal-norm minimizer, lies in R(A*)
  double residual_norm;  // ||A x - y||_codomain
  int iterations = 0;
};

/// Weighted least squares min ||A x - y||_{codomain}; the minimal-norm
/// solution in the domain metric.  Dense path uses the SVD pseudoinverse,
/// iterative path CG on the normalized normal equations (diagonal
/// preconditioner from the weighted normal matrix).
LeastSquaresResult least_squares(const ComplexOperator& op, const Vec& y,
                                 double rel_tol = 1e-13, int max_iter = 0);

/// Unique x in R(A*) with A x = y, for y in R(A).  Throws NumericalError
/// reporting the defect norm when y has a component outside R(A) beyond
/// range_tol * ||y||.
Vec solve_reduced(const ComplexOperator& op, const Vec& y, double range_tol = 1e-8);

}  // namespace hodgelab

#endif  // HODGELAB_SOLVE_HPP_
