#ifndef HODGELAB_SPECTRAL_HPP_
#define HODGELAB_SPECTRAL_HPP_

#include <vector>

#include "hodgelab/operator.hpp"
#include "hodgelab/types.hpp"

namespace hodgelab {

enum class Backend {
  Auto,       // dense when the smaller side fits, iterative otherwise
  Dense,      // full eigendecomposition of the normal matrix
  Iterative,  // power / inverse iteration with CG, kernel probed
};

struct SpectralReport {
  Index rank = 0;
  Index kernel_dim = 0;
  PoincareConstant poincare_constant;
  std::vector<double> singular_values;  // descending; iterative backend
                                        // reports only {sigma_max, sigma_min_retained}
};

/// Singular data of the metric-normalized operator G_cod^{1/2} A G_dom^{-1/2}.
/// rank counts sigma > rank_tol * sigma_max; c_A = 1 / smallest retained sigma.
SpectralReport spectral_report(const ComplexOperator& op, Backend backend = Backend::Auto,
                               unsigned seed = 0);

struct PoincareDuality {
  double c_a = 0.0;
  double c_astar = 0.0;
  double rel_gap = 0.0;
};

/// c_A and c_{A*} computed independently (from A and from its adjoint);
/// they coincide in exact arithmetic.  Throws on rank-zero operators.
PoincareDuality poincare_duality_check(const ComplexOperator& op,
                                       Backend backend = Backend::Auto,
                                       unsigned seed = 0);

/// sigma_max of the metric-normalized operator (the weighted operator norm).
double operator_norm(const ComplexOperator& op, Backend backend = Backend::Auto,
                     unsigned seed = 0);

/// Dense G_cod^{1/2} A G_dom^{-1/2}; Euclidean SVD of this matrix is the
/// metric SVD of A.
Mat normalized_dense(const ComplexOperator& op);

/// Weighted-orthogonal projectors onto R(A) and R(A*) as explicit dense
/// matrices, assembled from the retained singular subspaces (dense only).
struct ProjectionPair {
  Mat pi_range;          // codomain -> codomain
  Mat pi_range_adjoint;  // domain -> domain
};

ProjectionPair projection_pair(const ComplexOperator& op);

}  // namespace hodgelab

#endif  // HODGELAB_SPECTRAL_HPP_
