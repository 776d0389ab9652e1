#ifndef HODGELAB_HELMHOLTZ_HPP_
#define HODGELAB_HELMHOLTZ_HPP_

#include "hodgelab/complex.hpp"
#include "hodgelab/operator.hpp"
#include "hodgelab/spectral.hpp"

namespace hodgelab {

/// H_1-orthonormal basis of the cohomology space N_{0,1} = N(A_1) cap N(A_0*),
/// returned as columns in the original (unweighted) coordinates.
Mat harmonic_basis(const ComplexOperator& a0, const ComplexOperator& a1,
                   Backend backend = Backend::Auto, unsigned seed = 0);

/// The triple decomposition H_1 = R(A_0) + N_{0,1} + R(A_1*) of a vector.
struct HelmholtzParts {
  Vec range_prev;          // component in R(A_0)
  Vec harmonic;            // component in N_{0,1}
  Vec range_next_adjoint;  // component in R(A_1*)
  double residual = 0.0;   // norm of x minus the recomposition
};

HelmholtzParts helmholtz3(const Vec& x, const ComplexOperator& a0,
                          const ComplexOperator& a1, Backend backend = Backend::Auto,
                          const Mat* harmonic = nullptr);

enum class HelmholtzSide {
  Kernel,  // split the domain:   H = N(A) + R(A*)
  Range,   // split the codomain: H = N(A*) + R(A)
};

struct HelmholtzPair {
  Vec kernel;  // component in N(A) (resp. N(A*))
  Vec range;   // component in R(A*) (resp. R(A))
};

HelmholtzPair helmholtz2(const Vec& x, const ComplexOperator& op, HelmholtzSide side);

struct MaxwellConstant {
  double value = 0.0;
  bool trivial = false;  // both operators vanish on all of H_1
};

/// Smallest c with ||x|| <= c (||A_1 x|| + ||A_0* x||) for x orthogonal to
/// N_{0,1}; computed as 1/sqrt(lambda_min-positive) of the Hodge form
/// ||A_1 x||^2 + ||A_0* x||^2.
MaxwellConstant maxwell_constant(const ComplexOperator& a0, const ComplexOperator& a1,
                                 Backend backend = Backend::Auto, unsigned seed = 0);

/// dim N_{0,1} through ranks: dim N(A_1) - rank(A_0).
Index cohomology_dim_rank_nullity(const ComplexOperator& a0, const ComplexOperator& a1,
                                  Backend backend = Backend::Auto);

}  // namespace hodgelab

#endif  // HODGELAB_HELMHOLTZ_HPP_
