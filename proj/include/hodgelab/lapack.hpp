#ifndef HODGELAB_LAPACK_HPP_
#define HODGELAB_LAPACK_HPP_

#include "hodgelab/types.hpp"

namespace hodgelab {

/// Eigendecomposition of a symmetric matrix, ascending eigenvalues.
/// Backed by LAPACK dsyevd; falls back to Eigen for tiny sizes.
struct SymEig {
  Vec values;
  Mat vectors;  // empty when compute_vectors == false
};

SymEig sym_eig(const Mat& a, bool compute_vectors = true);

/// Singular values of a rectangular matrix, descending.  Backed by LAPACK
/// dgesdd; accurate to O(eps * sigma_max), unlike eigenvalues of the
/// normal matrix whose square roots carry O(sqrt(eps)) noise.
Vec singular_values(const Mat& a);

}  // namespace hodgelab

#endif  // HODGELAB_LAPACK_HPP_
