#ifndef HODGELAB_SPACE_HPP_
#define HODGELAB_SPACE_HPP_

#include <memory>

#include "hodgelab/types.hpp"

namespace hodgelab {

/// Finite-dimensional Hilbert space with a symmetric positive-definite
/// Gram (mass) matrix.  Diagonal grams (all shipped de Rham spaces) take
/// fast elementwise paths; general SPD grams go through a dense
/// eigendecomposition computed once at construction.
///
/// Immutable after construction and safe to share across threads.
class InnerProductSpace {
 public:
  static InnerProductSpace euclidean(Index dim);
  static InnerProductSpace diagonal(Vec weights);
  static InnerProductSpace dense(const Mat& gram);

  Index dim() const { return dim_; }
  bool is_diagonal() const { return diagonal_; }

  double inner(const Vec& x, const Vec& y) const;
  double norm(const Vec& x) const;

  /// G x
  Vec apply_gram(const Vec& x) const;
  /// G^{-1} x
  Vec solve_gram(const Vec& x) const;
  /// G^{1/2} x (symmetric square root)
  Vec apply_sqrt(const Vec& x) const;
  /// G^{-1/2} x
  Vec solve_sqrt(const Vec& x) const;

  /// Diagonal entries; only valid for diagonal spaces.
  const Vec& diag() const;
  /// Dense gram; materialized on demand for diagonal spaces.
  Mat gram_dense() const;

 private:
  InnerProductSpace() = default;

  Index dim_ = 0;
  bool diagonal_ = true;
  Vec diag_;        // diagonal case: weights
  Vec diag_sqrt_;   // cached sqrt of weights
  Mat gram_;        // dense case
  Mat eigvecs_;     // dense case: gram = Q diag(ev) Q^T
  Vec eigvals_;
};

using SpacePtr = std::shared_ptr<const InnerProductSpace>;

SpacePtr make_euclidean(Index dim);
SpacePtr make_diagonal(Vec weights);
SpacePtr make_dense(const Mat& gram);

}  // namespace hodgelab

#endif  // HODGELAB_SPACE_HPP_
