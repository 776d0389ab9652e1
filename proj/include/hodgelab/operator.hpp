#ifndef HODGELAB_OPERATOR_HPP_
#define HODGELAB_OPERATOR_HPP_

#include <utility>

#include "hodgelab/space.hpp"
#include "hodgelab/types.hpp"

namespace hodgelab {

/// A linear map between two InnerProductSpaces, given by its matrix.
/// Houses the operator A, its metric adjoint A*, and (through the
/// spectral module) the reduced parts.
///
/// Immutable after construction; all queries are pure.
class ComplexOperator {
 public:
  static constexpr double kDefaultRankTol = 1e-10;

  ComplexOperator(SpMat matrix, SpacePtr domain, SpacePtr codomain,
                  double rank_tol = kDefaultRankTol);
  ComplexOperator(const Mat& matrix, SpacePtr domain, SpacePtr codomain,
                  double rank_tol = kDefaultRankTol);

  const SpMat& matrix() const { return matrix_; }
  const SpacePtr& domain() const { return domain_; }
  const SpacePtr& codomain() const { return codomain_; }
  double rank_tol() const { return rank_tol_; }

  Vec apply(const Vec& x) const;
  /// A* y with A* = G_dom^{-1} A^T G_cod.
  Vec apply_adjoint(const Vec& y) const;

  /// Normalized operator G_cod^{1/2} A G_dom^{-1/2} (and its transpose),
  /// whose Euclidean singular values are the metric singular values of A.
  Vec apply_normalized(const Vec& xhat) const;
  Vec apply_normalized_t(const Vec& yhat) const;

  /// The dual-pair partner as a first-class operator (codomain -> domain).
  ComplexOperator adjoint() const;

 private:
  SpMat matrix_;
  SpacePtr domain_;
  SpacePtr codomain_;
  double rank_tol_;
};

/// B = G_dom^{-1} A^T G_cod as an explicit sparse matrix.  For dense
/// grams the result is dense-filled but returned in sparse storage.
SpMat adjoint_matrix(const ComplexOperator& op);

}  // namespace hodgelab

#endif  // HODGELAB_OPERATOR_HPP_
