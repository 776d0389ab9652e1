#include "hodgelab/operator.hpp"

namespace hodgelab {

ComplexOperator::ComplexOperator(SpMat matrix, SpacePtr domain, SpacePtr codomain,
                                 double rank_tol)
    : matrix_(std::move(matrix)),
      domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      rank_tol_(rank_tol) {
  if (!domain_ || !codomain_) throw StructuralError("ComplexOperator: null space");
  if (matrix_.rows() != codomain_->dim() || matrix_.cols() != domain_->dim())
    throw StructuralError(
        "ComplexOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
        std::to_string(matrix_.cols()) + ", spaces are (" +
        std::to_string(codomain_->dim()) + ", " + std::to_string(domain_->dim()) + ")");
  matrix_.makeCompressed();
}

ComplexOperator::ComplexOperator(const Mat& matrix, SpacePtr domain, SpacePtr codomain,
                                 double rank_tol)
    : ComplexOperator(SpMat(matrix.sparseView()), std::move(domain),
                      std::move(codomain), rank_tol) {}

Vec ComplexOperator::apply(const Vec& x) const {
  if (x.size() != domain_->dim()) throw StructuralError("apply: dimension mismatch");
  return matrix_ * x;
}

Vec ComplexOperator::apply_adjoint(const Vec& y) const {
  if (y.size() != codomain_->dim())
    throw StructuralError("apply_adjoint: dimension mismatch");
  return domain_->solve_gram(matrix_.transpose() * codomain_->apply_gram(y));
}

Vec ComplexOperator::apply_normalized(const Vec& xhat) const {
  return codomain_->apply_sqrt(matrix_ * domain_->solve_sqrt(xhat));
}

Vec ComplexOperator::apply_normalized_t(const Vec& yhat) const {
  return domain_->solve_sqrt(matrix_.transpose() * codomain_->apply_sqrt(yhat));
}

ComplexOperator ComplexOperator::adjoint() const {
  return ComplexOperator(adjoint_matrix(*this), codomain_, domain_, rank_tol_);
}

SpMat adjoint_matrix(const ComplexOperator& op) {
  const auto& dom = *op.domain();
  const auto& cod = *op.codomain();
  if (dom.is_diagonal() && cod.is_diagonal()) {
    SpMat at = SpMat(op.matrix().transpose());
    // G_dom^{-1} A^T G_cod with diagonal grams: row/column scalings.
    Vec dl = dom.diag().cwiseInverse();
    Vec dr = cod.diag();
    SpMat b = dl.asDiagonal() * at * dr.asDiagonal();
    b.makeCompressed();
    return b;
  }
  Mat at = Mat(op.matrix().transpose()) * cod.gram_dense();
  Mat b(at.rows(), at.cols());
  for (Index j = 0; j < at.cols(); ++j) b.col(j) = dom.solve_gram(at.col(j));
  return SpMat(b.sparseView());
}

}  // namespace hodgelab
