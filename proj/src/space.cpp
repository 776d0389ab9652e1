#include "hodgelab/space.hpp"

#include <cmath>

#include "hodgelab/lapack.hpp"

namespace hodgelab {

namespace {
constexpr double kSymTol = 1e-12;
}

InnerProductSpace InnerProductSpace::euclidean(Index dim) {
  return diagonal(Vec::Ones(dim));
}

InnerProductSpace InnerProductSpace::diagonal(Vec weights) {
  if ((weights.array() <= 0.0).any())
    throw StructuralError("InnerProductSpace: diagonal gram has non-positive weight");
  InnerProductSpace s;
  s.dim_ = weights.size();
  s.diagonal_ = true;
  s.diag_sqrt_ = weights.array().sqrt();
  s.diag_ = std::move(weights);
  return s;
}

InnerProductSpace InnerProductSpace::dense(const Mat& gram) {
  if (gram.rows() != gram.cols())
    throw StructuralError("InnerProductSpace: gram not square");
  const double scale = gram.cwiseAbs().maxCoeff();
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale)
    throw StructuralError("InnerProductSpace: gram not symmetric within 1e-12");
  SymEig eig = sym_eig(0.5 * (gram + gram.transpose()));
  if (eig.values.size() > 0 && eig.values(0) <= 0.0)
    throw StructuralError("InnerProductSpace: gram not positive definite");
  InnerProductSpace s;
  s.dim_ = gram.rows();
  s.diagonal_ = false;
  s.gram_ = gram;
  s.eigvecs_ = std::move(eig.vectors);
  s.eigvals_ = std::move(eig.values);
  return s;
}

double InnerProductSpace::inner(const Vec& x, const Vec& y) const {
  return x.dot(apply_gram(y));
}

double InnerProductSpace::norm(const Vec& x) const {
  return std::sqrt(std::max(0.0, inner(x, x)));
}

Vec InnerProductSpace::apply_gram(const Vec& x) const {
  if (x.size() != dim_) throw StructuralError("apply_gram: dimension mismatch");
  if (diagonal_) return diag_.cwiseProduct(x);
  return gram_ * x;
}

Vec InnerProductSpace::solve_gram(const Vec& x) const {
  if (x.size() != dim_) throw StructuralError("solve_gram: dimension mismatch");
  if (diagonal_) return x.cwiseQuotient(diag_);
  Vec c = eigvecs_.transpose() * x;
  c.array() /= eigvals_.array();
  return eigvecs_ * c;
}

Vec InnerProductSpace::apply_sqrt(const Vec& x) const {
  if (x.size() != dim_) throw StructuralError("apply_sqrt: dimension mismatch");
  if (diagonal_) return diag_sqrt_.cwiseProduct(x);
  Vec c = eigvecs_.transpose() * x;
  c.array() *= eigvals_.array().sqrt();
  return eigvecs_ * c;
}

Vec InnerProductSpace::solve_sqrt(const Vec& x) const {
  if (x.size() != dim_) throw StructuralError("solve_sqrt: dimension mismatch");
  if (diagonal_) return x.cwiseQuotient(diag_sqrt_);
  Vec c = eigvecs_.transpose() * x;
  c.array() /= eigvals_.array().sqrt();
  return eigvecs_ * c;
}

const Vec& InnerProductSpace::diag() const {
  if (!diagonal_) throw StructuralError("diag(): space has a dense gram");
  return diag_;
}

Mat InnerProductSpace::gram_dense() const {
  if (diagonal_) return Mat(diag_.asDiagonal());
  return gram_;
}

SpacePtr make_euclidean(Index dim) {
  return std::make_shared<InnerProductSpace>(InnerProductSpace::euclidean(dim));
}
SpacePtr make_diagonal(Vec weights) {
  return std::make_shared<InnerProductSpace>(InnerProductSpace::diagonal(std::move(weights)));
}
SpacePtr make_dense(const Mat& gram) {
  return std::make_shared<InnerProductSpace>(InnerProductSpace::dense(gram));
}

}  // namespace hodgelab
