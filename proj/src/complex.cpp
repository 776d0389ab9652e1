#include "hodgelab/complex.hpp"

namespace hodgelab {

HilbertComplex::HilbertComplex(std::vector<SpacePtr> sp, std::vector<ComplexOperator> o)
    : spaces(std::move(sp)), ops(std::move(o)) {
  if (spaces.size() != ops.size() + 1)
    throw StructuralError("HilbertComplex: need one more space than operators");
  for (size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].domain()->dim() != spaces[i]->dim() ||
        ops[i].codomain()->dim() != spaces[i + 1]->dim())
      throw StructuralError("HilbertComplex: operator " + std::to_string(i) +
                            " does not match its spaces");
  }
}

namespace {

bool identically_zero(const SpMat& m) {
  for (Index j = 0; j < m.outerSize(); ++j)
    for (SpMat::InnerIterator it(m, j); it; ++it)
      if (it.value() != 0.0) return false;
  return true;
}

}  // namespace

ComplexCheck check_complex(const HilbertComplex& cx, Backend backend) {
  ComplexCheck out;
  out.exact = true;
  for (size_t i = 0; i + 1 < cx.ops.size(); ++i) {
    const ComplexOperator& a0 = cx.ops[i];
    const ComplexOperator& a1 = cx.ops[i + 1];
    if (a1.matrix().cols() != a0.matrix().rows())
      throw StructuralError("check_complex: shape mismatch between operators " +
                            std::to_string(i) + " and " + std::to_string(i + 1));
    SpMat prod = a1.matrix() * a0.matrix();
    prod.prune(0.0, 0.0);
    if (identically_zero(prod)) continue;
    out.exact = false;
    ComplexOperator composite(std::move(prod), a0.domain(), a1.codomain());
    out.max_product_norm =
        std::max(out.max_product_norm, operator_norm(composite, backend));
  }
  return out;
}

double complex_defect(const ComplexOperator& a0, const ComplexOperator& a1,
                      Backend backend) {
  if (a1.matrix().cols() != a0.matrix().rows())
    throw StructuralError("complex_defect: shape mismatch");
  SpMat prod = a1.matrix() * a0.matrix();
  prod.prune(0.0, 0.0);
  if (identically_zero(prod)) return 0.0;
  ComplexOperator composite(std::move(prod), a0.domain(), a1.codomain());
  const double pn = operator_norm(composite, backend);
  const double n0 = operator_norm(a0, backend);
  const double n1 = operator_norm(a1, backend);
  return (n0 > 0 && n1 > 0) ? pn / (n0 * n1) : pn;
}

}  // namespace hodgelab
