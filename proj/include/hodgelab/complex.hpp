#ifndef HODGELAB_COMPLEX_HPP_
#define HODGELAB_COMPLEX_HPP_

#include <vector>

#include "hodgelab/operator.hpp"
#include "hodgelab/spectral.hpp"

namespace hodgelab {

/// Ordered chain H_0 -> H_1 -> ... with the complex property A_{i+1} A_i = 0.
struct HilbertComplex {
  std::vector<SpacePtr> spaces;
  std::vector<ComplexOperator> ops;

  HilbertComplex(std::vector<SpacePtr> sp, std::vector<ComplexOperator> o);

  Index length() const { return static_cast<Index>(ops.size()); }
};

struct ComplexCheck {
  double max_product_norm = 0.0;  // largest weighted norm among A_{i+1} A_i
  bool exact = false;             // every product identically the zero matrix
};

ComplexCheck check_complex(const HilbertComplex& cx, Backend backend = Backend::Auto);

/// Relative complex-property defect of one consecutive pair, for callers
/// holding operators outside a HilbertComplex.
double complex_defect(const ComplexOperator& a0, const ComplexOperator& a1,
                      Backend backend = Backend::Auto);

}  // namespace hodgelab

#endif  // HODGELAB_COMPLEX_HPP_
