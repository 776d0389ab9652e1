#include "hodgelab/helmholtz.hpp"

#include <cmath>
#include <random>

#include "hodgelab/lapack.hpp"
#include "hodgelab/solve.hpp"

namespace hodgelab {

namespace {

constexpr Index kDenseLimit = 3000;
constexpr double kComplexTol = 1e-12;

void require_pair(const ComplexOperator& a0, const ComplexOperator& a1) {
  if (a0.codomain()->dim() != a1.domain()->dim())
    throw StructuralError("operator pair: a0.codomain and a1.domain differ");
  if (complex_defect(a0, a1, Backend::Iterative) > kComplexTol)
    throw StructuralError("operator pair: complex property A1 A0 = 0 violated");
}

// Hodge quadratic form on the normalized middle space:
// L = Ahat1^T Ahat1 + Ahat0 Ahat0^T.
LinOp hodge_op(const ComplexOperator& a0, const ComplexOperator& a1) {
  return [&a0, &a1](const Vec& xh) {
    Vec r = a1.apply_normalized_t(a1.apply_normalized(xh));
    r += a0.apply_normalized(a0.apply_normalized_t(xh));
    return r;
  };
}

Mat hodge_dense(const ComplexOperator& a0, const ComplexOperator& a1) {
  const Index n = a1.domain()->dim();
  LinOp l = hodge_op(a0, a1);
  Mat m(n, n);
  Vec e = Vec::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    m.col(j) = l(e);
    e(j) = 0.0;
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

Mat harmonic_basis(const ComplexOperator& a0, const ComplexOperator& a1,
                   Backend backend, unsigned seed) {
  require_pair(a0, a1);
  const auto& h1 = *a1.domain();
  const Index n = h1.dim();
  if (backend == Backend::Auto)
    backend = n <= kDenseLimit ? Backend::Dense : Backend::Iterative;

  Mat basis_hat;
  if (backend == Backend::Dense) {
    Mat l = hodge_dense(a0, a1);
    SymEig eig = sym_eig(l, /*compute_vectors=*/true);
    const double lmax = eig.values.size() > 0 ? eig.values(eig.values.size() - 1) : 0.0;
    const double cutoff = std::max(a1.rank_tol() * lmax, 0.0);
    Index k = 0;
    while (k < eig.values.size() && eig.values(k) <= cutoff) ++k;
    basis_hat = eig.vectors.leftCols(k);
  } else {
    // Kernel probing: harmonic part of x is x - L^+ L x, CG on the
    // consistent system L y = L x.
    LinOp l = hodge_op(a0, a1);
    std::mt19937_64 rng(seed ^ 0x5bf03635f0c95a77ull);
    std::normal_distribution<double> gauss;
    std::vector<Vec> basis;
    Index budget = 8;
    const Index max_budget = 64;
    Index done = 0;
    while (true) {
      for (; done < budget; ++done) {
        Vec x(n);
        for (Index i = 0; i < n; ++i) x(i) = gauss(rng);
        x /= x.norm();
        CgResult cg = conjugate_gradient(l, l(x), 1e-12);
        Vec h = x - cg.x;
        // modified Gram-Schmidt, re-orthogonalized once
        for (const Vec& b : basis) h -= b.dot(h) * b;
        for (const Vec& b : basis) h -= b.dot(h) * b;
        if (h.norm() > 1e-6) basis.push_back(h / h.norm());
      }
      if (static_cast<Index>(basis.size()) < budget) break;
      if (budget >= max_budget)
        throw NumericalError("harmonic_basis: cohomology too large for probing");
      budget = std::min(max_budget, 2 * budget);
    }
    basis_hat.resize(n, static_cast<Index>(basis.size()));
    for (Index j = 0; j < basis_hat.cols(); ++j) basis_hat.col(j) = basis[j];
  }
  Mat basis(n, basis_hat.cols());
  for (Index j = 0; j < basis.cols(); ++j) basis.col(j) = h1.solve_sqrt(basis_hat.col(j));
  return basis;
}

HelmholtzParts helmholtz3(const Vec& x, const ComplexOperator& a0,
                          const ComplexOperator& a1, Backend backend,
                          const Mat* harmonic) {
  require_pair(a0, a1);
  const auto& h1 = *a1.domain();
  if (x.size() != h1.dim()) throw StructuralError("helmholtz3: dimension mismatch");
  HelmholtzParts parts;
  LeastSquaresResult ls = least_squares(a0, x);
  parts.range_prev = a0.apply(ls.x);
  Mat basis;
  if (!harmonic) {
    basis = harmonic_basis(a0, a1, backend);
    harmonic = &basis;
  }
  parts.harmonic = Vec::Zero(x.size());
  for (Index j = 0; j < harmonic->cols(); ++j) {
    const Vec& h = harmonic->col(j);
    parts.harmonic += h1.inner(h, x) * h;
  }
  parts.range_next_adjoint = x - parts.range_prev - parts.harmonic;
  parts.residual =
      h1.norm(x - parts.range_prev - parts.harmonic - parts.range_next_adjoint);
  return parts;
}

HelmholtzPair helmholtz2(const Vec& x, const ComplexOperator& op, HelmholtzSide side) {
  HelmholtzPair pair;
  if (side == HelmholtzSide::Kernel) {
    if (x.size() != op.domain()->dim())
      throw StructuralError("helmholtz2: dimension mismatch");
    // Projection onto R(A*): minimize ||B u - x||_domain over u.
    ComplexOperator b = op.adjoint();
    LeastSquaresResult ls = least_squares(b, x);
    pair.range = b.apply(ls.x);
    pair.kernel = x - pair.range;
  } else {
    if (x.size() != op.codomain()->dim())
      throw StructuralError("helmholtz2: dimension mismatch");
    LeastSquaresResult ls = least_squares(op, x);
    pair.range = op.apply(ls.x);
    pair.kernel = x - pair.range;
  }
  return pair;
}

MaxwellConstant maxwell_constant(const ComplexOperator& a0, const ComplexOperator& a1,
                                 Backend backend, unsigned seed) {
  require_pair(a0, a1);
  const Index n = a1.domain()->dim();
  if (backend == Backend::Auto)
    backend = n <= kDenseLimit ? Backend::Dense : Backend::Iterative;
  MaxwellConstant out;
  if (backend == Backend::Dense) {
    Mat l = hodge_dense(a0, a1);
    SymEig eig = sym_eig(l, false);
    const double lmax = eig.values(eig.values.size() - 1);
    if (lmax <= 0.0) {
      out.trivial = true;
      return out;
    }
    const double cutoff = a1.rank_tol() * lmax;
    for (Index i = 0; i < eig.values.size(); ++i)
      if (eig.values(i) > cutoff) {
        out.value = 1.0 / std::sqrt(eig.values(i));
        return out;
      }
    out.trivial = true;  // N_{0,1} is all of H_1
    return out;
  }
  LinOp l = hodge_op(a0, a1);
  const double lmax = largest_eigenvalue(l, n, seed);
  if (lmax <= 0.0) {
    out.trivial = true;
    return out;
  }
  const double lmin = smallest_positive_eigenvalue(l, n, lmax, seed);
  out.value = 1.0 / std::sqrt(lmin);
  return out;
}

Index cohomology_dim_rank_nullity(const ComplexOperator& a0, const ComplexOperator& a1,
                                  Backend backend) {
  require_pair(a0, a1);
  SpectralReport r0 = spectral_report(a0, backend);
  SpectralReport r1 = spectral_report(a1, backend);
  return r1.kernel_dim - r0.rank;
}

}  // namespace hodgelab
