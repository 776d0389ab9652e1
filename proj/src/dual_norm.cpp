#include "hodgelab/dual_norm.hpp"

#include <cmath>

#include "hodgelab/lapack.hpp"
#include "hodgelab/solve.hpp"

namespace hodgelab {

namespace {

SpMat gram_sparse(const InnerProductSpace& sp) {
  if (sp.is_diagonal()) {
    SpMat g(sp.dim(), sp.dim());
    g.reserve(Eigen::VectorXi::Constant(sp.dim(), 1));
    for (Index i = 0; i < sp.dim(); ++i) g.insert(i, i) = sp.diag()(i);
    g.makeCompressed();
    return g;
  }
  return SpMat(sp.gram_dense().sparseView());
}

}  // namespace

DualNormProblem::DualNormProblem(ComplexOperator op)
    : op_(std::move(op)), adjoint_(adjoint_matrix(op_)) {
  const SpMat g_dom = gram_sparse(*op_.domain());
  const SpMat g_cod = gram_sparse(*op_.codomain());
  SpMat g_graph = g_cod + SpMat(adjoint_.transpose() * g_dom * adjoint_);
  g_graph.makeCompressed();
  graph_llt_.compute(g_graph);
  if (graph_llt_.info() != Eigen::Success)
    throw NumericalError("DualNormProblem: graph Gram factorization failed");
}

Vec DualNormProblem::solve_graph(const Vec& w) const { return graph_llt_.solve(w); }

double DualNormProblem::dual_norm(const Vec& x) const {
  if (x.size() != op_.domain()->dim())
    throw StructuralError("dual_norm: dimension mismatch");
  const Vec w = adjoint_.transpose() * op_.domain()->apply_gram(x);
  const double val = w.dot(solve_graph(w));
  return std::sqrt(std::max(0.0, val));
}

ReducedDualNorm reduced_dual_norm_identity(const DualNormProblem& problem, const Vec& x) {
  const ComplexOperator& op = problem.op();
  ReducedDualNorm out;
  out.full = problem.dual_norm(x);

  // Reduced side: the supremum only sees the component of x in R(A*),
  // because the numerator <A*phi, x> annihilates N(A).  The minimal-norm
  // least-squares solution of A y = A x is exactly pi_{R(A*)} x, so the
  // reduced evaluation is the dual norm of that projection.
  LeastSquaresResult ls = least_squares(op, op.apply(x), 1e-13);
  out.reduced = problem.dual_norm(ls.x);
  out.rel_gap = std::abs(out.full - out.reduced) / std::max(out.full, 1e-300);
  return out;
}

CompactnessDiagnostics sequence_compactness_diagnostics(const DualNormProblem& problem,
                                                        const std::vector<Vec>& xs) {
  if (xs.size() < 2)
    throw StructuralError("sequence_compactness_diagnostics: need at least 2 vectors");
  const ComplexOperator& op = problem.op();
  const auto& h1 = *op.domain();
  CompactnessDiagnostics out;

  ComplexOperator b_op = op.adjoint();
  std::vector<Vec> proj(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    LeastSquaresResult ls = least_squares(b_op, xs[i]);
    proj[i] = b_op.apply(ls.x);
  }
  const size_t n = xs.size();
  out.projection_modulus.assign(n - 1, 0.0);
  out.dual_modulus.assign(n - 1, 0.0);
  for (size_t m = 0; m + 1 < n; ++m) {
    double pa = 0.0, pb = 0.0;
    for (size_t j = m; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        pa = std::max(pa, h1.norm(proj[j] - proj[k]));
        pb = std::max(pb, problem.dual_norm(xs[j] - xs[k]));
      }
    out.projection_modulus[m] = pa;
    out.dual_modulus[m] = pb;
  }
  SpectralReport rep = spectral_report(op);
  if (rep.poincare_constant.unbounded)
    throw NumericalError("sequence_compactness_diagnostics: zero operator");
  out.c_a = rep.poincare_constant.value;
  const double amp = std::sqrt(1.0 + out.c_a * out.c_a);
  out.equivalence_ok = true;
  out.worst_ratio = 0.0;
  const double scale = 1e-12 * (1.0 + out.projection_modulus[0]);
  for (size_t m = 0; m + 1 < n; ++m) {
    const double a = out.projection_modulus[m];
    const double b = out.dual_modulus[m];
    if (b > a + scale) out.equivalence_ok = false;
    if (a > amp * b + scale) out.equivalence_ok = false;
    if (b > scale) out.worst_ratio = std::max(out.worst_ratio, a / b);
  }
  return out;
}

ReducedExtensionCondition reduced_extension_condition(const DualNormProblem& problem) {
  SpectralReport rep = spectral_report(problem.op());
  if (rep.rank == 0)
    throw NumericalError("reduced_extension_condition: rank-zero operator");
  const double smax = rep.singular_values.front();
  double smin = smax;
  const double cutoff = problem.op().rank_tol() * smax;
  for (double s : rep.singular_values)
    if (s > cutoff) smin = s;
  const auto f = [](double s) { return s / std::sqrt(1.0 + s * s); };
  ReducedExtensionCondition out;
  out.sigma_ratio = smax / smin;
  out.cond_extension = f(smax) / f(smin);
  return out;
}

}  // namespace hodgelab
