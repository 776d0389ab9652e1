#include "hodgelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hodgelab/lapack.hpp"
#include "hodgelab/solve.hpp"

namespace hodgelab {

namespace {

// Above this size a full dense eigendecomposition is no longer the fast
// path on one core; Auto switches to the iterative backend.
constexpr Index kDenseLimit = 3000;

}  // namespace

Mat normalized_dense(const ComplexOperator& op) {
  const Index m = op.codomain()->dim();
  const Index n = op.domain()->dim();
  Mat ahat(m, n);
  Mat a = Mat(op.matrix());
  for (Index j = 0; j < n; ++j) ahat.col(j) = op.codomain()->apply_sqrt(a.col(j));
  // right scaling by G_dom^{-1/2}
  if (op.domain()->is_diagonal()) {
    for (Index j = 0; j < n; ++j) ahat.col(j) /= std::sqrt(op.domain()->diag()(j));
  } else {
    Mat t = ahat.transpose();
    for (Index i = 0; i < m; ++i) t.col(i) = op.domain()->solve_sqrt(t.col(i));
    ahat = t.transpose();
  }
  return ahat;
}

namespace {

Backend pick(const ComplexOperator& op, Backend b) {
  if (b != Backend::Auto) return b;
  const Index small_side = std::min(op.domain()->dim(), op.codomain()->dim());
  return small_side <= kDenseLimit ? Backend::Dense : Backend::Iterative;
}

LinOp domain_normal_op(const ComplexOperator& op) {
  return [&op](const Vec& x) { return op.apply_normalized_t(op.apply_normalized(x)); };
}

LinOp codomain_normal_op(const ComplexOperator& op) {
  return [&op](const Vec& y) { return op.apply_normalized(op.apply_normalized_t(y)); };
}

// Kernel dimension of the domain-side normal matrix, found by projecting
// random probes onto the kernel with CG and counting independent results.
Index probe_kernel_dim(const ComplexOperator& op, double lambda_max, unsigned seed) {
  const Index n = op.domain()->dim();
  LinOp s = domain_normal_op(op);
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5deadbeefull);
  std::normal_distribution<double> gauss;
  std::vector<Vec> basis;
  Index budget = 8;
  const Index max_budget = 64;
  Index probes_done = 0;
  while (true) {
    for (; probes_done < budget; ++probes_done) {
      Vec x(n);
      for (Index i = 0; i < n; ++i) x(i) = gauss(rng);
      x /= x.norm();
      Vec sx = s(x);
      CgResult cg = conjugate_gradient(s, sx, 1e-12);
      Vec k = x - cg.x;  // kernel component of x
      for (const Vec& b : basis) k -= b.dot(k) * b;
      for (const Vec& b : basis) k -= b.dot(k) * b;
      if (k.norm() > 1e-6) basis.push_back(k / k.norm());
    }
    if (static_cast<Index>(basis.size()) < budget) break;
    if (budget >= max_budget)
      throw NumericalError(
          "spectral_report: kernel too large for iterative rank detection; "
          "use the dense backend");
    budget = std::min(max_budget, 2 * budget);
  }
  (void)lambda_max;
  return static_cast<Index>(basis.size());
}

}  // namespace

SpectralReport spectral_report(const ComplexOperator& op, Backend backend,
                               unsigned seed) {
  const Index n = op.domain()->dim();
  const Index m = op.codomain()->dim();
  SpectralReport rep;
  if (n == 0) {
    rep.poincare_constant = PoincareConstant::infinite();
    return rep;
  }
  backend = pick(op, backend);
  if (backend == Backend::Dense) {
    Vec sv = singular_values(normalized_dense(op));
    rep.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = rep.singular_values.empty() ? 0.0 : rep.singular_values.front();
    const double cutoff = op.rank_tol() * smax;
    Index rank = 0;
    double smin_kept = 0.0;
    for (double s : rep.singular_values)
      if (s > cutoff) {
        ++rank;
        smin_kept = s;
      }
    rep.rank = rank;
    rep.kernel_dim = n - rank;
    rep.poincare_constant =
        rank > 0 ? PoincareConstant::finite(1.0 / smin_kept) : PoincareConstant::infinite();
    return rep;
  }
  // Iterative backend.
  const bool domain_side = n <= m;
  LinOp s = domain_side ? domain_normal_op(op) : codomain_normal_op(op);
  const Index side_dim = domain_side ? n : m;
  const double lambda_max = largest_eigenvalue(s, side_dim, seed);
  if (lambda_max <= 0.0) {
    rep.rank = 0;
    rep.kernel_dim = n;
    rep.poincare_constant = PoincareConstant::infinite();
    return rep;
  }
  const Index kdim = probe_kernel_dim(op, lambda_max, seed);
  rep.kernel_dim = kdim;
  rep.rank = n - kdim;
  const double lambda_min = smallest_positive_eigenvalue(s, side_dim, lambda_max, seed);
  const double smax = std::sqrt(lambda_max);
  const double smin = std::sqrt(std::max(0.0, lambda_min));
  rep.singular_values = {smax, smin};
  rep.poincare_constant =
      rep.rank > 0 ? PoincareConstant::finite(1.0 / smin) : PoincareConstant::infinite();
  return rep;
}

double operator_norm(const ComplexOperator& op, Backend backend, unsigned seed) {
  const Index n = op.domain()->dim();
  const Index m = op.codomain()->dim();
  if (n == 0 || m == 0) return 0.0;
  backend = pick(op, backend);
  if (backend == Backend::Dense) {
    Mat ahat = normalized_dense(op);
    Mat normal =
        n <= m ? Mat(ahat.transpose() * ahat) : Mat(ahat * ahat.transpose());
    SymEig eig = sym_eig(normal, false);
    return std::sqrt(std::max(0.0, eig.values(eig.values.size() - 1)));
  }
  const bool domain_side = n <= m;
  LinOp s = domain_side ? domain_normal_op(op) : codomain_normal_op(op);
  return std::sqrt(std::max(0.0, largest_eigenvalue(s, domain_side ? n : m, seed)));
}

namespace {

// c_A without rank bookkeeping: 1 / smallest retained singular value.
double poincare_value(const ComplexOperator& op, Backend backend, unsigned seed) {
  backend = pick(op, backend);
  if (backend == Backend::Dense) {
    SpectralReport rep = spectral_report(op, Backend::Dense, seed);
    if (rep.rank == 0) throw NumericalError("poincare_duality_check: no reduced operator");
    return rep.poincare_constant.value;
  }
  const Index n = op.domain()->dim();
  const Index m = op.codomain()->dim();
  const bool domain_side = n <= m;
  LinOp s = domain_side ? domain_normal_op(op) : codomain_normal_op(op);
  const Index side_dim = domain_side ? n : m;
  const double lambda_max = largest_eigenvalue(s, side_dim, seed);
  if (lambda_max <= 0.0)
    throw NumericalError("poincare_duality_check: no reduced operator");
  const double lambda_min = smallest_positive_eigenvalue(s, side_dim, lambda_max, seed);
  return 1.0 / std::sqrt(lambda_min);
}

}  // namespace

PoincareDuality poincare_duality_check(const ComplexOperator& op, Backend backend,
                                       unsigned seed) {
  PoincareDuality out;
  out.c_a = poincare_value(op, backend, seed);
  ComplexOperator adj = op.adjoint();
  out.c_astar = poincare_value(adj, backend, seed + 1);
  out.rel_gap = std::abs(out.c_a - out.c_astar) / out.c_a;
  return out;
}

ProjectionPair projection_pair(const ComplexOperator& op) {
  Mat ahat = normalized_dense(op);
  Eigen::BDCSVD<Mat> svd(ahat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = op.rank_tol() * smax;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  Mat u = svd.matrixU().leftCols(rank);
  Mat v = svd.matrixV().leftCols(rank);
  // Back to original coordinates: pi = G^{-1/2} (U U^T) G^{1/2}.
  const auto unhat = [](const InnerProductSpace& sp, const Mat& basis_hat) {
    Mat b(basis_hat.rows(), basis_hat.cols());
    for (Index j = 0; j < basis_hat.cols(); ++j) b.col(j) = sp.solve_sqrt(basis_hat.col(j));
    return b;
  };
  const auto hat_t = [](const InnerProductSpace& sp, const Mat& basis_hat) {
    Mat b(basis_hat.rows(), basis_hat.cols());
    for (Index j = 0; j < basis_hat.cols(); ++j) b.col(j) = sp.apply_sqrt(basis_hat.col(j));
    return b;
  };
  ProjectionPair pp;
  pp.pi_range = unhat(*op.codomain(), u) * hat_t(*op.codomain(), u).transpose();
  pp.pi_range_adjoint = unhat(*op.domain(), v) * hat_t(*op.domain(), v).transpose();
  return pp;
}

}  // namespace hodgelab
