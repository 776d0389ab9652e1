#include "hodgelab/solve.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "hodgelab/lapack.hpp"

namespace hodgelab {

CgResult conjugate_gradient(const LinOp& s, const Vec& b, double rel_tol,
                            int max_iter, const Vec* diag_precond) {
  const Index n = b.size();
  if (max_iter <= 0) max_iter = static_cast<int>(10 * n + 200);
  CgResult out;
  out.x = Vec::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Vec r = b;
  Vec z = diag_precond ? Vec(r.cwiseQuotient(*diag_precond)) : r;
  Vec p = z;
  double rz = r.dot(z);
  for (int k = 0; k < max_iter; ++k) {
    Vec sp = s(p);
    const double psp = p.dot(sp);
    if (psp <= 0.0) break;  // numerical semi-definiteness breakdown
    const double alpha = rz / psp;
    out.x += alpha * p;
    r -= alpha * sp;
    out.iterations = k + 1;
    if (r.norm() <= rel_tol * bnorm) {
      out.converged = true;
      break;
    }
    z = diag_precond ? Vec(r.cwiseQuotient(*diag_precond)) : r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  out.rel_residual = r.norm() / bnorm;
  if (out.rel_residual <= rel_tol) out.converged = true;
  return out;
}

namespace {

Vec random_unit(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
  const double nn = v.norm();
  return nn > 0 ? Vec(v / nn) : Vec(Vec::Unit(n, 0));
}

}  // namespace

double largest_eigenvalue(const LinOp& s, Index dim, unsigned seed, double rel_tol,
                          int max_iter) {
  if (dim == 0) return 0.0;
  Vec v = random_unit(dim, seed ^ 0x9e3779b97f4a7c15ull);
  double lambda = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    Vec sv = s(v);
    const double nn = sv.norm();
    if (nn == 0.0) return 0.0;
    const double lambda_new = v.dot(sv);
    sv /= nn;
    Vec ssv = s(sv);
    const double resid = (ssv - sv.dot(ssv) * sv).norm();
    v = sv;
    if (std::abs(lambda_new - lambda) <= rel_tol * std::abs(lambda_new) &&
        resid <= std::sqrt(rel_tol) * std::abs(lambda_new))
      return lambda_new;
    lambda = lambda_new;
  }
  return lambda;
}

double smallest_positive_eigenvalue(const LinOp& s, Index dim, double lambda_max,
                                    unsigned seed, double rel_tol, int max_outer) {
  if (dim == 0 || lambda_max <= 0.0)
    throw NumericalError("smallest_positive_eigenvalue: zero operator");
  const int cg_cap = 2000;
  // Minimal-norm solution of the consistent system S y = S x is the
  // orthogonal projection of x onto R(S).  Plain CG on S w = v injects the
  // kernel component of any inconsistency linearly per iteration, so every
  // vector that enters the subspace is purged this way first.
  const auto project = [&](const Vec& x) {
    CgResult cg = conjugate_gradient(s, s(x), 1e-12, cg_cap);
    return cg.x;
  };
  Vec v0 = project(random_unit(dim, seed ^ 0x6a09e667f3bcc909ull));
  if (v0.norm() <= 1e-12)
    throw NumericalError("smallest_positive_eigenvalue: probe collapsed to kernel");
  std::vector<Vec> basis{Vec(v0 / v0.norm())};
  std::vector<Vec> image{s(basis[0])};
  const int max_basis = 40;
  const int keep = 8;
  double theta = lambda_max;
  Vec expand = basis[0];
  for (int k = 0; k < max_outer; ++k) {
    // Grow the subspace with an inverse apply to the current best direction.
    // The solve can be inexact; the certificate below uses fresh matvecs.
    CgResult cg = conjugate_gradient(s, expand, 1e-10, cg_cap);
    Vec w = project(cg.x);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) w -= b.dot(w) * b;
    const double wn = w.norm();
    const bool grew = wn > 1e-10 * std::max(1.0, cg.x.norm());
    if (grew) {
      basis.push_back(w / wn);
      image.push_back(s(basis.back()));
    }
    // Rayleigh-Ritz on the current subspace with honest matvecs.
    const Index m = static_cast<Index>(basis.size());
    Mat h(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j <= i; ++j) {
        const double hij = 0.5 * (basis[i].dot(image[j]) + basis[j].dot(image[i]));
        h(i, j) = hij;
        h(j, i) = hij;
      }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    theta = es.eigenvalues()(0);
    Vec c = es.eigenvectors().col(0);
    Vec y = Vec::Zero(dim), sy = Vec::Zero(dim);
    for (Index i = 0; i < m; ++i) {
      y += c(i) * basis[i];
      sy += c(i) * image[i];
    }
    const double yn = y.norm();
    if (yn > 0.0) expand = y / yn;
    const double resid = (sy - theta * y).norm();
    // For a symmetric operator the Ritz value is within resid/||y|| of an
    // eigenvalue, so this certifies the relative accuracy directly.
    if (theta > 0.0 && resid <= rel_tol * theta * yn) {
      // Reject a Ritz vector that lost most of its mass to the kernel.
      Vec yp = project(y);
      if (yp.norm() < 0.9 * yn)
        throw NumericalError("smallest_positive_eigenvalue: iterate collapsed to kernel");
      return theta;
    }
    if (!grew) {
      // The Davidson direction fell inside the subspace (inexact inner
      // solves); inject a fresh purified random direction instead.
      Vec f = project(random_unit(dim, seed + 0x1234u * (k + 1)));
      for (int pass = 0; pass < 2; ++pass)
        for (const Vec& b : basis) f -= b.dot(f) * b;
      const double fn = f.norm();
      if (fn <= 1e-10)
        throw NumericalError("smallest_positive_eigenvalue: subspace stagnated "
                             "before the residual certificate was met");
      basis.push_back(f / fn);
      image.push_back(s(basis.back()));
    }
    // Thick restart: keep the lowest Ritz vectors, no new matvecs needed.
    if (static_cast<int>(basis.size()) >= max_basis) {
      const Index mm = static_cast<Index>(basis.size());
      const Index kk = std::min<Index>(keep, mm);
      std::vector<Vec> nb(kk, Vec::Zero(dim)), ni(kk, Vec::Zero(dim));
      for (Index j = 0; j < kk; ++j)
        for (Index i = 0; i < mm; ++i) {
          nb[j] += es.eigenvectors()(i, j) * basis[i];
          ni[j] += es.eigenvectors()(i, j) * image[i];
        }
      basis = std::move(nb);
      image = std::move(ni);
    }
  }
  return theta;
}

LeastSquaresResult least_squares(const ComplexOperator& op, const Vec& y,
                                 double rel_tol, int max_iter) {
  const auto& dom = *op.domain();
  const auto& cod = *op.codomain();
  if (y.size() != cod.dim()) throw StructuralError("least_squares: dimension mismatch");
  // Normalized coordinates: xhat = G_dom^{1/2} x, Ahat = G_cod^{1/2} A G_dom^{-1/2}.
  const Vec yhat = cod.apply_sqrt(y);
  const Vec bhat = op.apply_normalized_t(yhat);
  LinOp normal = [&op](const Vec& xh) {
    return op.apply_normalized_t(op.apply_normalized(xh));
  };
  // Diagonal of the normalized normal matrix as preconditioner.
  Vec diag = Vec::Zero(dom.dim());
  if (dom.is_diagonal() && cod.is_diagonal()) {
    const Vec& gd = dom.diag();
    const Vec& gc = cod.diag();
    for (Index j = 0; j < op.matrix().outerSize(); ++j)
      for (SpMat::InnerIterator it(op.matrix(), j); it; ++it)
        diag(it.col()) += it.value() * it.value() * gc(it.row()) / gd(it.col());
    for (Index i = 0; i < diag.size(); ++i)
      if (diag(i) <= 0.0) diag(i) = 1.0;
  } else {
    diag.setOnes();
  }
  CgResult cg = conjugate_gradient(normal, bhat, rel_tol, max_iter, &diag);
  LeastSquaresResult out;
  out.x = dom.solve_sqrt(cg.x);
  out.iterations = cg.iterations;
  out.residual_norm = cod.norm(op.apply(out.x) - y);
  return out;
}

Vec solve_reduced(const ComplexOperator& op, const Vec& y, double range_tol) {
  const double ynorm = op.codomain()->norm(y);
  LeastSquaresResult ls = least_squares(op, y);
  if (ynorm > 0.0 && ls.residual_norm > range_tol * ynorm)
    throw NumericalError("solve_reduced: right-hand side has a component outside "
                         "R(A); defect norm " +
                         std::to_string(ls.residual_norm));
  return ls.x;
}

}  // namespace hodgelab
