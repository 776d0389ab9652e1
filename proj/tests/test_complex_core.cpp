#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hodgelab/complex.hpp"
#include "hodgelab/helmholtz.hpp"
#include "hodgelab/lapack.hpp"
#include "hodgelab/solve.hpp"
#include "hodgelab/spectral.hpp"

using namespace hodgelab;

namespace {

SpMat sparse_from(const Mat& m) {
  SpMat s = m.sparseView();
  s.makeCompressed();
  return s;
}

Vec random_vec(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

// 1-D Dirichlet difference quotient on n interior nodes of (0,1) split into
// n+1 cells, with the natural cell/node mass weights.
ComplexOperator dirichlet_grad_1d(Index n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  Mat d = Mat::Zero(n + 1, n);
  for (Index j = 0; j < n; ++j) {
    d(j, j) += 1.0 / h;
    d(j + 1, j) -= 1.0 / h;
  }
  SpacePtr dom = make_diagonal(Vec::Constant(n, h));
  SpacePtr cod = make_diagonal(Vec::Constant(n + 1, h));
  return ComplexOperator(sparse_from(d), dom, cod);
}

}  // namespace

TEST_CASE("metric adjoint matches the defining identity") {
  // 1x1: G_dom = diag(2), G_cod = diag(1), A = [4] -> A* = [2].
  ComplexOperator tiny(sparse_from(Mat::Constant(1, 1, 4.0)),
                       make_diagonal(Vec::Constant(1, 2.0)), make_euclidean(1));
  CHECK(tiny.apply_adjoint(Vec::Ones(1))(0) == doctest::Approx(2.0).epsilon(1e-14));

  // Random rectangular operator with random SPD diagonal grams:
  // <A x, y>_cod == <x, A* y>_dom for random vectors.
  const Index m = 7, n = 5;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  Mat a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = u(rng) - 5.0;
  Vec gd(n), gc(m);
  for (Index j = 0; j < n; ++j) gd(j) = u(rng);
  for (Index i = 0; i < m; ++i) gc(i) = u(rng);
  ComplexOperator op(sparse_from(a), make_diagonal(gd), make_diagonal(gc));
  const auto& dom = *op.domain();
  const auto& cod = *op.codomain();
  for (unsigned s = 0; s < 20; ++s) {
    Vec x = random_vec(n, 100 + s);
    Vec y = random_vec(m, 200 + s);
    const double lhs = cod.inner(op.apply(x), y);
    const double rhs = dom.inner(x, op.apply_adjoint(y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
  }

  // Double adjoint returns the original matrix.
  ComplexOperator back = op.adjoint().adjoint();
  CHECK(Mat(Mat(back.matrix()) - a).norm() <= 1e-12 * a.norm());

  // Dense (non-diagonal) gram path agrees with the identity as well.
  Mat q = Mat::Random(n, n);
  Mat gram = q.transpose() * q + Mat::Identity(n, n);
  ComplexOperator dense_op(sparse_from(a), make_dense(gram), make_diagonal(gc));
  for (unsigned s = 0; s < 5; ++s) {
    Vec x = random_vec(n, 300 + s);
    Vec y = random_vec(m, 400 + s);
    const double lhs = dense_op.codomain()->inner(dense_op.apply(x), y);
    const double rhs = dense_op.domain()->inner(x, dense_op.apply_adjoint(y));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + 1.0));
  }
}

TEST_CASE("explicit adjoint matrix equals the applied adjoint") {
  const Index m = 6, n = 4;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Mat a = Mat::Random(m, n);
  Vec gd(n), gc(m);
  for (Index j = 0; j < n; ++j) gd(j) = u(rng);
  for (Index i = 0; i < m; ++i) gc(i) = u(rng);
  ComplexOperator op(sparse_from(a), make_diagonal(gd), make_diagonal(gc));
  Mat b = Mat(adjoint_matrix(op));
  for (unsigned s = 0; s < 5; ++s) {
    Vec y = random_vec(m, s);
    CHECK((b * y - op.apply_adjoint(y)).norm() <= 1e-12 * y.norm());
  }
}

TEST_CASE("complex property detected exactly") {
  SpacePtr h0 = make_euclidean(1);
  SpacePtr h1 = make_euclidean(2);
  SpacePtr h2 = make_euclidean(1);

  // Exact pair: A1 A0 = 0.
  Mat a0(2, 1);
  a0 << 1.0, 0.0;
  Mat a1(1, 2);
  a1 << 0.0, 1.0;
  HilbertComplex good({h0, h1, h2}, {ComplexOperator(sparse_from(a0), h0, h1),
                                     ComplexOperator(sparse_from(a1), h1, h2)});
  ComplexCheck ok = check_complex(good);
  CHECK(ok.exact);
  CHECK(ok.max_product_norm == 0.0);

  // Broken pair: A1 A0 = [1].
  Mat a1b(1, 2);
  a1b << 1.0, 0.0;
  HilbertComplex bad({h0, h1, h2}, {ComplexOperator(sparse_from(a0), h0, h1),
                                    ComplexOperator(sparse_from(a1b), h1, h2)});
  ComplexCheck broken = check_complex(bad);
  CHECK_FALSE(broken.exact);
  CHECK(broken.max_product_norm == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(complex_defect(good.ops[0], good.ops[1]) == 0.0);
  CHECK(complex_defect(bad.ops[0], bad.ops[1]) > 0.5);
}

TEST_CASE("Poincare constant of the 1-D Dirichlet difference quotient") {
  // Smallest singular value has the closed form 2(n+1) sin(pi/(2(n+1))),
  // so c_A = 1 / that; compare against the dense report.
  for (Index n : {7, 15}) {
    ComplexOperator op = dirichlet_grad_1d(n);
    SpectralReport rep = spectral_report(op, Backend::Dense);
    CHECK(rep.rank == n);
    CHECK(rep.kernel_dim == 0);
    const double nn = static_cast<double>(n + 1);
    const double closed = 1.0 / (2.0 * nn * std::sin(M_PI / (2.0 * nn)));
    CHECK(rep.poincare_constant.value == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("duality of the Poincare constants, dense and iterative") {
  ComplexOperator op = dirichlet_grad_1d(31);
  PoincareDuality dense = poincare_duality_check(op, Backend::Dense);
  CHECK(dense.rel_gap <= 1e-10);
  PoincareDuality iter = poincare_duality_check(op, Backend::Iterative);
  CHECK(iter.rel_gap <= 1e-6);
  CHECK(iter.c_a == doctest::Approx(dense.c_a).epsilon(1e-6));
}

TEST_CASE("iterative spectral report matches dense on a kernel-bearing map") {
  // Rank-deficient map with a 3-dimensional kernel and random grams.
  const Index m = 40, n = 20;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  Mat base = Mat::Random(m, n - 3);
  Mat a(m, n);
  a.leftCols(n - 3) = base;
  a.col(n - 3) = base.col(0) + base.col(1);
  a.col(n - 2) = base.col(2) - 2.0 * base.col(3);
  a.col(n - 1) = base.col(4);
  Vec gd(n), gc(m);
  for (Index j = 0; j < n; ++j) gd(j) = u(rng);
  for (Index i = 0; i < m; ++i) gc(i) = u(rng);
  ComplexOperator op(sparse_from(a), make_diagonal(gd), make_diagonal(gc));
  SpectralReport dense = spectral_report(op, Backend::Dense);
  SpectralReport iter = spectral_report(op, Backend::Iterative);
  CHECK(dense.rank == n - 3);
  CHECK(dense.kernel_dim == 3);
  CHECK(iter.rank == dense.rank);
  CHECK(iter.kernel_dim == dense.kernel_dim);
  CHECK(iter.poincare_constant.value ==
        doctest::Approx(dense.poincare_constant.value).epsilon(1e-6));
}

TEST_CASE("harmonic basis of a small abstract complex") {
  // H_1 = R^3, A_0 maps onto span(e1), A_1 kills span(e1, e2):
  // cohomology is the single direction e2 (Euclidean metrics).
  SpacePtr h0 = make_euclidean(1);
  SpacePtr h1 = make_euclidean(3);
  SpacePtr h2 = make_euclidean(1);
  Mat a0(3, 1);
  a0 << 1.0, 0.0, 0.0;
  Mat a1(1, 3);
  a1 << 0.0, 0.0, 1.0;
  ComplexOperator op0(sparse_from(a0), h0, h1);
  ComplexOperator op1(sparse_from(a1), h1, h2);
  Mat basis = harmonic_basis(op0, op1);
  REQUIRE(basis.cols() == 1);
  CHECK(std::abs(basis(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(basis(0, 0)) <= 1e-12);
  CHECK(std::abs(basis(2, 0)) <= 1e-12);
  CHECK(cohomology_dim_rank_nullity(op0, op1) == 1);
}

TEST_CASE("three-way splitting is orthogonal and recomposes") {
  SpacePtr h0 = make_diagonal(Vec::Constant(2, 3.0));
  SpacePtr h1 = make_diagonal((Vec(4) << 1.0, 2.0, 0.5, 4.0).finished());
  SpacePtr h2 = make_euclidean(2);
  Mat a0 = Mat::Zero(4, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = 2.0;
  Mat a1 = Mat::Zero(2, 4);
  a1(0, 3) = 1.0;  // R(A1*) = span(e4); harmonic direction left: e3
  ComplexOperator op0(sparse_from(a0), h0, h1);
  ComplexOperator op1(sparse_from(a1), h1, h2);
  CHECK(complex_defect(op0, op1) == 0.0);
  for (unsigned s = 0; s < 10; ++s) {
    Vec x = random_vec(4, 700 + s);
    HelmholtzParts parts = helmholtz3(x, op0, op1);
    CHECK(parts.residual <= 1e-10 * x.norm());
    CHECK((parts.range_prev + parts.harmonic + parts.range_next_adjoint - x).norm() <=
          1e-10 * x.norm());
    CHECK(std::abs(h1->inner(parts.range_prev, parts.harmonic)) <= 1e-10);
    CHECK(std::abs(h1->inner(parts.range_prev, parts.range_next_adjoint)) <= 1e-10);
    CHECK(std::abs(h1->inner(parts.harmonic, parts.range_next_adjoint)) <= 1e-10);
    // The parts land in the advertised subspaces.
    CHECK(op1.apply(parts.range_prev).norm() <= 1e-10 * x.norm());
    CHECK(op1.apply(parts.harmonic).norm() <= 1e-10 * x.norm());
    CHECK(op0.apply_adjoint(parts.harmonic).norm() <= 1e-10 * x.norm());
  }
}

TEST_CASE("two-way splitting on either side") {
  const Index m = 8, n = 5;
  Mat a = Mat::Random(m, n);
  a.col(n - 1) = a.col(0);  // one kernel direction
  ComplexOperator op(sparse_from(a), make_euclidean(n), make_euclidean(m));
  for (unsigned s = 0; s < 5; ++s) {
    Vec x = random_vec(n, 50 + s);
    HelmholtzPair dom = helmholtz2(x, op, HelmholtzSide::Kernel);
    CHECK((dom.kernel + dom.range - x).norm() <= 1e-9 * x.norm());
    CHECK(op.apply(dom.kernel).norm() <= 1e-8 * x.norm());
    Vec y = random_vec(m, 60 + s);
    HelmholtzPair cod = helmholtz2(y, op, HelmholtzSide::Range);
    CHECK((cod.kernel + cod.range - y).norm() <= 1e-9 * y.norm());
    CHECK(op.apply_adjoint(cod.kernel).norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("joint lower bound for the pair of derivative norms") {
  SpacePtr h0 = make_euclidean(1);
  SpacePtr h1 = make_euclidean(3);
  SpacePtr h2 = make_euclidean(1);
  Mat a0(3, 1);
  a0 << 1.0, 0.0, 0.0;
  Mat a1(1, 3);
  a1 << 0.0, 0.0, 2.0;
  ComplexOperator op0(sparse_from(a0), h0, h1);
  ComplexOperator op1(sparse_from(a1), h1, h2);
  MaxwellConstant mc = maxwell_constant(op0, op1);
  CHECK_FALSE(mc.trivial);
  // Hodge form on the complement of the harmonic direction e2:
  // eigenvalues are 1 (from A0 A0*) and 4 (from A1* A1) -> constant 1.
  CHECK(mc.value == doctest::Approx(1.0).epsilon(1e-10));
  // The advertised inequality holds for random vectors orthogonal to e2.
  Mat hb = harmonic_basis(op0, op1);
  for (unsigned s = 0; s < 50; ++s) {
    Vec x = random_vec(3, 900 + s);
    for (Index c = 0; c < hb.cols(); ++c) x -= hb.col(c).dot(x) * hb.col(c);
    const double lhs = x.norm();
    const double rhs = op1.apply(x).norm() + op0.apply_adjoint(x).norm();
    CHECK(lhs <= mc.value * rhs * (1.0 + 1e-12));
  }

  // Degenerate pair: both operators zero -> flagged trivial.
  MaxwellConstant tz = maxwell_constant(
      ComplexOperator(sparse_from(Mat::Zero(3, 1)), h0, h1),
      ComplexOperator(sparse_from(Mat::Zero(1, 3)), h1, h2));
  CHECK(tz.trivial);
}

TEST_CASE("reduced solve round-trips and rejects off-range data") {
  const Index m = 9, n = 6;
  Mat a = Mat::Random(m, n);
  ComplexOperator op(sparse_from(a), make_euclidean(n), make_euclidean(m));
  for (unsigned s = 0; s < 5; ++s) {
    Vec x = random_vec(n, 80 + s);
    Vec y = op.apply(x);
    Vec back = solve_reduced(op, y);
    CHECK((op.apply(back) - y).norm() <= 1e-8 * y.norm());
  }
  // A right-hand side with a large component outside R(A) must throw.
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
  Vec off = svd.matrixU().col(m - 1);  // m > n: genuinely off-range
  CHECK_THROWS_AS(solve_reduced(op, off), NumericalError);
}

TEST_CASE("least squares honors the Poincare bound on the reduced inverse") {
  ComplexOperator op = dirichlet_grad_1d(15);
  SpectralReport rep = spectral_report(op, Backend::Dense);
  for (unsigned s = 0; s < 10; ++s) {
    Vec x = random_vec(15, 500 + s);
    Vec y = op.apply(x);
    Vec back = solve_reduced(op, y);
    CHECK(op.domain()->norm(back) <=
          rep.poincare_constant.value * op.codomain()->norm(y) * (1.0 + 1e-9));
  }
}

TEST_CASE("largest and smallest positive eigenvalue solvers on a known matrix") {
  // diag(0, 0, 2, 5, 9) as an operator: lambda_max = 9, smallest positive 2.
  Vec d(5);
  d << 0.0, 0.0, 2.0, 5.0, 9.0;
  LinOp s = [&d](const Vec& x) { return Vec(d.asDiagonal() * x); };
  const double lmax = largest_eigenvalue(s, 5, 1);
  CHECK(lmax == doctest::Approx(9.0).epsilon(1e-8));
  const double lmin = smallest_positive_eigenvalue(s, 5, lmax, 1);
  CHECK(lmin == doctest::Approx(2.0).epsilon(1e-7));
}
