#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hodgelab/dual_norm.hpp"
#include "hodgelab/grid.hpp"
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

// Dense oracle: dual_norm(x)^2 = xhat^T Ahat^T (I + Ahat Ahat^T)^{-1} Ahat xhat
// in the metric-normalized coordinates.
double dense_dual_norm(const ComplexOperator& op, const Vec& x) {
  Mat ahat = normalized_dense(op);
  Vec xhat = op.domain()->apply_sqrt(x);
  Mat m = Mat::Identity(ahat.rows(), ahat.rows()) + ahat * ahat.transpose();
  Vec ax = ahat * xhat;
  return std::sqrt(ax.dot(m.ldlt().solve(ax)));
}

}  // namespace

TEST_CASE("unit vector under the identity map") {
  ComplexOperator op(sparse_from(Mat::Identity(2, 2)), make_euclidean(2),
                     make_euclidean(2));
  DualNormProblem problem(op);
  Vec x = Vec::Unit(2, 0);
  CHECK(problem.dual_norm(x) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("diagonal operator has the sigma-weighted closed form") {
  Vec sigma(4);
  sigma << 0.3, 1.0, 2.5, 10.0;
  ComplexOperator op(sparse_from(Mat(sigma.asDiagonal())), make_euclidean(4),
                     make_euclidean(4));
  DualNormProblem problem(op);
  for (unsigned s = 0; s < 10; ++s) {
    Vec x = random_vec(4, s);
    double expect2 = 0.0;
    for (Index i = 0; i < 4; ++i) {
      const double w = sigma(i) * sigma(i) / (1.0 + sigma(i) * sigma(i));
      expect2 += w * x(i) * x(i);
    }
    CHECK(problem.dual_norm(x) == doctest::Approx(std::sqrt(expect2)).epsilon(1e-10));
  }
}

TEST_CASE("random weighted operators agree with the dense oracle") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Index m = 6 + trial, n = 4 + trial;
    Mat a = Mat::Random(m, n);
    Vec gd(n), gc(m);
    for (Index j = 0; j < n; ++j) gd(j) = u(rng);
    for (Index i = 0; i < m; ++i) gc(i) = u(rng);
    ComplexOperator op(sparse_from(a), make_diagonal(gd), make_diagonal(gc));
    DualNormProblem problem(op);
    for (unsigned s = 0; s < 5; ++s) {
      Vec x = random_vec(n, 10 * trial + s);
      const double got = problem.dual_norm(x);
      const double want = dense_dual_norm(op, x);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
      // The extension never exceeds the plain norm.
      CHECK(got <= op.domain()->norm(x) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("the dual norm is a supremum over test functions") {
  Mat a = Mat::Random(5, 3);
  ComplexOperator op(sparse_from(a), make_euclidean(3), make_euclidean(5));
  DualNormProblem problem(op);
  Vec x = random_vec(3, 77);
  const double dn = problem.dual_norm(x);
  double best = 0.0;
  for (unsigned s = 0; s < 2000; ++s) {
    Vec phi = random_vec(5, 1000 + s);
    Vec astar = op.apply_adjoint(phi);
    const double denom = std::sqrt(phi.squaredNorm() + astar.squaredNorm());
    best = std::max(best, std::abs(astar.dot(x)) / denom);
  }
  CHECK(best <= dn * (1.0 + 1e-10));
  CHECK(best >= 0.5 * dn);  // random probing gets within a factor
}

TEST_CASE("kernel directions have zero dual norm") {
  Mat a(1, 2);
  a << 1.0, 0.0;
  ComplexOperator op(sparse_from(a), make_euclidean(2), make_euclidean(1));
  DualNormProblem problem(op);
  CHECK(problem.dual_norm(Vec::Unit(2, 1)) <= 1e-14);
}

TEST_CASE("reduced extension carries the same dual norm") {
  GridSpec s;
  s.cells = {6, 6, 6};
  GridComplex gc = build_derham(s);
  DualNormProblem problem(gc.grad);
  for (unsigned t = 0; t < 100; ++t) {
    Vec x = random_vec(gc.layout.n_vertex_dofs(), 300 + t);
    ReducedDualNorm rd = reduced_dual_norm_identity(problem, x);
    CHECK(rd.rel_gap <= 1e-8);
  }
}

TEST_CASE("reduced extension condition from singular data") {
  Vec sigma(3);
  sigma << 0.5, 2.0, 8.0;
  ComplexOperator op(sparse_from(Mat(sigma.asDiagonal())), make_euclidean(3),
                     make_euclidean(3));
  DualNormProblem problem(op);
  ReducedExtensionCondition c = reduced_extension_condition(problem);
  const auto f = [](double s_) { return s_ / std::sqrt(1.0 + s_ * s_); };
  CHECK(c.sigma_ratio == doctest::Approx(16.0).epsilon(1e-8));
  CHECK(c.cond_extension == doctest::Approx(f(8.0) / f(0.5)).epsilon(1e-8));
  CHECK(c.cond_extension <= c.sigma_ratio);
}

TEST_CASE("compactness diagnostics tie the two moduli together") {
  Mat a = Mat::Random(6, 4);
  ComplexOperator op(sparse_from(a), make_euclidean(4), make_euclidean(6));
  DualNormProblem problem(op);
  // A convergent sequence: x_n = x + 2^{-n} perturbation.
  Vec x = random_vec(4, 9);
  std::vector<Vec> xs;
  for (int n = 0; n < 8; ++n)
    xs.push_back(x + std::pow(0.5, n) * random_vec(4, 100 + n));
  CompactnessDiagnostics d = sequence_compactness_diagnostics(problem, xs);
  CHECK(d.equivalence_ok);
  REQUIRE(!d.projection_modulus.empty());
  CHECK(d.projection_modulus.back() <= d.projection_modulus.front());
  CHECK_THROWS_AS(sequence_compactness_diagnostics(problem, {x}), StructuralError);
}

TEST_CASE("range projectors act as advertised on the free box") {
  GridSpec s;
  s.cells = {3, 3, 3};
  s.bc.fill(FaceBc::Normal);
  GridComplex gc = build_derham(s);
  ProjectionPair pp = projection_pair(gc.grad);
  // Constants span the kernel, so the adjoint-range projector kills them.
  Vec ones = Vec::Ones(gc.layout.n_vertex_dofs());
  CHECK((pp.pi_range_adjoint * ones).cwiseAbs().maxCoeff() <= 1e-10);
  // Projectors are idempotent and metric-symmetric.
  Mat pr = pp.pi_range;
  CHECK((pr * pr - pr).cwiseAbs().maxCoeff() <= 1e-10);
  Mat g1(gc.h1->diag().asDiagonal());
  CHECK((g1 * pr - pr.transpose() * g1).cwiseAbs().maxCoeff() <= 1e-8);
}
