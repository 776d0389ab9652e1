#include "hodgelab/lapack.hpp"

#include <lapacke.h>

namespace hodgelab {

SymEig sym_eig(const Mat& a, bool compute_vectors) {
  if (a.rows() != a.cols()) throw StructuralError("sym_eig: matrix not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymEig out;
  out.values.resize(n);
  if (n == 0) return out;
  if (n <= 32) {
    Eigen::SelfAdjointEigenSolver<Mat> es(
        a, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    out.values = es.eigenvalues();
    if (compute_vectors) out.vectors = es.eigenvectors();
    return out;
  }
  Mat work = a;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, compute_vectors ? 'V' : 'N', 'L', n,
                     work.data(), n, out.values.data());
  if (info != 0)
    throw NumericalError("sym_eig: dsyevd failed with info=" + std::to_string(info));
  if (compute_vectors) out.vectors = std::move(work);
  return out;
}

Vec singular_values(const Mat& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Vec s(k);
  if (k == 0) return s;
  Mat work = a;
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m,
                                         s.data(), nullptr, 1, nullptr, 1);
  if (info != 0)
    throw NumericalError("singular_values: dgesdd failed with info=" + std::to_string(info));
  return s;
}

}  // namespace hodgelab
