#include "peer/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace peer {

namespace {

void flip_pair_signs(Matrix& left, Matrix& right) {
  for (Index k = 0; k < right.cols(); ++k) {
    Index max_row = 0;
    right.col(k).cwiseAbs().maxCoeff(&max_row);
    if (right(max_row, k) < 0.0) {
      right.col(k) = -right.col(k);
      left.col(k) = -left.col(k);
    }
  }
}

struct FullSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

FullSvd compute_svd(const Matrix& a) {
  if (!all_finite(a)) {
    throw InvalidInputError("thin_svd: matrix contains non-finite entries");
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("thin_svd: SVD did not converge (backend reported " +
                       std::to_string(static_cast<int>(svd.info())) +
                       " after its internal iteration limit)");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace

SvdTriplet thin_svd(const Matrix& a, Index k) {
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw InvalidInputError("thin_svd: k must be in [1, min(rows, cols)]");
  }
  const FullSvd svd = compute_svd(a);
  SvdTriplet out;
  out.left = svd.u.leftCols(k);
  out.singular_values = svd.s.head(k);
  out.right = svd.v.leftCols(k);
  flip_pair_signs(out.left, out.right);
  return out;
}

Matrix truncate_rank(const Matrix& a, Index r) {
  if (r < 1) {
    throw InvalidInputError("truncate_rank: r must be >= 1");
  }
  if (r >= std::min(a.rows(), a.cols())) {
    return a;
  }
  const FullSvd svd = compute_svd(a);
  return svd.u.leftCols(r) * svd.s.head(r).asDiagonal() *
         svd.v.leftCols(r).transpose();
}

Matrix qr_orthonormalize(const Matrix& b) {
  const Index q = b.rows();
  const Index r = b.cols();
  if (r < 1 || q < r) {
    throw InvalidInputError(
        "qr_orthonormalize: need a q x r matrix with 1 <= r <= q");
  }
  if (!all_finite(b)) {
    throw InvalidInputError("qr_orthonormalize: non-finite entries");
  }
  Eigen::HouseholderQR<Matrix> qr(b);
  const Matrix rt = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const double diag_max = rt.diagonal().cwiseAbs().maxCoeff();
  const double diag_min = rt.diagonal().cwiseAbs().minCoeff();
  if (diag_max == 0.0 || diag_min <= 1e-12 * diag_max) {
    throw DegenerateInputError(
        "qr_orthonormalize: columns are not linearly independent");
  }
  Matrix qmat = qr.householderQ() * Matrix::Identity(q, r);
  for (Index k = 0; k < r; ++k) {
    if (rt(k, k) < 0.0) qmat.col(k) = -qmat.col(k);
  }
  return qmat;
}

Matrix cholesky_psd(const Matrix& s) {
  if (s.rows() != s.cols()) {
    throw InvalidInputError("cholesky_psd: matrix must be square");
  }
  if (!all_finite(s)) {
    throw InvalidInputError("cholesky_psd: non-finite entries");
  }
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInputError("cholesky_psd: matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  // Semidefinite up to roundoff: shift by a jitter and retry.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-8 * scale) {
    throw NumericError("cholesky_psd: matrix is indefinite (min eigenvalue " +
                       std::to_string(min_eig) + ")");
  }
  const double jitter = std::max(0.0, -min_eig) + 1e-10 * scale;
  llt.compute(sym + jitter * Matrix::Identity(s.rows(), s.cols()));
  if (llt.info() != Eigen::Success) {
    throw NumericError("cholesky_psd: factorization failed after jitter");
  }
  return llt.matrixL();
}

}  // namespace peer
