#pragma once

#include "peer/types.hpp"

namespace peer {

/// Thin SVD A = left * diag(singular_values) * right^T with k components.
/// Columns of left/right are orthonormal; singular values are nonnegative
/// and sorted in descending order.
struct SvdTriplet {
  Matrix left;             // n x k
  Vector singular_values;  // length k, descending
  Matrix right;            // q x k

  Matrix reconstruct() const {
    return left * singular_values.asDiagonal() * right.transpose();
  }
};

/// Best rank-k factorization of A. Sign convention: each (left_k, right_k)
/// pair is flipped so that the largest-magnitude entry of right_k is
/// positive, making the factorization reproducible across backends.
SvdTriplet thin_svd(const Matrix& a, Index k);

/// Rank truncation: keep the r largest singular values of A and zero the
/// rest. For r >= min(rows, cols) this is the identity and A is returned
/// unchanged.
Matrix truncate_rank(const Matrix& a, Index r);

/// Thin QR orthonormalization of a q x r matrix with linearly independent
/// columns. Columns of the result are orthonormal, span(Q) = span(B), and
/// signs are fixed so the R factor has a nonnegative diagonal.
Matrix qr_orthonormalize(const Matrix& b);

/// Lower-triangular L with L * L^T = S for symmetric positive semidefinite
/// S. A small jitter is added when S is semidefinite up to roundoff; an
/// indefinite S beyond that tolerance raises NumericError.
Matrix cholesky_psd(const Matrix& s);

}  // namespace peer
