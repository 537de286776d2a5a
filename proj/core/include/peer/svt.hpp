#pragma once

#include "peer/linalg.hpp"
#include "peer/masked.hpp"

#include <vector>

namespace peer {

struct SvtConfig {
  Index rank = 1;
  double tolerance = 1e-4;     // relative Frobenius change between iterates
  Index max_iterations = 500;  // non-convergence is reported, not fatal
};

/// Output of the initialization step: the rank-r factorization
/// Z * diag(d) * V^T of the completed response matrix.
struct InitEstimate {
  SvdTriplet svd;  // k = rank
  Index iterations_used = 0;
  bool converged = true;
  double final_relative_change = 0.0;
  /// (r+1)-th singular value of the working matrix the factorization was
  /// truncated from; 0 when rank == min(n, q). Feeds the rank gap rule.
  double d_next = 0.0;
  /// m^{-1} ||P_M(Y) - P_M(A_new)||_F^2 after each iteration; nonincreasing.
  std::vector<double> objective_trace;
};

/// Iterative singular value thresholding: impute column means, then repeat
///   A_new <- truncate_rank(Y, r);  Y <- P_M(Y) + P_Mc(A_new)
/// until the relative Frobenius change of A_new falls below the tolerance
/// (a zero-norm previous iterate counts as change 0; an absolute change
/// below tolerance*1e-3 also stops). Returns the thin SVD of the final
/// A_new; hitting max_iterations sets converged = false.
InitEstimate svt_initialize(const ObservedMatrix& obs, const SvtConfig& cfg);

/// Fully observed shortcut: the thin SVD of Y itself, no iteration.
InitEstimate full_data_init(const Matrix& y, Index rank);

}  // namespace peer
