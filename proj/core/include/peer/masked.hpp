#pragma once

#include "peer/types.hpp"

namespace peer {

/// Response matrix with an observation mask. Unobserved cells of `values`
/// hold a NaN sentinel that must never reach arithmetic; all access to the
/// payload goes through the mask.
struct ObservedMatrix {
  Matrix values;   // n x q, NaN in unobserved cells
  BoolArray mask;  // n x q, true = observed
  Index m = 0;     // number of observed cells

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  bool fully_observed_mask() const { return m == rows() * cols(); }

  /// Every cell observed.
  static ObservedMatrix fully_observed(Matrix y);

  /// Validates shapes and that every observed value is finite; unobserved
  /// cells are overwritten with the NaN sentinel.
  static ObservedMatrix with_mask(const Matrix& values, BoolArray mask);
};

/// P_M(A): A on mask-true cells, 0 elsewhere.
Matrix project_observed(const Matrix& a, const BoolArray& mask);

/// P_M(Y) + P_Mc(fill): observed cells from obs, the rest from fill.
Matrix combine(const ObservedMatrix& obs, const Matrix& fill);

/// Replace each unobserved cell by the mean of the observed entries in its
/// column. A fully unobserved column is filled with 0 (responses are assumed
/// centered) and the event is logged as a warning.
Matrix column_mean_impute(const ObservedMatrix& obs);

/// 1 - m/(n*q): the fraction of unobserved cells.
double missing_rate(const ObservedMatrix& obs);

}  // namespace peer
