#include "peer/masked.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace peer {

namespace {
constexpr double kSentinel = std::numeric_limits<double>::quiet_NaN();

void check_same_shape(Index ar, Index ac, Index br, Index bc,
                      const char* where) {
  if (ar != br || ac != bc) {
    throw InvalidInputError(std::string(where) + ": shape mismatch (" +
                            std::to_string(ar) + "x" + std::to_string(ac) +
                            " vs " + std::to_string(br) + "x" +
                            std::to_string(bc) + ")");
  }
}
}  // namespace

ObservedMatrix ObservedMatrix::fully_observed(Matrix y) {
  if (!all_finite(y)) {
    throw InvalidInputError("ObservedMatrix: non-finite observed value");
  }
  ObservedMatrix out;
  out.mask = BoolArray::Constant(y.rows(), y.cols(), true);
  out.m = y.size();
  out.values = std::move(y);
  return out;
}

ObservedMatrix ObservedMatrix::with_mask(const Matrix& values,
                                         BoolArray mask) {
  check_same_shape(values.rows(), values.cols(), mask.rows(), mask.cols(),
                   "ObservedMatrix");
  ObservedMatrix out;
  out.values = Matrix::Constant(values.rows(), values.cols(), kSentinel);
  Index count = 0;
  for (Index j = 0; j < values.cols(); ++j) {
    for (Index i = 0; i < values.rows(); ++i) {
      if (mask(i, j)) {
        if (!std::isfinite(values(i, j))) {
          throw InvalidInputError("ObservedMatrix: non-finite observed value");
        }
        out.values(i, j) = values(i, j);
        ++count;
      }
    }
  }
  out.mask = std::move(mask);
  out.m = count;
  return out;
}

Matrix project_observed(const Matrix& a, const BoolArray& mask) {
  check_same_shape(a.rows(), a.cols(), mask.rows(), mask.cols(),
                   "project_observed");
  return mask.select(a, Matrix::Zero(a.rows(), a.cols()));
}

Matrix combine(const ObservedMatrix& obs, const Matrix& fill) {
  check_same_shape(obs.rows(), obs.cols(), fill.rows(), fill.cols(),
                   "combine");
  return obs.mask.select(obs.values, fill);
}

Matrix column_mean_impute(const ObservedMatrix& obs) {
  Matrix out = obs.values;
  for (Index j = 0; j < obs.cols(); ++j) {
    const Index observed = obs.mask.col(j).count();
    double mean = 0.0;
    if (observed > 0) {
      double sum = 0.0;
      for (Index i = 0; i < obs.rows(); ++i) {
        if (obs.mask(i, j)) sum += obs.values(i, j);
      }
      mean = sum / static_cast<double>(observed);
    } else {
      log_warning("column_mean_impute: column " + std::to_string(j) +
                  " has no observed entries, filling with 0");
    }
    for (Index i = 0; i < obs.rows(); ++i) {
      if (!obs.mask(i, j)) out(i, j) = mean;
    }
  }
  return out;
}

double missing_rate(const ObservedMatrix& obs) {
  const Index total = obs.rows() * obs.cols();
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(obs.m) / static_cast<double>(total);
}

}  // namespace peer
