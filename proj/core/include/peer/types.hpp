#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace peer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Caller-supplied data or configuration violates a precondition.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Structurally degenerate input, e.g. a rank-deficient factor where
/// linearly independent columns are required.
class DegenerateInputError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// Numerical failure inside a factorization or iterative routine.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Matrix& a) { return a.allFinite(); }
inline bool all_finite(const Vector& a) { return a.allFinite(); }

/// Non-fatal diagnostics (fully missing column, zero estimated rank, ...).
/// Writes a single "[peer] warning: ..." line to stderr.
void log_warning(const std::string& message);

}  // namespace peer
