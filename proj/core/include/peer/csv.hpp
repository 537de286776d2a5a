#pragma once

#include "peer/masked.hpp"

#include <string>

namespace peer {

/// Comma-separated numeric matrix. An optional first header row is
/// auto-detected and skipped. Missing cells are not allowed here.
Matrix read_matrix_csv(const std::string& path);

/// As read_matrix_csv, but an empty field or the literal token NA marks a
/// missing cell.
ObservedMatrix read_observed_csv(const std::string& path);

/// Round-trip exact: values are written with 17 significant digits.
void write_matrix_csv(const std::string& path, const Matrix& a);

/// Masked cells are written as NA.
void write_observed_csv(const std::string& path, const Matrix& values,
                        const BoolArray& mask);

/// Shortest-exact formatting used for all numeric CSV output.
std::string format_double(double v);

}  // namespace peer
