#pragma once

#include "peer/types.hpp"

#include <optional>
#include <vector>

namespace peer {

struct LassoOptions {
  /// Stop sweeping when the largest coefficient change in a sweep (on the
  /// standardized scale) falls below this.
  double coord_tolerance = 1e-7;
  Index max_sweeps = 1000;
  /// Starting coefficients on the raw scale.
  std::optional<Vector> warm_start;
  /// Stationarity target; the solver keeps sweeping until the KKT residual
  /// is below this or the sweep budget runs out.
  double kkt_tolerance = 1e-8;
};

/// Solution of min_u n^{-1} ||y - X u||_2^2 + lambda ||u||_1.
///
/// The solver rescales columns to ||x_j||_2 = sqrt(n) internally and
/// back-transforms, so raw designs behave per the sqrt(n)-column-norm
/// convention. kkt_violation is measured on the standardized problem
/// (identical to the raw-design statement when columns already have norm
/// sqrt(n)); objective_value is evaluated at the raw design/coefficients.
struct LassoFit {
  Vector coefficients;  // length p, raw scale
  double lambda = 0.0;
  std::vector<Index> support;  // {j : u_j != 0}
  double objective_value = 0.0;
  double kkt_violation = 0.0;
  bool converged = true;
  Index sweeps_used = 0;
};

/// Cyclic coordinate descent. KKT conditions at the solution:
/// 2n^{-1} x_j^T (y - X u) = lambda * sign(u_j) for u_j != 0 and
/// |2n^{-1} x_j^T (y - X u)| <= lambda otherwise, within kkt_tolerance.
/// A zero-norm column raises InvalidInputError; exhausting max_sweeps
/// returns the best iterate with converged = false.
LassoFit lasso_cd(const Matrix& x, const Vector& y, double lambda,
                  const LassoOptions& opts = {});

/// Geometric grid of grid_size values from lambda_max (the smallest lambda
/// with an all-zero solution) down to ratio*lambda_max. Returns {0} when
/// y is orthogonal to every column (in particular y = 0).
std::vector<double> lambda_path(const Matrix& x, const Vector& y,
                                Index grid_size = 100, double ratio = 1e-3);

struct GicSelection {
  double lambda = 0.0;
  LassoFit fit;
  std::vector<double> lambdas;           // descending, as visited
  std::vector<double> criterion_values;  // GIC value per lambda (-inf -> lowest())
};

/// Pick lambda minimizing
///   log(n^{-1} ||y - X u(lambda)||_2^2)
///     + n^{-1} ||u(lambda)||_0 (log p)(log log n),
/// fitting the grid warm-started in descending order. Ties break toward the
/// larger lambda; an exactly-zero residual scores -inf and the sparsest such
/// fit wins. Requires n >= 3 so that log log n > 0.
GicSelection gic_select(const Matrix& x, const Vector& y,
                        const std::vector<double>& lambdas,
                        const LassoOptions& opts = {});

}  // namespace peer
