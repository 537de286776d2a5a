#include "peer/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace peer {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Design with columns rescaled to l2-norm sqrt(n).
struct ScaledDesign {
  Matrix xs;     // n x p
  Vector scale;  // scale_j = sqrt(n) / ||x_j||; u_raw = scale .* u_std
  Index n = 0;
  Index p = 0;
};

ScaledDesign standardize(const Matrix& x) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw InvalidInputError("lasso: empty design matrix");
  }
  if (!all_finite(x)) {
    throw InvalidInputError("lasso: design has non-finite entries");
  }
  ScaledDesign d;
  d.n = x.rows();
  d.p = x.cols();
  d.scale.resize(d.p);
  const double sqrt_n = std::sqrt(static_cast<double>(d.n));
  for (Index j = 0; j < d.p; ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0.0) {
      throw InvalidInputError("lasso: column " + std::to_string(j) +
                              " has zero norm");
    }
    d.scale(j) = sqrt_n / norm;
  }
  d.xs = x * d.scale.asDiagonal();
  return d;
}

struct CdResult {
  Vector u_std;
  double kkt_violation = 0.0;
  bool converged = false;
  Index sweeps_used = 0;
  double residual_sq = 0.0;  // ||y - Xs u||_2^2
};

double kkt_residual(const ScaledDesign& d, const Vector& u,
                    const Vector& res, double lambda) {
  const Vector grad = 2.0 * (d.xs.transpose() * res) / static_cast<double>(d.n);
  double worst = 0.0;
  for (Index j = 0; j < d.p; ++j) {
    const double v = u(j) != 0.0
                         ? std::abs(grad(j) - lambda * (u(j) > 0 ? 1.0 : -1.0))
                         : std::max(0.0, std::abs(grad(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

CdResult cd_solve(const ScaledDesign& d, const Vector& y, double lambda,
                  const LassoOptions& opts, const Vector* warm_std) {
  CdResult out;
  out.u_std = warm_std != nullptr ? *warm_std : Vector::Zero(d.p);
  Vector res = y - d.xs * out.u_std;
  const double n = static_cast<double>(d.n);
  // ||xs_j||^2 / n == 1 up to roundoff; use the computed value.
  const Vector col_sq = d.xs.colwise().squaredNorm() / n;
  const double thresh = lambda / 2.0;

  for (Index sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Index j = 0; j < d.p; ++j) {
      const double uj = out.u_std(j);
      const double rho = d.xs.col(j).dot(res) / n + col_sq(j) * uj;
      const double nj = soft_threshold(rho, thresh) / col_sq(j);
      if (nj != uj) {
        res += d.xs.col(j) * (uj - nj);
        out.u_std(j) = nj;
        max_delta = std::max(max_delta, std::abs(nj - uj));
      }
    }
    out.sweeps_used = sweep;
    if (max_delta <= opts.coord_tolerance) {
      res = y - d.xs * out.u_std;  // drop incremental-update drift
      out.kkt_violation = kkt_residual(d, out.u_std, res, lambda);
      if (out.kkt_violation <= opts.kkt_tolerance) {
        out.converged = true;
        break;
      }
    }
  }
  if (!out.converged) {
    res = y - d.xs * out.u_std;
    out.kkt_violation = kkt_residual(d, out.u_std, res, lambda);
    out.converged = out.kkt_violation <= opts.kkt_tolerance;
  }
  out.residual_sq = res.squaredNorm();
  return out;
}

void validate_common(const ScaledDesign& d, const Vector& y, double lambda) {
  if (y.size() != d.n) {
    throw InvalidInputError("lasso: y length does not match design rows");
  }
  if (!all_finite(y)) {
    throw InvalidInputError("lasso: response has non-finite entries");
  }
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw InvalidInputError("lasso: lambda must be finite and >= 0");
  }
}

void validate_options(const LassoOptions& opts) {
  if (!(opts.coord_tolerance > 0.0) || !(opts.kkt_tolerance > 0.0)) {
    throw InvalidInputError("lasso: tolerances must be positive");
  }
  if (opts.max_sweeps < 1) {
    throw InvalidInputError("lasso: max_sweeps must be >= 1");
  }
}

LassoFit make_fit(const ScaledDesign& d, const Matrix& x, const Vector& y,
                  double lambda, const CdResult& cd) {
  LassoFit fit;
  fit.coefficients = cd.u_std.cwiseProduct(d.scale);
  fit.lambda = lambda;
  for (Index j = 0; j < d.p; ++j) {
    if (fit.coefficients(j) != 0.0) fit.support.push_back(j);
  }
  fit.objective_value =
      (y - x * fit.coefficients).squaredNorm() / static_cast<double>(d.n) +
      lambda * fit.coefficients.lpNorm<1>();
  fit.kkt_violation = cd.kkt_violation;
  fit.converged = cd.converged;
  fit.sweeps_used = cd.sweeps_used;
  return fit;
}

double lambda_max_of(const ScaledDesign& d, const Vector& y) {
  return (2.0 * (d.xs.transpose() * y) / static_cast<double>(d.n))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace

LassoFit lasso_cd(const Matrix& x, const Vector& y, double lambda,
                  const LassoOptions& opts) {
  validate_options(opts);
  const ScaledDesign d = standardize(x);
  validate_common(d, y, lambda);
  Vector warm_std;
  const Vector* warm = nullptr;
  if (opts.warm_start.has_value()) {
    if (opts.warm_start->size() != d.p) {
      throw InvalidInputError("lasso: warm start length mismatch");
    }
    warm_std = opts.warm_start->cwiseQuotient(d.scale);
    warm = &warm_std;
  }
  const CdResult cd = cd_solve(d, y, lambda, opts, warm);
  return make_fit(d, x, y, lambda, cd);
}

std::vector<double> lambda_path(const Matrix& x, const Vector& y,
                                Index grid_size, double ratio) {
  if (grid_size < 2) {
    throw InvalidInputError("lambda_path: grid_size must be >= 2");
  }
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw InvalidInputError("lambda_path: ratio must be in (0, 1)");
  }
  const ScaledDesign d = standardize(x);
  validate_common(d, y, 0.0);
  const double lambda_max = lambda_max_of(d, y);
  if (lambda_max <= 0.0) {
    return {0.0};
  }
  std::vector<double> grid(grid_size);
  for (Index i = 0; i < grid_size; ++i) {
    grid[i] = lambda_max * std::pow(ratio, static_cast<double>(i) /
                                               static_cast<double>(grid_size - 1));
  }
  return grid;
}

GicSelection gic_select(const Matrix& x, const Vector& y,
                        const std::vector<double>& lambdas,
                        const LassoOptions& opts) {
  validate_options(opts);
  const ScaledDesign d = standardize(x);
  validate_common(d, y, 0.0);
  if (lambdas.empty()) {
    throw InvalidInputError("gic_select: empty lambda grid");
  }
  if (d.n < 3) {
    throw InvalidInputError("gic_select: needs n >= 3 for log log n > 0");
  }

  std::vector<double> grid = lambdas;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  const double n = static_cast<double>(d.n);
  const double penalty_unit =
      std::log(static_cast<double>(d.p)) * std::log(std::log(n)) / n;

  GicSelection sel;
  sel.lambdas = grid;
  sel.criterion_values.reserve(grid.size());

  Vector warm = Vector::Zero(d.p);
  bool have_best = false;
  bool best_exact = false;  // zero-residual fit seen
  Index best_df = 0;
  double best_crit = std::numeric_limits<double>::infinity();
  CdResult best_cd;
  double best_lambda = grid.front();

  for (const double lambda : grid) {
    if (lambda < 0.0 || !std::isfinite(lambda)) {
      throw InvalidInputError("gic_select: lambda must be finite and >= 0");
    }
    CdResult cd = cd_solve(d, y, lambda, opts, &warm);
    warm = cd.u_std;
    const double mse = cd.residual_sq / n;
    const Index df = static_cast<Index>((cd.u_std.array() != 0.0).count());
    const bool exact = mse <= 0.0;
    const double crit =
        exact ? -std::numeric_limits<double>::infinity()
              : std::log(mse) + static_cast<double>(df) * penalty_unit;
    sel.criterion_values.push_back(crit);

    bool better = false;
    if (exact && !best_exact) {
      better = true;
    } else if (exact && best_exact) {
      better = df < best_df;  // sparsest zero-residual fit
    } else if (!best_exact) {
      better = crit < best_crit;  // ties keep the earlier (larger) lambda
    }
    if (!have_best || better) {
      have_best = true;
      best_exact = exact;
      best_df = df;
      best_crit = crit;
      best_cd = std::move(cd);
      best_lambda = lambda;
    }
  }

  sel.lambda = best_lambda;
  sel.fit = make_fit(d, x, y, best_lambda, best_cd);
  return sel;
}

}  // namespace peer
