#include "peer/peer.hpp"

#include "peer/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

namespace peer {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_fit_inputs(const ObservedMatrix& obs, const Matrix& x,
                         const PeerOptions& opts) {
  const Index n = obs.rows();
  if (x.rows() != n) {
    throw InvalidInputError("fit_peer: X and Y row counts differ (" +
                            std::to_string(x.rows()) + " vs " +
                            std::to_string(n) + ")");
  }
  if (n < 3) {
    throw InvalidInputError("fit_peer: needs n >= 3");
  }
  if (!all_finite(x)) {
    throw InvalidInputError("fit_peer: design has non-finite entries");
  }
  const Index max_rank = std::min({x.cols(), obs.cols(), n});
  if (opts.rank < 1 || opts.rank > max_rank) {
    throw InvalidInputError("fit_peer: rank must be in [1, min(p, q, n)]");
  }
  if (opts.lambda_grid_size < 2) {
    throw InvalidInputError("fit_peer: lambda_grid_size must be >= 2");
  }
  if (opts.threads < 1) {
    throw InvalidInputError("fit_peer: threads must be >= 1");
  }
}

Vector observed_column_means(const ObservedMatrix& obs) {
  Vector means = Vector::Zero(obs.cols());
  for (Index j = 0; j < obs.cols(); ++j) {
    const Index count = obs.mask.col(j).count();
    if (count == 0) continue;
    double sum = 0.0;
    for (Index i = 0; i < obs.rows(); ++i) {
      if (obs.mask(i, j)) sum += obs.values(i, j);
    }
    means(j) = sum / static_cast<double>(count);
  }
  return means;
}

ObservedMatrix center_columns(const ObservedMatrix& obs, const Vector& means) {
  Matrix shifted = obs.values;
  for (Index j = 0; j < obs.cols(); ++j) {
    for (Index i = 0; i < obs.rows(); ++i) {
      if (obs.mask(i, j)) shifted(i, j) -= means(j);
    }
  }
  return ObservedMatrix::with_mask(shifted, obs.mask);
}

}  // namespace

Index estimate_rank_with_threshold(const Vector& d_tilde, double tau,
                                   double d_next) {
  const Index r = d_tilde.size();
  if (r < 1) {
    throw InvalidInputError("estimate_rank: empty singular value list");
  }
  const double slack = 1e-9 * std::max(1.0, d_tilde.cwiseAbs().maxCoeff());
  for (Index k = 0; k + 1 < r; ++k) {
    if (d_tilde(k) + slack < d_tilde(k + 1)) {
      throw InvalidInputError("estimate_rank: singular values not descending");
    }
  }
  Index r_hat = 0;
  for (Index k = 0; k < r; ++k) {
    const double following = k + 1 < r ? d_tilde(k + 1) : d_next;
    const double gap = d_tilde(k) - following;
    if (gap > tau) r_hat = k + 1;
  }
  return r_hat;
}

Index estimate_rank(const Vector& d_tilde, Index n, Index q, double d_next) {
  if (n < 3) {
    throw InvalidInputError("estimate_rank: needs n >= 3");
  }
  if (q < 1) {
    throw InvalidInputError("estimate_rank: q must be >= 1");
  }
  const double tau = std::log(std::log(static_cast<double>(n))) /
                     std::log(static_cast<double>(n));
  const double scale =
      std::sqrt(static_cast<double>(n) * static_cast<double>(q));
  const Vector scaled = d_tilde / scale;
  return estimate_rank_with_threshold(scaled, tau, d_next / scale);
}

PeerModel fit_peer(const ObservedMatrix& obs, const Matrix& x,
                   const PeerOptions& opts) {
  validate_fit_inputs(obs, x, opts);
  const auto t_start = Clock::now();
  const Index n = obs.rows();
  const Index p = x.cols();
  const Index q = obs.cols();
  const Index r = opts.rank;

  PeerModel model;
  model.y_means = Vector::Zero(q);

  ObservedMatrix working = obs;
  if (opts.center_responses) {
    model.y_means = observed_column_means(obs);
    working = center_columns(obs, model.y_means);
  }

  if (working.fully_observed_mask()) {
    model.init = full_data_init(working.values, r);
  } else {
    SvtConfig svt_cfg;
    svt_cfg.rank = r;
    svt_cfg.tolerance = opts.svt_tolerance;
    svt_cfg.max_iterations = opts.svt_max_iterations;
    model.init = svt_initialize(working, svt_cfg);
  }
  model.timings.init_seconds = seconds_since(t_start);

  const auto t_layers = Clock::now();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  model.layers.resize(static_cast<std::size_t>(r));
  parallel_for(opts.threads, r, [&](Index k) {
    const auto t_layer = Clock::now();
    try {
      const Vector target = sqrt_n * model.init.svd.left.col(k);
      const auto grid =
          lambda_path(x, target, opts.lambda_grid_size, opts.lambda_grid_ratio);
      const GicSelection sel = gic_select(x, target, grid, opts.lasso);

      LayerEstimate layer;
      layer.layer_index = k + 1;
      layer.d_hat = model.init.svd.singular_values(k) / sqrt_n;
      layer.u_hat = sel.fit.coefficients;
      layer.v_hat = model.init.svd.right.col(k);
      layer.lambda = sel.lambda;
      layer.lasso_converged = sel.fit.converged;
      layer.sweeps_used = sel.fit.sweeps_used;
      layer.seconds = seconds_since(t_layer);
      model.layers[static_cast<std::size_t>(k)] = std::move(layer);
    } catch (const InvalidInputError& e) {
      throw InvalidInputError("layer " + std::to_string(k + 1) + ": " +
                              e.what());
    } catch (const std::exception& e) {
      throw NumericError("layer " + std::to_string(k + 1) + ": " + e.what());
    }
  });
  model.timings.layers_seconds = seconds_since(t_layers);

  for (const auto& layer : model.layers) {
    if (!layer.lasso_converged) {
      log_warning("fit_peer: layer " + std::to_string(layer.layer_index) +
                  " lasso did not converge within the sweep budget");
    }
  }

  model.estimated_rank =
      estimate_rank(model.init.svd.singular_values, n, q, model.init.d_next);
  if (model.estimated_rank == 0) {
    log_warning("fit_peer: no singular value gap clears the threshold; "
                "returning the zero coefficient matrix");
  }

  model.c_hat = Matrix::Zero(p, q);
  for (Index k = 0; k < model.estimated_rank; ++k) {
    const auto& layer = model.layers[static_cast<std::size_t>(k)];
    model.c_hat.noalias() += layer.d_hat * layer.u_hat * layer.v_hat.transpose();
  }

  model.timings.total_seconds = seconds_since(t_start);
  return model;
}

Matrix predict(const PeerModel& model, const Matrix& x_new) {
  if (x_new.cols() != model.c_hat.rows()) {
    throw InvalidInputError("predict: X_new column count does not match p");
  }
  Matrix fitted = x_new * model.c_hat;
  if (model.y_means.size() == fitted.cols() &&
      model.y_means.cwiseAbs().maxCoeff() > 0.0) {
    fitted.rowwise() += model.y_means.transpose();
  }
  return fitted;
}

}  // namespace peer
