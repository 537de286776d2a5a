#pragma once

#include "peer/lasso.hpp"
#include "peer/svt.hpp"

#include <vector>

namespace peer {

/// One unit-rank layer d_hat * u_hat * v_hat^T of the coefficient matrix.
struct LayerEstimate {
  double d_hat = 0.0;  // n^{-1/2} * d_tilde_k
  Vector u_hat;        // length p, sparse contents
  Vector v_hat;        // length q, unit norm
  double lambda = 0.0;
  Index layer_index = 0;  // k, 1-based
  bool lasso_converged = true;
  Index sweeps_used = 0;
  double seconds = 0.0;
};

struct PeerTimings {
  double init_seconds = 0.0;
  double layers_seconds = 0.0;
  double total_seconds = 0.0;
};

struct PeerOptions {
  Index rank = 1;  // initial rank r; take it slightly larger than expected
  double svt_tolerance = 1e-4;
  Index svt_max_iterations = 500;
  LassoOptions lasso;
  Index lambda_grid_size = 100;
  double lambda_grid_ratio = 1e-3;
  /// Worker threads for the per-layer regressions. Results are joined by
  /// layer index, so any worker count gives bit-identical output.
  Index threads = 1;
  /// Subtract observed column means of Y before fitting and add them back
  /// in predict(). Off by default: the model assumes centered responses,
  /// and centering perturbs exact low-rank structure. Enable for raw data.
  bool center_responses = false;
};

struct PeerModel {
  std::vector<LayerEstimate> layers;  // length r
  Index estimated_rank = 0;           // r_hat
  Matrix c_hat;                       // p x q, sum of the first r_hat layers
  InitEstimate init;
  Vector y_means;  // length q; zero unless center_responses was set
  PeerTimings timings;
};

/// The full two-step procedure: initialization (iterative singular value
/// thresholding, or a direct SVD when no cell is missing), r independent
/// per-layer sparse regressions of sqrt(n) z_k on X with GIC-tuned lambda,
/// the singular value rescaling d_hat_k = n^{-1/2} d_tilde_k, rank
/// estimation, and assembly of C_hat over the first r_hat layers.
PeerModel fit_peer(const ObservedMatrix& obs, const Matrix& x,
                   const PeerOptions& opts);

/// Rank gap rule: the largest k with (nq)^{-1/2}(d_k - d_{k+1}) > tau_n,
/// tau_n = (log n)^{-1} log log n, and 0 if no gap clears the threshold.
/// d_next supplies d_{r+1}; it defaults to 0, but the fitting pipeline
/// passes the (r+1)-th singular value of the completed matrix so the last
/// gap measures a real drop rather than the magnitude of d_r itself.
Index estimate_rank(const Vector& d_tilde, Index n, Index q,
                    double d_next = 0.0);

/// Same rule with an explicit threshold: the largest k with
/// d_k - d_{k+1} > tau on the values as given (no (nq)^{-1/2} scaling).
Index estimate_rank_with_threshold(const Vector& d_tilde, double tau,
                                   double d_next = 0.0);

/// Fitted values X_new * C_hat (plus the stored response means when the
/// model was fitted with centering).
Matrix predict(const PeerModel& model, const Matrix& x_new);

}  // namespace peer
