#pragma once

#include "peer/types.hpp"

#include <utility>
#include <vector>

namespace peer {

struct FitScore {
  double er_c = 0.0;   // ||C_hat - C*||_F^2 / (pq)
  double er_xc = 0.0;  // ||X (C_hat - C*)||_F^2 / (nq)
  double fpr = 0.0;
  double fnr = 0.0;
  double runtime_seconds = 0.0;
};

double estimation_error(const Matrix& c_hat, const Matrix& c_star);

double prediction_error(const Matrix& x, const Matrix& c_hat,
                        const Matrix& c_star);

/// Pooled (FPR, FNR) over the positions of the first r* estimated left
/// singular vectors, matched to the true layers by index. The estimated
/// list is truncated to r* layers; when it is shorter (r_hat < r*) the
/// missing layers count as empty supports. A zero denominator gives rate 0.
std::pair<double, double> selection_rates(
    const std::vector<std::vector<Index>>& estimated_supports,
    const std::vector<std::vector<Index>>& true_supports, Index p);

struct SummaryStats {
  FitScore mean;
  FitScore sd;  // sample standard deviation (n-1), 0 for a single score
};

SummaryStats summarize(const std::vector<FitScore>& scores);

}  // namespace peer
