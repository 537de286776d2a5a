#include "peer/svt.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cassert>
#include <cmath>

namespace peer {

namespace {

struct FullSvd {
  Matrix u;  // n x min(n,q)
  Vector s;  // min(n,q), descending
  Matrix v;  // q x min(n,q)
};

FullSvd svd_of(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("svt: SVD did not converge");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SvdTriplet top_k(const FullSvd& svd, Index k) {
  SvdTriplet out;
  out.left = svd.u.leftCols(k);
  out.singular_values = svd.s.head(k);
  out.right = svd.v.leftCols(k);
  // Same sign convention as thin_svd.
  for (Index c = 0; c < k; ++c) {
    Index max_row = 0;
    out.right.col(c).cwiseAbs().maxCoeff(&max_row);
    if (out.right(max_row, c) < 0.0) {
      out.right.col(c) = -out.right.col(c);
      out.left.col(c) = -out.left.col(c);
    }
  }
  return out;
}

void validate_config(const SvtConfig& cfg, Index n, Index q) {
  if (cfg.rank < 1 || cfg.rank > std::min(n, q)) {
    throw InvalidInputError("svt: rank must be in [1, min(n, q)]");
  }
  if (!(cfg.tolerance > 0.0)) {
    throw InvalidInputError("svt: tolerance must be positive");
  }
  if (cfg.max_iterations < 1) {
    throw InvalidInputError("svt: max_iterations must be >= 1");
  }
}

}  // namespace

InitEstimate svt_initialize(const ObservedMatrix& obs, const SvtConfig& cfg) {
  const Index n = obs.rows();
  const Index q = obs.cols();
  validate_config(cfg, n, q);
  if (obs.m < 1) {
    throw InvalidInputError("svt_initialize: no observed entries");
  }
  const Index r = cfg.rank;
  const Index k_full = std::min(n, q);

  Matrix y = column_mean_impute(obs);
  Matrix a_new = y;

  InitEstimate est;
  est.converged = false;
  FullSvd svd;
  for (Index it = 1; it <= cfg.max_iterations; ++it) {
    const Matrix a_old = std::move(a_new);
    svd = svd_of(y);
    a_new = svd.u.leftCols(r) * svd.s.head(r).asDiagonal() *
            svd.v.leftCols(r).transpose();
    y = combine(obs, a_new);

    const double objective =
        project_observed(obs.values - a_new, obs.mask).squaredNorm() /
        static_cast<double>(obs.m);
    assert(est.objective_trace.empty() ||
           objective <= est.objective_trace.back() * (1.0 + 1e-10) + 1e-12);
    est.objective_trace.push_back(objective);

    const double change = (a_new - a_old).norm();
    const double denom = a_old.norm();
    const double rel = denom == 0.0 ? 0.0 : change / denom;
    est.iterations_used = it;
    est.final_relative_change = rel;
    if (rel <= cfg.tolerance || change < cfg.tolerance * 1e-3) {
      est.converged = true;
      break;
    }
  }

  est.svd = top_k(svd, r);
  est.d_next = r < k_full ? svd.s(r) : 0.0;
  return est;
}

InitEstimate full_data_init(const Matrix& y, Index rank) {
  const Index k_full = std::min(y.rows(), y.cols());
  if (rank < 1 || rank > k_full) {
    throw InvalidInputError("full_data_init: rank must be in [1, min(n, q)]");
  }
  if (!all_finite(y)) {
    throw InvalidInputError("full_data_init: non-finite entries");
  }
  const FullSvd svd = svd_of(y);
  InitEstimate est;
  est.svd = top_k(svd, rank);
  est.d_next = rank < k_full ? svd.s(rank) : 0.0;
  est.iterations_used = 0;
  est.converged = true;
  est.final_relative_change = 0.0;
  return est;
}

}  // namespace peer
