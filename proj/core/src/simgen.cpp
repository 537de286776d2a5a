#include "peer/simgen.hpp"

#include "peer/linalg.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace peer {

namespace {

double draw_from(const ValueSet& set, RngEngine& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, set.values.size() - 1);
  return set.values[pick(rng)];
}

// One uniform draw mapped across the union, so sampling is uniform with
// respect to total length.
double draw_from(const IntervalUnion& set, RngEngine& rng) {
  const double total = set.total_length();
  std::uniform_real_distribution<double> unif(0.0, total);
  double x = unif(rng);
  for (const auto& [lo, hi] : set.intervals) {
    const double len = hi - lo;
    if (x <= len) return lo + x;
    x -= len;
  }
  return set.intervals.back().second;
}

Matrix standard_normal(Index rows, Index cols, RngEngine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = normal(rng);
    }
  }
  return out;
}

Matrix ar1_covariance(Index p, double rho) {
  Matrix gamma(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      gamma(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
    }
  }
  return gamma;
}

Matrix sparse_left_factors(Index p, Index r_star, Index s, const ValueSet& q_u,
                           RngEngine& rng,
                           std::vector<std::vector<Index>>* supports) {
  Matrix u = Matrix::Zero(p, r_star);
  for (Index k = 0; k < r_star; ++k) {
    std::vector<Index> support;
    for (Index i = 0; i < s; ++i) {
      const Index pos = k * s + i;
      u(pos, k) = draw_from(q_u, rng);
      support.push_back(pos);
    }
    const double norm = u.col(k).norm();
    if (norm == 0.0) {
      throw InvalidInputError("gen_truth: left factor " + std::to_string(k + 1) +
                              " is zero; Q_u admits no nonzero draw");
    }
    u.col(k) /= norm;
    supports->push_back(std::move(support));
  }
  return u;
}

}  // namespace

double IntervalUnion::total_length() const {
  double total = 0.0;
  for (const auto& [lo, hi] : intervals) total += hi - lo;
  return total;
}

void SimScenario::validate() const {
  if (study != 1 && study != 2) {
    throw InvalidInputError("scenario: study must be 1 or 2");
  }
  if (n < 1 || p < 1 || q < 1 || r_star < 1) {
    throw InvalidInputError("scenario: n, p, q, r_star must be positive");
  }
  if (r_star > std::min(p, q)) {
    throw InvalidInputError("scenario: r_star must be <= min(p, q)");
  }
  if (study == 1) {
    if (s < 1 || r_star * s > p) {
      throw InvalidInputError("scenario: study 1 requires 1 <= s and r_star*s <= p");
    }
  } else {
    if (s_u < 1 || r_star * s_u > p) {
      throw InvalidInputError(
          "scenario: study 2 requires 1 <= s_u and r_star*s_u <= p");
    }
    if (s_v < 1 || r_star * s_v > q) {
      throw InvalidInputError(
          "scenario: study 2 requires 1 <= s_v and r_star*s_v <= q");
    }
  }
  if (!(snr > 0.0)) {
    throw InvalidInputError("scenario: snr must be positive");
  }
  if (!(missing_rate >= 0.0) || !(missing_rate < 1.0)) {
    throw InvalidInputError("scenario: missing_rate must be in [0, 1)");
  }
  if (q_u.values.empty()) {
    throw InvalidInputError("scenario: Q_u must be nonempty");
  }
  if (q_v.intervals.empty() || !(q_v.total_length() > 0.0)) {
    throw InvalidInputError("scenario: Q_v must have positive total length");
  }
  for (const auto& [lo, hi] : q_v.intervals) {
    if (!(lo <= hi)) {
      throw InvalidInputError("scenario: Q_v interval with lo > hi");
    }
  }
}

GroundTruth gen_truth(const SimScenario& scn, RngEngine& rng) {
  scn.validate();
  GroundTruth truth;
  const Index r_star = scn.r_star;

  if (scn.study == 1) {
    truth.u_star = sparse_left_factors(scn.p, r_star, scn.s, scn.q_u, rng,
                                       &truth.supports);
    Matrix v_bar(scn.q, r_star);
    for (Index k = 0; k < r_star; ++k) {
      for (Index i = 0; i < scn.q; ++i) {
        v_bar(i, k) = draw_from(scn.q_v, rng);
      }
    }
    truth.v_star = qr_orthonormalize(v_bar);
  } else {
    truth.u_star = sparse_left_factors(scn.p, r_star, scn.s_u, scn.q_u, rng,
                                       &truth.supports);
    // Sparse right factors, kept unnormalized as in the generating recipe.
    truth.v_star = Matrix::Zero(scn.q, r_star);
    for (Index k = 0; k < r_star; ++k) {
      for (Index i = 0; i < scn.s_v; ++i) {
        truth.v_star(k * scn.s_v + i, k) = draw_from(scn.q_v, rng);
      }
    }
  }

  truth.d_star.resize(r_star);
  for (Index k = 0; k < r_star; ++k) {
    truth.d_star(k) = 5.0 + 5.0 * static_cast<double>(r_star - k);
  }
  truth.c_star =
      truth.u_star * truth.d_star.asDiagonal() * truth.v_star.transpose();
  return truth;
}

Matrix gen_design(const GroundTruth& truth, Index n, RngEngine& rng) {
  const Index p = truth.u_star.rows();
  const Index r_star = truth.u_star.cols();
  if (n < 1) {
    throw InvalidInputError("gen_design: n must be positive");
  }
  const Matrix gram = truth.u_star.transpose() * truth.u_star;
  if ((gram - Matrix::Identity(r_star, r_star)).cwiseAbs().maxCoeff() > 1e-8) {
    throw InvalidInputError("gen_design: U* columns must be orthonormal");
  }

  const Matrix x1 = standard_normal(n, r_star, rng);
  if (p == r_star) {
    // No orthogonal complement; x = P x1 with square orthonormal P = U*.
    return x1 * truth.u_star.transpose();
  }

  // P = (U*, U*_perp) via QR completion to a full orthonormal basis.
  Eigen::HouseholderQR<Matrix> qr(truth.u_star);
  const Matrix q_full = qr.householderQ() * Matrix::Identity(p, p);
  Matrix basis(p, p);
  basis.leftCols(r_star) = truth.u_star;
  basis.rightCols(p - r_star) = q_full.rightCols(p - r_star);

  const Matrix sigma =
      basis.transpose() * ar1_covariance(p, 0.5) * basis;
  const Matrix sigma11 = sigma.topLeftCorner(r_star, r_star);
  const Matrix sigma12 = sigma.topRightCorner(r_star, p - r_star);
  const Matrix sigma22 = sigma.bottomRightCorner(p - r_star, p - r_star);

  Eigen::LLT<Matrix> llt(sigma11);
  if (llt.info() != Eigen::Success) {
    throw NumericError("gen_design: singular latent covariance block");
  }
  const Matrix slope = llt.solve(sigma12);  // Sigma11^{-1} Sigma12
  Matrix schur = sigma22 - sigma12.transpose() * slope;
  schur = 0.5 * (schur + schur.transpose());
  const Matrix chol = cholesky_psd(schur);

  const Matrix noise = standard_normal(n, p - r_star, rng);
  Matrix joint(n, p);
  joint.leftCols(r_star) = x1;
  joint.rightCols(p - r_star) = x1 * slope + noise * chol.transpose();
  return joint * basis.transpose();
}

std::pair<Matrix, double> gen_response(const Matrix& x,
                                       const GroundTruth& truth, double snr,
                                       RngEngine& rng) {
  if (!(snr > 0.0)) {
    throw InvalidInputError("gen_response: snr must be positive");
  }
  const Index n = x.rows();
  const Index q = truth.v_star.rows();
  const Index last = truth.d_star.size() - 1;

  const double signal_norm = truth.d_star(last) *
                             (x * truth.u_star.col(last)).norm() *
                             truth.v_star.col(last).norm();
  if (signal_norm == 0.0) {
    throw InvalidInputError("gen_response: weakest layer carries no signal");
  }
  const Matrix e0 = standard_normal(n, q, rng);
  const double sigma = signal_norm / (snr * e0.norm());
  Matrix y = x * truth.c_star + sigma * e0;
  return {std::move(y), sigma};
}

ObservedMatrix apply_missingness(const Matrix& y_full, double rate,
                                 RngEngine& rng) {
  if (!(rate >= 0.0) || !(rate < 1.0)) {
    throw InvalidInputError("apply_missingness: rate must be in [0, 1)");
  }
  const Index n = y_full.rows();
  const Index q = y_full.cols();
  const Index total = n * q;
  const Index n_missing =
      static_cast<Index>(std::llround(rate * static_cast<double>(total)));

  BoolArray mask = BoolArray::Constant(n, q, true);
  if (n_missing > 0) {
    // Partial Fisher-Yates over row-major flat indices.
    std::vector<Index> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < n_missing; ++i) {
      std::uniform_int_distribution<Index> pick(i, total - 1);
      std::swap(idx[static_cast<std::size_t>(i)],
                idx[static_cast<std::size_t>(pick(rng))]);
      const Index flat = idx[static_cast<std::size_t>(i)];
      mask(flat / q, flat % q) = false;
    }
  }
  return ObservedMatrix::with_mask(y_full, std::move(mask));
}

SimDataset generate(const SimScenario& scn) {
  scn.validate();
  const std::uint64_t rep = static_cast<std::uint64_t>(scn.replicate_id);
  RngEngine truth_rng = substream(scn.seed, rep, Stream::kTruth);
  RngEngine design_rng = substream(scn.seed, rep, Stream::kDesign);
  RngEngine noise_rng = substream(scn.seed, rep, Stream::kNoise);
  RngEngine mask_rng = substream(scn.seed, rep, Stream::kMask);

  SimDataset data;
  data.truth = gen_truth(scn, truth_rng);
  data.x = gen_design(data.truth, scn.n, design_rng);
  auto [y, sigma] = gen_response(data.x, data.truth, scn.snr, noise_rng);
  data.y_full = std::move(y);
  data.sigma = sigma;
  data.obs = apply_missingness(data.y_full, scn.missing_rate, mask_rng);
  return data;
}

}  // namespace peer
