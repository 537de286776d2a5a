#pragma once

#include "peer/masked.hpp"
#include "peer/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace peer {

/// Finite value set, e.g. Q_u = {1, -1}.
struct ValueSet {
  std::vector<double> values{1.0, -1.0};
};

/// Union of closed intervals, e.g. Q_v = [-1,-0.3] U [0.3,1]; sampling is
/// uniform with respect to total length.
struct IntervalUnion {
  std::vector<std::pair<double, double>> intervals{{-1.0, -0.3}, {0.3, 1.0}};
  double total_length() const;
};

/// Generator configuration for one simulated dataset.
struct SimScenario {
  int study = 1;  // 1: orthonormal right factors, 2: sparse right factors
  Index n = 100;
  Index p = 200;
  Index q = 100;
  Index r_star = 3;
  Index s = 4;    // study 1 left-factor sparsity
  Index s_u = 4;  // study 2 sparsities
  Index s_v = 5;
  ValueSet q_u;
  IntervalUnion q_v;
  double snr = 0.5;
  double missing_rate = 0.1;
  std::uint64_t seed = 0;
  Index replicate_id = 0;

  void validate() const;  // throws InvalidInputError
};

struct GroundTruth {
  Matrix u_star;  // p x r*, unit-l2 sparse columns with disjoint supports
  Matrix v_star;  // q x r*; orthonormal in study 1, sparse blocks in study 2
  Vector d_star;  // descending positive, d_k = 5 + 5(r* - k + 1)
  Matrix c_star;  // p x q, U D V^T as assembled
  std::vector<std::vector<Index>> supports;  // per-layer nonzero positions
};

struct SimDataset {
  Matrix x;       // n x p
  Matrix y_full;  // n x q, before masking
  ObservedMatrix obs;
  GroundTruth truth;
  double sigma = 0.0;  // noise standard deviation actually used
};

/// Sparse left factors on consecutive index blocks, right factors per the
/// study (QR-orthonormalized dense draws, or literal sparse blocks), and
/// the singular values 5 + 5(r* - k + 1).
GroundTruth gen_truth(const SimScenario& scn, RngEngine& rng);

/// AR(1)-driven design with a decorrelated latent block: x1 ~ N(0, I_{r*})
/// gives cov(U*^T x) = I exactly, x2 | x1 follows the conditional Gaussian
/// under Sigma = P^T Gamma P with Gamma_ij = 0.5^|i-j|, and the sample is
/// mapped back through P = (U*, U*_perp).
Matrix gen_design(const GroundTruth& truth, Index n, RngEngine& rng);

/// Y = X C* + sigma E0 with E0 standard normal and sigma calibrated so the
/// realized ||d*_{r*} X u*_{r*} v*_{r*}^T||_F / ||sigma E0||_F equals snr.
std::pair<Matrix, double> gen_response(const Matrix& x,
                                       const GroundTruth& truth, double snr,
                                       RngEngine& rng);

/// Mask exactly round(rate * n * q) cells chosen uniformly without
/// replacement.
ObservedMatrix apply_missingness(const Matrix& y_full, double rate,
                                 RngEngine& rng);

/// Full pipeline wired to the (seed, replicate_id, purpose) substreams;
/// bit-identical on replay.
SimDataset generate(const SimScenario& scn);

}  // namespace peer
