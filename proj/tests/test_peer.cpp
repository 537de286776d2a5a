#include "peer/peer.hpp"

#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace peer;
using peer::testing::orthogonal_design;
using peer::testing::random_matrix;
using peer::testing::random_vector;

namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

struct RankOneInstance {
  Matrix x;
  Matrix y;
  Vector u_star;
  std::set<Index> support;
  Matrix c_star;
};

// Noiseless rank-1 model: n=50, p=10, q=8, u* 3-sparse, d* = 10.
RankOneInstance rank_one_instance(unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = 50, p = 10, q = 8;
  RankOneInstance inst;
  inst.u_star = Vector::Zero(p);
  for (Index j = 0; j < 3; ++j) {
    inst.u_star(j) = (gen() % 2 == 0 ? 1.0 : -1.0) / std::sqrt(3.0);
    inst.support.insert(j);
  }
  Vector v(q);
  for (Index j = 0; j < q; ++j) v(j) = normal(gen);
  v /= v.norm();
  inst.x.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) inst.x(i, j) = normal(gen);
  }
  inst.c_star = 10.0 * inst.u_star * v.transpose();
  inst.y = inst.x * inst.c_star;
  return inst;
}

BoolArray random_mask(Index n, Index q, double keep, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  BoolArray mask(n, q);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < q; ++j) mask(i, j) = unif(gen) < keep;
  }
  return mask;
}

}  // namespace

TEST(EstimateRank, ThresholdFormula) {
  // tau_200 = log(log 200) / log 200.
  const double tau = std::log(std::log(200.0)) / std::log(200.0);
  EXPECT_NEAR(tau, 0.3147, 1e-4);
  Vector d(1);
  d << (tau + 0.01) * std::sqrt(200.0 * 50.0);
  EXPECT_EQ(estimate_rank(d, 200, 50), 1);
  d(0) = (tau - 0.01) * std::sqrt(200.0 * 50.0);
  EXPECT_EQ(estimate_rank(d, 200, 50), 0);
}

TEST(EstimateRank, ScaledGapExample) {
  // Scaled gaps (2.0, 3.0, 0.0005) against tau_200: the largest k whose gap
  // clears the threshold is k = 2.
  const Index n = 200, q = 100;
  const double scale = std::sqrt(static_cast<double>(n * q));
  Vector d(3);
  d(2) = 0.0005 * scale;
  d(1) = d(2) + 3.0 * scale;
  d(0) = d(1) + 2.0 * scale;
  EXPECT_EQ(estimate_rank(d, n, q), 2);
}

TEST(EstimateRank, AllZero) {
  EXPECT_EQ(estimate_rank(Vector::Zero(4), 100, 50), 0);
}

TEST(EstimateRank, DNextSuppressesTrailingGap) {
  // Without d_next the last entry counts as a gap against 0; a close
  // follower kills it.
  Vector d(2);
  d << 140.0, 60.0;
  const Index n = 200, q = 100;
  EXPECT_EQ(estimate_rank(d, n, q), 2);
  EXPECT_EQ(estimate_rank(d, n, q, 59.0), 1);
}

TEST(EstimateRank, ThresholdMonotonicity) {
  std::mt19937 gen(40);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector d(5);
    d(4) = unif(gen);
    for (Index k = 3; k >= 0; --k) d(k) = d(k + 1) + unif(gen);
    const double d_next = unif(gen) * d(4);
    Index previous = 5;
    for (double tau : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
      const Index r_hat = estimate_rank_with_threshold(d, tau, d_next);
      EXPECT_LE(r_hat, previous);
      previous = r_hat;
    }
  }
}

TEST(EstimateRank, Validation) {
  Vector ascending(2);
  ascending << 1.0, 2.0;
  EXPECT_THROW(estimate_rank(ascending, 100, 10), InvalidInputError);
  Vector ok(2);
  ok << 2.0, 1.0;
  EXPECT_THROW(estimate_rank(ok, 2, 10), InvalidInputError);
  EXPECT_THROW(estimate_rank(Vector(), 100, 10), InvalidInputError);
}

TEST(FitPeer, NoiselessRankOneRecovery) {
  const auto inst = rank_one_instance(500);
  const auto obs = ObservedMatrix::fully_observed(inst.y);
  PeerOptions opts;
  opts.rank = 2;
  const auto model = fit_peer(obs, inst.x, opts);
  EXPECT_EQ(model.estimated_rank, 1);
  std::set<Index> support;
  for (Index j = 0; j < inst.x.cols(); ++j) {
    if (model.layers[0].u_hat(j) != 0.0) support.insert(j);
  }
  EXPECT_EQ(support, inst.support);
  const double rel_err =
      (model.c_hat - inst.c_star).norm() / inst.c_star.norm();
  EXPECT_LT(rel_err, 0.05);
  // Fully observed input goes through the direct-SVD path.
  EXPECT_EQ(model.init.iterations_used, 0);
}

TEST(FitPeer, OrthogonalDesignSoftThresholdsFactor) {
  const Index n = 16;
  const Matrix x =
      std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
  const Matrix y = random_matrix(n, 6, 51);
  PeerOptions opts;
  opts.rank = 2;
  const auto model = fit_peer(ObservedMatrix::fully_observed(y), x, opts);
  // With X = sqrt(n) I the regression target is z_tilde itself, so u_hat is
  // the soft-thresholded factor at the chosen lambda.
  const Vector z1 = model.init.svd.left.col(0);
  const auto& layer = model.layers[0];
  for (Index j = 0; j < n; ++j) {
    EXPECT_NEAR(layer.u_hat(j), soft(z1(j), layer.lambda / 2.0), 1e-8);
  }
}

TEST(FitPeer, AllZeroResponse) {
  PeerOptions opts;
  opts.rank = 2;
  const auto model = fit_peer(
      ObservedMatrix::fully_observed(Matrix::Zero(12, 6)),
      random_matrix(12, 8, 52), opts);
  EXPECT_EQ(model.estimated_rank, 0);
  EXPECT_EQ(model.c_hat, Matrix::Zero(8, 6));
}

TEST(FitPeer, LayerIndependence) {
  const Matrix y = random_matrix(30, 10, 53);
  const Matrix x = random_matrix(30, 15, 54);
  const auto obs =
      ObservedMatrix::with_mask(y, random_mask(30, 10, 0.9, 55));
  PeerOptions opts;
  opts.rank = 3;
  const auto model = fit_peer(obs, x, opts);
  // Re-run one layer in isolation from the same initializer.
  const Index k = 1;
  const Vector target =
      std::sqrt(30.0) * model.init.svd.left.col(k);
  const auto grid = lambda_path(x, target, opts.lambda_grid_size,
                                opts.lambda_grid_ratio);
  const auto sel = gic_select(x, target, grid, opts.lasso);
  EXPECT_EQ(sel.lambda, model.layers[k].lambda);
  EXPECT_EQ(sel.fit.coefficients, model.layers[k].u_hat);
}

TEST(FitPeer, DeterministicAcrossThreadCounts) {
  const Matrix y = random_matrix(40, 12, 56);
  const Matrix x = random_matrix(40, 20, 57);
  const auto obs =
      ObservedMatrix::with_mask(y, random_mask(40, 12, 0.85, 58));
  PeerOptions opts;
  opts.rank = 4;
  opts.threads = 1;
  const auto reference = fit_peer(obs, x, opts);
  for (Index threads : {2, 4}) {
    opts.threads = threads;
    const auto model = fit_peer(obs, x, opts);
    EXPECT_EQ(model.c_hat, reference.c_hat);
    EXPECT_EQ(model.estimated_rank, reference.estimated_rank);
    for (std::size_t k = 0; k < reference.layers.size(); ++k) {
      EXPECT_EQ(model.layers[k].u_hat, reference.layers[k].u_hat);
      EXPECT_EQ(model.layers[k].lambda, reference.layers[k].lambda);
    }
  }
}

TEST(FitPeer, CHatRankBounded) {
  const Matrix y = random_matrix(25, 9, 59);
  const Matrix x = random_matrix(25, 12, 60);
  PeerOptions opts;
  opts.rank = 3;
  const auto model = fit_peer(ObservedMatrix::fully_observed(y), x, opts);
  Eigen::BDCSVD<Matrix> svd(model.c_hat);
  Index numeric_rank = 0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > 1e-10 * svd.singularValues()(0)) {
      ++numeric_rank;
    }
  }
  EXPECT_LE(numeric_rank, model.estimated_rank);
  // C_hat equals the layer sum exactly as assembled.
  Matrix assembled = Matrix::Zero(12, 9);
  for (Index k = 0; k < model.estimated_rank; ++k) {
    const auto& layer = model.layers[static_cast<std::size_t>(k)];
    assembled += layer.d_hat * layer.u_hat * layer.v_hat.transpose();
  }
  EXPECT_EQ(model.c_hat, assembled);
}

TEST(FitPeer, CenteringStoresMeansAndPredictRestoresThem) {
  Matrix y = random_matrix(20, 5, 61);
  y.rowwise() += Eigen::RowVectorXd::Constant(5, 7.0);
  const Matrix x = random_matrix(20, 6, 62);
  PeerOptions opts;
  opts.rank = 2;
  opts.center_responses = true;
  const auto model = fit_peer(ObservedMatrix::fully_observed(y), x, opts);
  for (Index j = 0; j < 5; ++j) {
    EXPECT_NEAR(model.y_means(j), y.col(j).mean(), 1e-12);
  }
  const Matrix at_zero = predict(model, Matrix::Zero(3, 6));
  for (Index i = 0; i < 3; ++i) {
    EXPECT_LT((at_zero.row(i).transpose() - model.y_means).norm(), 1e-12);
  }
}

TEST(FitPeer, InputValidation) {
  const Matrix y = random_matrix(10, 4, 63);
  const Matrix x = random_matrix(11, 5, 64);
  PeerOptions opts;
  opts.rank = 2;
  EXPECT_THROW(fit_peer(ObservedMatrix::fully_observed(y), x, opts),
               InvalidInputError);
  const Matrix x_ok = random_matrix(10, 5, 65);
  opts.rank = 5;  // > min(p, q, n) = 4
  EXPECT_THROW(fit_peer(ObservedMatrix::fully_observed(y), x_ok, opts),
               InvalidInputError);
}

TEST(Predict, ZeroCoefficients) {
  PeerModel model;
  model.c_hat = Matrix::Zero(4, 3);
  model.y_means = Vector::Zero(3);
  EXPECT_EQ(predict(model, random_matrix(5, 4, 66)), Matrix::Zero(5, 3));
}

TEST(Predict, IdentityDesignReturnsCHat) {
  PeerModel model;
  model.c_hat = random_matrix(4, 3, 67);
  model.y_means = Vector::Zero(3);
  EXPECT_EQ(predict(model, Matrix::Identity(4, 4)), model.c_hat);
}

TEST(Predict, LinearInRows) {
  PeerModel model;
  model.c_hat = random_matrix(6, 4, 68);
  model.y_means = Vector::Zero(4);
  const Matrix x1 = random_matrix(3, 6, 69);
  const Matrix x2 = random_matrix(2, 6, 70);
  Matrix stacked(5, 6);
  stacked << x1, x2;
  Matrix expected(5, 4);
  expected << predict(model, x1), predict(model, x2);
  EXPECT_EQ(predict(model, stacked), expected);
}

TEST(Predict, ShapeMismatchRejected) {
  PeerModel model;
  model.c_hat = Matrix::Zero(4, 3);
  model.y_means = Vector::Zero(3);
  EXPECT_THROW(predict(model, random_matrix(5, 3, 71)), InvalidInputError);
}
