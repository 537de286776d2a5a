#include "peer/lasso.hpp"

#include "testing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

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

// Independent re-implementation of the stationarity residual on the
// standardized design, mirroring the solver's contract.
double kkt_residual_oracle(const Matrix& x, const Vector& y, const Vector& u,
                           double lambda) {
  const Index n = x.rows();
  const Index p = x.cols();
  Matrix xs(n, p);
  Vector us(p);
  for (Index j = 0; j < p; ++j) {
    const double c = std::sqrt(static_cast<double>(n)) / x.col(j).norm();
    xs.col(j) = x.col(j) * c;
    us(j) = u(j) / c;
  }
  const Vector res = y - xs * us;
  const Vector grad = 2.0 * (xs.transpose() * res) / static_cast<double>(n);
  double worst = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double v = us(j) != 0.0
                         ? std::abs(grad(j) - lambda * (us(j) > 0 ? 1. : -1.))
                         : std::max(0.0, std::abs(grad(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

double lambda_max_oracle(const Matrix& x, const Vector& y) {
  const Index n = x.rows();
  double worst = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    const Vector xs = x.col(j) * std::sqrt(static_cast<double>(n)) /
                      x.col(j).norm();
    worst = std::max(worst,
                     std::abs(2.0 * xs.dot(y) / static_cast<double>(n)));
  }
  return worst;
}

}  // namespace

TEST(LassoCd, NullModelAtLambdaMax) {
  const Matrix x = random_matrix(20, 6, 1);
  const Vector y = random_vector(20, 2);
  const double lmax = lambda_max_oracle(x, y);
  for (double lambda : {lmax, 1.5 * lmax, 10.0 * lmax}) {
    const auto fit = lasso_cd(x, y, lambda);
    EXPECT_EQ(fit.coefficients, Vector::Zero(6));
    EXPECT_TRUE(fit.support.empty());
    EXPECT_TRUE(fit.converged);
  }
}

TEST(LassoCd, OrthogonalDesignClosedForm) {
  const Index n = 24, p = 5;
  const Matrix x = orthogonal_design(n, p, 3);
  const Vector y = random_vector(n, 4);
  const Vector corr = x.transpose() * y / static_cast<double>(n);
  const double lmax = lambda_max_oracle(x, y);
  for (double lambda : {0.05 * lmax, 0.3 * lmax, 0.8 * lmax}) {
    const auto fit = lasso_cd(x, y, lambda);
    for (Index j = 0; j < p; ++j) {
      EXPECT_NEAR(fit.coefficients(j), soft(corr(j), lambda / 2.0), 1e-8);
    }
  }
}

TEST(LassoCd, LambdaZeroIsLeastSquares) {
  const Index n = 30, p = 8;
  const Matrix x = random_matrix(n, p, 5);
  const Vector y = random_vector(n, 6);
  const Vector ols =
      (x.transpose() * x).ldlt().solve(x.transpose() * y);
  LassoOptions opts;
  opts.max_sweeps = 10000;
  const auto fit = lasso_cd(x, y, 0.0, opts);
  EXPECT_LT((fit.coefficients - ols).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(LassoCd, KktAndObjectiveInvariants) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Index n = 25 + seed;
    const Index p = 6 + seed % 5;
    const Matrix x = random_matrix(n, p, 100 + seed);
    const Vector y = random_vector(n, 200 + seed);
    const double lambda = 0.3 * lambda_max_oracle(x, y);
    const auto fit = lasso_cd(x, y, lambda);
    EXPECT_TRUE(fit.converged);
    EXPECT_LT(fit.kkt_violation, 1e-6);
    EXPECT_NEAR(fit.kkt_violation,
                kkt_residual_oracle(x, y, fit.coefficients, lambda), 1e-10);
    const double objective =
        (y - x * fit.coefficients).squaredNorm() / static_cast<double>(n) +
        lambda * fit.coefficients.lpNorm<1>();
    EXPECT_NEAR(fit.objective_value, objective, 1e-10);
    for (Index j : fit.support) {
      EXPECT_NE(fit.coefficients(j), 0.0);
    }
  }
}

TEST(LassoCd, LocalOptimalityOnStandardizedDesign) {
  // With columns already at norm sqrt(n) the raw objective is the solved
  // objective; coordinate perturbations must not improve it.
  const Index n = 40, p = 6;
  const Matrix x = orthogonal_design(n, p, 7);
  const Vector y = random_vector(n, 8);
  const double lambda = 0.2 * lambda_max_oracle(x, y);
  const auto fit = lasso_cd(x, y, lambda);
  auto objective = [&](const Vector& u) {
    return (y - x * u).squaredNorm() / static_cast<double>(n) +
           lambda * u.lpNorm<1>();
  };
  const double base = objective(fit.coefficients);
  for (Index j = 0; j < p; ++j) {
    for (double delta : {1e-5, -1e-5}) {
      Vector u = fit.coefficients;
      u(j) += delta;
      EXPECT_GE(objective(u), base - 1e-12);
    }
  }
}

TEST(LassoCd, WarmStartMatchesColdStart) {
  const Matrix x = random_matrix(30, 10, 9);
  const Vector y = random_vector(30, 10);
  const auto grid = lambda_path(x, y, 20, 1e-2);
  LassoOptions warm_opts;
  Vector warm = Vector::Zero(10);
  for (double lambda : grid) {
    warm_opts.warm_start = warm;
    const auto warm_fit = lasso_cd(x, y, lambda, warm_opts);
    const auto cold_fit = lasso_cd(x, y, lambda);
    EXPECT_LT((warm_fit.coefficients - cold_fit.coefficients)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-6);
    warm = warm_fit.coefficients;
  }
}

TEST(LassoCd, SupportMonotoneOnOrthogonalDesign) {
  const Matrix x = orthogonal_design(32, 7, 11);
  const Vector y = random_vector(32, 12);
  const auto grid = lambda_path(x, y, 25, 1e-3);
  std::size_t previous = 0;
  for (double lambda : grid) {  // descending
    const auto fit = lasso_cd(x, y, lambda);
    EXPECT_GE(fit.support.size(), previous);
    previous = fit.support.size();
  }
}

TEST(LassoCd, RejectsZeroNormColumn) {
  Matrix x = random_matrix(10, 3, 13);
  x.col(1).setZero();
  EXPECT_THROW(lasso_cd(x, random_vector(10, 14), 0.1), InvalidInputError);
}

TEST(LassoCd, SweepBudgetReportsNonConverged) {
  const Matrix x = random_matrix(40, 12, 15);
  const Vector y = random_vector(40, 16);
  LassoOptions opts;
  opts.max_sweeps = 1;
  const auto fit = lasso_cd(x, y, 1e-8, opts);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.sweeps_used, 1);
}

TEST(LambdaPath, ZeroResponseCollapses) {
  const Matrix x = random_matrix(10, 4, 17);
  const auto grid = lambda_path(x, Vector::Zero(10));
  ASSERT_EQ(grid.size(), 1u);
  EXPECT_EQ(grid[0], 0.0);
}

TEST(LambdaPath, TwoPointGridHitsEndpoints) {
  const Matrix x = random_matrix(15, 5, 18);
  const Vector y = random_vector(15, 19);
  const double lmax = lambda_max_oracle(x, y);
  const auto grid = lambda_path(x, y, 2, 1e-3);
  ASSERT_EQ(grid.size(), 2u);
  EXPECT_NEAR(grid[0], lmax, 1e-12 * lmax);
  EXPECT_NEAR(grid[1], 1e-3 * lmax, 1e-12 * lmax);
}

TEST(LambdaPath, HeadOfGridGivesNullFit) {
  const Matrix x = random_matrix(20, 6, 20);
  const Vector y = random_vector(20, 21);
  const auto grid = lambda_path(x, y);
  EXPECT_EQ(grid.size(), 100u);
  const auto fit = lasso_cd(x, y, grid.front());
  EXPECT_TRUE(fit.support.empty());
  EXPECT_TRUE(std::is_sorted(grid.rbegin(), grid.rend()));
}

TEST(LambdaPath, RejectsBadParameters) {
  const Matrix x = random_matrix(10, 3, 22);
  const Vector y = random_vector(10, 23);
  EXPECT_THROW(lambda_path(x, y, 1, 0.5), InvalidInputError);
  EXPECT_THROW(lambda_path(x, y, 10, 0.0), InvalidInputError);
  EXPECT_THROW(lambda_path(x, y, 10, 1.0), InvalidInputError);
}

TEST(GicSelect, SingleLambdaGridReturnsNullFit) {
  const Matrix x = random_matrix(20, 5, 24);
  const Vector y = random_vector(20, 25);
  const double lmax = lambda_max_oracle(x, y);
  const auto sel = gic_select(x, y, {lmax});
  EXPECT_EQ(sel.lambda, lmax);
  EXPECT_TRUE(sel.fit.support.empty());
}

TEST(GicSelect, NoiselessSparseRecovery) {
  const Index n = 60, p = 12;
  const Matrix x = random_matrix(n, p, 26);
  Vector u_true = Vector::Zero(p);
  u_true(1) = 2.0;
  u_true(4) = -1.5;
  u_true(9) = 1.0;
  const Vector y = x * u_true;
  const auto grid = lambda_path(x, y, 100, 1e-4);
  const auto sel = gic_select(x, y, grid);
  for (Index j : {Index{1}, Index{4}, Index{9}}) {
    EXPECT_NE(sel.fit.coefficients(j), 0.0);
  }
  // The chosen criterion beats the null model's.
  const double null_crit = std::log(y.squaredNorm() / static_cast<double>(n));
  const double chosen = *std::min_element(sel.criterion_values.begin(),
                                          sel.criterion_values.end());
  EXPECT_LT(chosen, null_crit);
}

TEST(GicSelect, MatchesBruteForceArgmin) {
  for (unsigned seed : {27u, 28u, 29u}) {
    const Index n = 30, p = 6;
    const Matrix x = random_matrix(n, p, seed);
    const Vector y = random_vector(n, seed + 50);
    const auto grid = lambda_path(x, y, 40, 1e-3);
    const auto sel = gic_select(x, y, grid);

    // Independent evaluation of the criterion over the grid.
    const double penalty = std::log(static_cast<double>(p)) *
                           std::log(std::log(static_cast<double>(n))) /
                           static_cast<double>(n);
    double best = std::numeric_limits<double>::infinity();
    double best_lambda = grid.front();
    for (double lambda : grid) {
      LassoOptions opts;
      opts.max_sweeps = 5000;
      const auto fit = lasso_cd(x, y, lambda, opts);
      const double mse =
          (y - x * fit.coefficients).squaredNorm() / static_cast<double>(n);
      const double crit =
          std::log(mse) + static_cast<double>(fit.support.size()) * penalty;
      if (crit < best) {
        best = crit;
        best_lambda = lambda;
      }
    }
    EXPECT_DOUBLE_EQ(sel.lambda, best_lambda);
  }
}

TEST(GicSelect, ScalarDesignMatchesBruteForce) {
  const Index n = 25;
  const Matrix x = random_matrix(n, 1, 33);
  const Vector y = random_vector(n, 34);
  const auto grid = lambda_path(x, y, 30, 1e-3);
  const auto sel = gic_select(x, y, grid);
  const double penalty =
      std::log(1.0) * std::log(std::log(25.0)) / 25.0;  // log p = 0 at p = 1
  double best = std::numeric_limits<double>::infinity();
  double best_lambda = grid.front();
  for (double lambda : grid) {
    const auto fit = lasso_cd(x, y, lambda);
    const double mse =
        (y - x * fit.coefficients).squaredNorm() / static_cast<double>(n);
    const double crit =
        std::log(mse) + static_cast<double>(fit.support.size()) * penalty;
    if (crit < best) {
      best = crit;
      best_lambda = lambda;
    }
  }
  EXPECT_DOUBLE_EQ(sel.lambda, best_lambda);
}

TEST(GicSelect, RequiresMinimumSampleSize) {
  const Matrix x = random_matrix(2, 2, 35);
  const Vector y = random_vector(2, 36);
  EXPECT_THROW(gic_select(x, y, {0.1}), InvalidInputError);
  EXPECT_THROW(gic_select(random_matrix(10, 2, 37), random_vector(10, 38), {}),
               InvalidInputError);
}
