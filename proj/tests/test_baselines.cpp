#include <gosdpca/baselines.hpp>
#include <gosdpca/numerics.hpp>

#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.hpp"

using namespace gosdpca;
using gosdpca::testing::ar1;
using gosdpca::testing::randn;

namespace {

double soft(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Columns with mean 0 and x'x / n = I.
MatrixXd orthonormal_design(std::mt19937_64& rng, Index n, Index p) {
  MatrixXd x = randn(rng, n, p);
  x = x.rowwise() - x.colwise().mean();
  return orthonormal_basis(x) * std::sqrt(static_cast<double>(n));
}

MatrixXd standardized(const MatrixXd& x) {
  MatrixXd z = x.rowwise() - x.colwise().mean();
  for (Index j = 0; j < z.cols(); ++j) z.col(j) /= std::sqrt(z.col(j).squaredNorm() / static_cast<double>(z.rows()));
  return z;
}

double abs_corr(const VectorXd& a, const VectorXd& b) {
  const VectorXd ac = a.array() - a.mean(), bc = b.array() - b.mean();
  return std::abs(ac.dot(bc)) / (ac.norm() * bc.norm());
}

}  // namespace

TEST(SwFactors, PerfectlyCorrelatedPair) {
  std::mt19937_64 rng(1);
  const VectorXd c = randn(rng, 50);
  MatrixXd x(50, 2);
  x << c, 3.0 * c.array() + 1.0;
  const auto f = sw_factors(x, 1);
  EXPECT_NEAR(abs_corr(f.factors.col(0), c), 1.0, 1e-12);
  EXPECT_NEAR(f.eigenvalues(0), 2.0, 1e-10);
}

TEST(SwFactors, IdentityNoiseEigenvalues) {
  std::mt19937_64 rng(2);
  const auto f = sw_factors(randn(rng, 5000, 5), 5);
  for (Index k = 0; k < 5; ++k) EXPECT_NEAR(f.eigenvalues(k), 1.0, 0.1);
  EXPECT_LT((f.loadings.transpose() * f.loadings - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SwFactors, DropsConstantColumn) {
  std::mt19937_64 rng(3);
  MatrixXd x = randn(rng, 40, 4);
  x.col(1).setConstant(2.0);
  const auto f = sw_factors(x, 2);
  EXPECT_EQ(f.warnings.size(), 1u);
  EXPECT_EQ(f.loadings.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((f.loadings.transpose() * f.loadings - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(sw_factors(x, 4), InputError);
}

TEST(LybFactors, MatrixIsSymmetricNonNegative) {
  std::mt19937_64 rng(4);
  const MatrixXd m = lyb_matrix(randn(rng, 60, 12), 3);
  EXPECT_EQ((m - m.transpose()).cwiseAbs().maxCoeff(), 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8 * eig.eigenvalues().cwiseAbs().maxCoeff());
}

// Wide panels take the low-rank route; it must agree with the dense matrix.
TEST(LybFactors, LowRankRouteMatchesDenseMatrix) {
  std::mt19937_64 rng(5);
  const MatrixXd x = randn(rng, 25, 60);
  const auto f = lyb_factors(x, 2, 4);
  const auto pairs = sym_eig_top(lyb_matrix(x, 2), 4);
  for (Index k = 0; k < 4; ++k) {
    const auto& p = pairs[static_cast<std::size_t>(k)];
    EXPECT_NEAR(f.eigenvalues(k), p.value, 1e-9 * pairs[0].value);
    EXPECT_LT((f.loadings.col(k) - p.vector).cwiseAbs().maxCoeff(), 1e-7);
  }
  EXPECT_LT((f.loadings.transpose() * f.loadings - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LybFactors, RecoversPlantedFactor) {
  int good = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const VectorXd f = ar1(rng, 300, 0.8);
    VectorXd load = randn(rng, 20);
    load.normalize();
    const MatrixXd x = f * (3.0 * load).transpose() + randn(rng, 300, 20);
    const auto fit = lyb_factors(x, 2, 1);
    good += std::abs(fit.loadings.col(0).dot(load)) > 0.95;
  }
  EXPECT_GE(good, 19);
}

TEST(LybFactors, WhiteNoiseEigenvaluesShrinkWithSampleSize) {
  auto median_top = [](Index n) {
    std::vector<double> v;
    for (int seed = 0; seed < 21; ++seed) {
      std::mt19937_64 rng(500 + seed);
      v.push_back(lyb_factors(randn(rng, n, 10), 2, 1).eigenvalues(0));
    }
    std::nth_element(v.begin(), v.begin() + 10, v.end());
    return v[10];
  };
  EXPECT_LT(median_top(800), median_top(200));
}

TEST(LybFactors, Errors) {
  EXPECT_THROW(lyb_factors(MatrixXd::Ones(4, 3), 2, 1), InputError);
  EXPECT_THROW(lyb_factors(MatrixXd::Ones(20, 3), 1, 4), InputError);
  EXPECT_THROW(lyb_matrix(MatrixXd::Ones(20, 3), 0), InputError);
}

TEST(Lasso, ZeroPenaltyMatchesLeastSquares) {
  std::mt19937_64 rng(6);
  const MatrixXd x = randn(rng, 60, 5);
  const VectorXd y = x * VectorXd::LinSpaced(5, -1, 1) + randn(rng, 60);
  const auto fit = lasso_coordinate_descent(x, y, 0.0);
  MatrixXd d(60, 6);
  d << VectorXd::Ones(60), x;
  const auto ls = least_squares(d, y);
  EXPECT_NEAR(fit.intercept, ls.coefficients(0), 1e-6);
  EXPECT_LT((fit.coefficients - ls.coefficients.tail(5)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Lasso, NullThreshold) {
  std::mt19937_64 rng(7);
  const MatrixXd x = randn(rng, 40, 8);
  const VectorXd y = randn(rng, 40);
  const MatrixXd z = standardized(x);
  const VectorXd yc = y.array() - y.mean();
  const double lambda_max = (z.transpose() * yc).cwiseAbs().maxCoeff() / 40.0;
  const auto fit = lasso_coordinate_descent(x, y, lambda_max * (1 + 1e-12));
  EXPECT_EQ(fit.nonzero_count, 0);
  EXPECT_NEAR(fit.intercept, y.mean(), 1e-12);
  EXPECT_GT(lasso_coordinate_descent(x, y, 0.9 * lambda_max).nonzero_count, 0);
}

TEST(Lasso, OrthonormalDesignSoftThresholds) {
  std::mt19937_64 rng(8);
  const Index n = 80, p = 6;
  const MatrixXd x = orthonormal_design(rng, n, p);
  const VectorXd y = x * VectorXd::LinSpaced(p, -0.6, 0.9) + 0.3 * randn(rng, n);
  const VectorXd ols = x.transpose() * (y.array() - y.mean()).matrix() / static_cast<double>(n);
  Index prev_count = 0;
  for (const double lambda : {0.8, 0.5, 0.3, 0.2, 0.1, 0.05, 0.01}) {
    const auto fit = lasso_coordinate_descent(x, y, lambda);
    for (Index j = 0; j < p; ++j) EXPECT_NEAR(fit.coefficients(j), soft(ols(j), lambda), 1e-8);
    EXPECT_GE(fit.nonzero_count, prev_count);
    prev_count = fit.nonzero_count;
  }
}

// Stationarity conditions on the standardized scale.
TEST(Lasso, KktConditions) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 40 + rep % 30, p = 10 + (rep * 7) % 60;
    const MatrixXd x = randn(rng, n, p);
    VectorXd y = randn(rng, n);
    y += 2.0 * x.col(0) - x.col(p - 1);
    const MatrixXd z = standardized(x);
    const VectorXd yc = y.array() - y.mean();
    const double lambda_max = (z.transpose() * yc).cwiseAbs().maxCoeff() / static_cast<double>(n);
    const double lambda = lambda_max * (0.05 + 0.9 * (rep % 10) / 10.0);
    const auto fit = lasso_coordinate_descent(x, y, lambda);
    VectorXd sd(p);
    for (Index j = 0; j < p; ++j) {
      const VectorXd c = x.col(j).array() - x.col(j).mean();
      sd(j) = std::sqrt(c.squaredNorm() / static_cast<double>(n));
    }
    const VectorXd beta = fit.coefficients.cwiseProduct(sd);
    const VectorXd grad = z.transpose() * (yc - z * beta) / static_cast<double>(n);
    for (Index j = 0; j < p; ++j) {
      if (beta(j) == 0)
        EXPECT_LE(std::abs(grad(j)), lambda + 1e-6);
      else
        EXPECT_NEAR(grad(j), lambda * (beta(j) > 0 ? 1.0 : -1.0), 1e-6);
    }
  }
}

TEST(Lasso, ConvergenceFailureCarriesIterate) {
  std::mt19937_64 rng(10);
  const MatrixXd x = randn(rng, 30, 10);
  const VectorXd y = randn(rng, 30);
  LassoOptions opt;
  opt.max_sweeps = 1;
  try {
    lasso_coordinate_descent(x, y, 1e-4, opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 10);
  }
}

TEST(LassoBic, PureNoiseSelectsNullModel) {
  int empty = 0;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const MatrixXd x = randn(rng, 100, 20);
    const VectorXd y = randn(rng, 100);
    empty += lasso_bic(x, y).nonzero_count == 0;
  }
  EXPECT_GT(empty, 100);
}

// Lasso shrinkage inflates the RSS of the true model, so BIC usually admits
// a few extra noise columns; the planted support itself is always kept.
TEST(LassoBic, RecoversSparseSupport) {
  int covered = 0, small = 0;
  const int seeds = 30;
  for (int seed = 0; seed < seeds; ++seed) {
    std::mt19937_64 rng(2000 + seed);
    const MatrixXd x = randn(rng, 200, 500);
    const VectorXd y = 3.0 * x.col(10) - 2.5 * x.col(200) + 2.0 * x.col(444) + randn(rng, 200);
    const auto fit = lasso_bic(x, y);
    covered += fit.coefficients(10) > 0 && fit.coefficients(200) < 0 && fit.coefficients(444) > 0;
    small += fit.nonzero_count <= 10;
  }
  EXPECT_GE(covered, seeds * 8 / 10);
  EXPECT_GE(small, seeds * 8 / 10);
}

TEST(LassoBic, LateConvergenceFailureEndsPath) {
  std::mt19937_64 rng(11);
  MatrixXd x = randn(rng, 60, 8);
  x.col(1) = x.col(0) + 0.01 * x.col(1);
  const VectorXd y = x.col(0) + 0.3 * randn(rng, 60);
  LassoOptions opt;
  opt.max_sweeps = 2;
  opt.tolerance = 1e-14;
  const auto fit = lasso_bic(x, y, 100, opt);
  EXPECT_TRUE(fit.path_truncated);
  EXPECT_FALSE(lasso_bic(x, y).path_truncated);
}

TEST(LassoBic, Errors) {
  EXPECT_THROW(lasso_bic(MatrixXd::Ones(10, 2), VectorXd::Ones(10), 1), InputError);
  EXPECT_THROW(lasso_coordinate_descent(MatrixXd::Ones(10, 2), VectorXd::Ones(9), 0.1), InputError);
  EXPECT_THROW(lasso_coordinate_descent(MatrixXd::Ones(10, 2), VectorXd::Ones(10), -1), InputError);
}

TEST(LaggedDesign, Layout) {
  VectorXd y(5);
  y << 1, 2, 3, 4, 5;
  MatrixXd x(5, 2);
  x << 10, 20, 11, 21, 12, 22, 13, 23, 14, 24;
  const MatrixXd d = lagged_design(y, x, 2, 1, 3);
  ASSERT_EQ(d.rows(), 3);
  ASSERT_EQ(d.cols(), 6);
  Eigen::RowVectorXd row(6);
  row << 3, 2, 12, 22, 11, 21;
  EXPECT_EQ(d.row(1), row);
  EXPECT_THROW(lagged_design(y, x, 2, 0, 3), InputError);
}
