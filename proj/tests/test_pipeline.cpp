#include <gosdpca/pipeline.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"

using namespace gosdpca;
using gosdpca::testing::ar1;
using gosdpca::testing::make_series;
using gosdpca::testing::randn;

namespace {

std::vector<Index> all_groups(const GroupDesign& d) {
  std::vector<Index> c(static_cast<std::size_t>(d.size()));
  std::iota(c.begin(), c.end(), Index{0});
  return c;
}

// y depends on x1 and x4 at lag 1 plus noise.
SeriesMatrix toy_panel(std::uint64_t seed, Index n, Index p) {
  std::mt19937_64 rng(seed);
  const MatrixXd x = randn(rng, n, p);
  VectorXd y = 0.5 * randn(rng, n);
  for (Index t = 1; t < n; ++t) y(t) += 0.4 * y(t - 1) + 1.5 * x(t - 1, 0) - 1.2 * x(t - 1, 3);
  return make_series(y, x);
}

}  // namespace

TEST(GoSdpca, SingleRoundMatchesGoga) {
  const SeriesMatrix s = toy_panel(1, 150, 20);
  GoSdpcaConfig cfg;
  cfg.M = 1;
  const auto fit = fit_go_sdpca(s, 0, cfg);
  const GroupDesign d = center(build_group_design(s, 0, cfg.q1, cfg.h));
  GogaOptions opt;
  opt.p_total = 20;
  const auto single = goga_hdaic(d, all_groups(d), opt);
  ASSERT_EQ(fit.selection.rounds.size(), 1u);
  EXPECT_EQ(fit.selection.rounds[0].path, single.path);
  EXPECT_EQ(fit.selection.rounds[0].hdaic_path, single.hdaic_path);
  std::vector<Index> sorted = single.selected;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(fit.selection.union_set, sorted);
}

TEST(GoSdpca, SelectsPlantedPredictorsAndMapsColumns) {
  const SeriesMatrix s = toy_panel(2, 200, 30);
  GoSdpcaConfig cfg;
  cfg.r = 1;
  const auto fit = fit_go_sdpca(s, 0, cfg);
  ASSERT_FALSE(fit.degraded_ar);
  // panel columns are offset by the target column
  EXPECT_NE(std::find(fit.selected_columns.begin(), fit.selected_columns.end(), 1), fit.selected_columns.end());
  EXPECT_NE(std::find(fit.selected_columns.begin(), fit.selected_columns.end(), 4), fit.selected_columns.end());
}

TEST(GoSdpca, NoiselessPlantedPipeline) {
  std::mt19937_64 rng(3);
  const Index n = 160, p = 6;
  const VectorXd f = ar1(rng, n, 0.5);
  VectorXd b(p);
  b << 1.0, -0.5, 2.0, 0.7, -1.3, 0.9;
  const MatrixXd x = f * b.transpose();
  VectorXd y = VectorXd::Zero(n);
  y(1) = 0.3;
  for (Index t = 1; t + 1 < n; ++t) y(t + 1) = 0.6 * y(t) + 0.2 * y(t - 1) + f(t);
  const SeriesMatrix s = make_series(y, x);
  GoSdpcaConfig cfg;
  cfg.q2 = 1;
  cfg.r = 1;
  const auto fit = fit_go_sdpca(s.slice_rows(0, n - 1), 0, cfg);
  ASSERT_FALSE(fit.degraded_ar);
  const double pred = predict_go_sdpca(fit, s.slice_rows(0, n - 1));
  EXPECT_LT(std::abs(pred - y(n - 1)), 1e-4);
}

TEST(GoSdpca, PredictionMatchesHandChainedCoefficients) {
  const SeriesMatrix s = toy_panel(4, 140, 5);
  GoSdpcaConfig cfg;
  cfg.r = 2;
  cfg.q3 = 3;
  const auto fit = fit_go_sdpca(s, 0, cfg);
  ASSERT_FALSE(fit.degraded_ar);
  const Index t = s.rows() - 1;
  const auto& sd = fit.sdpca;
  VectorXd xhat(static_cast<Index>(sd.panel.fits.size()));
  for (std::size_t k = 0; k < sd.panel.fits.size(); ++k) {
    const Index col = fit.selected_columns[static_cast<std::size_t>(sd.panel.columns[k])];
    const auto& g = sd.panel.fits[k];
    double v = 0;
    for (Index l = 0; l < g.slopes.size(); ++l) v += g.slopes(l) * (s.values(t - l, col) - g.lag_means(l));
    xhat(static_cast<Index>(k)) = v;
  }
  const VectorXd f = sd.factors.loadings.transpose() * xhat;
  double manual = sd.model.intercept + sd.model.factor_coefficients.dot(f);
  for (Index k = 0; k < 3; ++k) manual += sd.model.ar_coefficients(k) * s.values(t - k, 0);
  EXPECT_NEAR(predict_go_sdpca(fit, s), manual, 1e-10);
}

TEST(GoSdpca, PredictAtLastOriginReproducesInSampleFit) {
  const SeriesMatrix s = toy_panel(5, 150, 15);
  GoSdpcaConfig cfg;
  cfg.r = 2;
  const auto fit = fit_go_sdpca(s, 0, cfg);
  ASSERT_FALSE(fit.degraded_ar);
  const auto& sd = fit.sdpca;
  const Index t = sd.model.last_row;
  const VectorXd f = sd.factors.factors.row(t - sd.factors.first_row).transpose();
  const VectorXd y = s.values.col(0);
  const double in_sample = forecast_one(sd.model, recent_lags(y, t, cfg.q3), f);
  EXPECT_NEAR(predict_go_sdpca(fit, s.slice_rows(0, t + 1)), in_sample, 1e-10);
}

TEST(GoSdpca, DegradedFitIgnoresPredictors) {
  std::mt19937_64 rng(6);
  const Index n = 120;
  const VectorXd y = ar1(rng, n, 0.6);
  const MatrixXd x = randn(rng, n, 10);
  GoSdpcaConfig cfg;
  cfg.C = 1e6;
  const SeriesMatrix s = make_series(y, x);
  const auto fit = fit_go_sdpca(s, 0, cfg);
  ASSERT_TRUE(fit.degraded_ar);
  EXPECT_EQ(fit.r_used, 0);
  EXPECT_TRUE(fit.selected_columns.empty());
  SeriesMatrix perturbed = s;
  perturbed.values.rightCols(10) = randn(rng, n, 10);
  EXPECT_EQ(predict_go_sdpca(fit, s), predict_go_sdpca(fit, perturbed));
}

TEST(GoSdpca, LargePenaltyFallsBackOnNoise) {
  int degraded = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(300 + seed);
    const VectorXd y = randn(rng, 150);
    const MatrixXd x = randn(rng, 150, 50);
    GoSdpcaConfig cfg;
    cfg.C = 10;
    degraded += fit_go_sdpca(make_series(y, x), 0, cfg).degraded_ar;
  }
  EXPECT_GT(degraded, 10);
}

TEST(GoSdpca, Deterministic) {
  const SeriesMatrix s = toy_panel(7, 150, 40);
  GoSdpcaConfig cfg;
  cfg.r = 3;
  const auto a = fit_go_sdpca(s, 0, cfg), b = fit_go_sdpca(s, 0, cfg);
  EXPECT_EQ(a.selection.union_set, b.selection.union_set);
  EXPECT_EQ(a.sdpca.model.ar_coefficients, b.sdpca.model.ar_coefficients);
  EXPECT_EQ(a.sdpca.model.factor_coefficients, b.sdpca.model.factor_coefficients);
  EXPECT_EQ(a.sdpca.model.intercept, b.sdpca.model.intercept);
  EXPECT_EQ(predict_go_sdpca(a, s), predict_go_sdpca(b, s));
}

TEST(GoSdpca, ConfigValidation) {
  GoSdpcaConfig cfg;
  cfg.C = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.M = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.K_n = -1;
  EXPECT_THROW(cfg.validate(), InputError);
  EXPECT_NO_THROW(GoSdpcaConfig{}.validate());
}
