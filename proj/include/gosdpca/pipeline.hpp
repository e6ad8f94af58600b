#pragma once

// GO-sdPCA: lagged group screening with peeling, then sdPCA on the
// selected predictors, then the predictive regression.

#include <gosdpca/common.hpp>
#include <gosdpca/sdpca.hpp>
#include <gosdpca/selection.hpp>

#include <string>
#include <vector>

namespace gosdpca {

struct GoSdpcaConfig {
  Index q1 = 2;
  Index q2 = 2;
  Index q3 = 2;
  Index h = 1;
  Index r = 2;
  Index M = 10;
  Index K_n = 0;  // 0 = default_max_iterations
  double C = 2.0;
  FitMethod fit_method = FitMethod::ols;
  bool bic_lags = false;
  Index factor_lags = 1;
  bool allow_empty = true;  // let HDAIC keep the intercept-only model

  void validate() const;
};

struct FittedGoSdpca {
  PeelResult selection;
  std::vector<Index> selected_columns;  // panel columns of the selected predictors
  FittedSdpca sdpca;                    // fitted on the selected predictors only
  GoSdpcaConfig config;
  Index target = 0;
  Index r_used = 0;
  bool degraded_ar = false;  // nothing selected; pure AR(q3) model
  std::vector<std::string> warnings;
};

FittedGoSdpca fit_go_sdpca(const SeriesMatrix& series, Index target, const GoSdpcaConfig& config);

/// Forecast of y_{t+h}, t being the last row of `series_through_t`.
double predict_go_sdpca(const FittedGoSdpca& fit, const SeriesMatrix& series_through_t);

}  // namespace gosdpca
