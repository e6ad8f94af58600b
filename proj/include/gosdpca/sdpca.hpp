#pragma once

// Supervised dynamic PCA: per-predictor h-step regressions produce fitted
// series in target units, PCA on those gives the factors, and a linear
// predictive equation maps target lags plus factors to y_{t+h}.

#include <gosdpca/common.hpp>

#include <string>
#include <vector>

namespace gosdpca {

enum class FactorMethod { sdpca, sw, lyb };
enum class FitMethod { ols, lasso };

std::string to_string(FactorMethod m);
std::string to_string(FitMethod m);
FitMethod fit_method_from_string(const std::string& s);

/// One predictor's regression of y_{t+h} on (1, x_t, ..., x_{t-q2+1}) over
/// origins t = first_origin .. n-1-h. The lag columns are centered over the
/// fit rows, so `intercept` is the mean of the aligned response and the
/// fitted part has mean zero.
struct IntermediateFit {
  VectorXd fitted_part;  // x̂_t over the fit rows
  double intercept = 0;
  VectorXd slopes;       // coefficient on x_{t-k}, k = 0..q2-1
  VectorXd lag_means;    // fit-window mean of the x_{t-k} column
  Index first_origin = 0;

  /// x̂ at origin t of the series `x` (needs x_{t-q2+1..t}).
  double evaluate(const VectorXd& x, Index t) const;
};

/// first_origin < 0 selects the earliest admissible origin, q2 - 1.
IntermediateFit intermediate_prediction(const VectorXd& y, const VectorXd& x, Index q2, Index h,
                                        Index first_origin = -1);

/// BIC lag order in 1..q2_max on rows aligned at q2_max.
Index select_lag_bic(const VectorXd& y, const VectorXd& x, Index h, Index q2_max);

struct IntermediatePanel {
  MatrixXd xhat;                 // fit rows x kept predictors
  VectorXd intercepts;
  std::vector<Index> lags_used;
  std::vector<IntermediateFit> fits;
  std::vector<Index> columns;    // kept predictor -> column of the input block
  Index first_row = 0;           // series row of xhat row 0
  Index last_row = 0;
  std::vector<std::string> warnings;
};

struct IntermediateOptions {
  Index q2 = 2;
  Index h = 1;
  bool bic_lags = false;  // per-predictor BIC in 1..q2 instead of a uniform q2
  Index first_origin = -1;
};

/// Runs intermediate_prediction on every column of `x`; zero-variance
/// columns are dropped and noted in `warnings`.
IntermediatePanel build_intermediate_panel(const VectorXd& y, const MatrixXd& x,
                                           const IntermediateOptions& options);

struct FactorPanel {
  MatrixXd factors;   // rows aligned from series row `first_row`
  MatrixXd loadings;  // predictors x r, orthonormal columns
  VectorXd eigenvalues;
  FactorMethod method = FactorMethod::sdpca;
  Index r = 0;
  Index first_row = 0;
  std::vector<std::string> warnings;
};

/// PCA of the centered fitted parts; factors = xhat * loadings.
FactorPanel extract_sdpca_factors(const IntermediatePanel& panel, Index r);

struct PredictiveModel {
  VectorXd ar_coefficients;      // on y_t, y_{t-1}, ..., y_{t-q3+1}
  VectorXd factor_coefficients;  // on f_t (then f_{t-1}, ... when factor_lags > 1)
  double intercept = 0;
  FitMethod fit_method = FitMethod::ols;
  Index h = 1;
  Index q3 = 1;
  Index factor_lags = 1;
  Index first_row = 0;  // first origin used in the fit
  Index last_row = 0;
};

/// Regresses y_{t+h} on an intercept, q3 target lags and the factors over
/// every origin where all of them are available. `factor_lags` > 1 also
/// includes f_{t-1}, ... (off by default).
PredictiveModel fit_predictive(const VectorXd& y, const FactorPanel& factors, Index q3, Index h,
                               FitMethod fit_method, Index factor_lags = 1);

/// y_recent is ordered most recent first: (y_t, y_{t-1}, ..., y_{t-q3+1}).
/// f_latest stacks f_t then f_{t-1}, ... for factor_lags blocks.
double forecast_one(const PredictiveModel& model, const VectorXd& y_recent,
                    const VectorXd& f_latest);

struct SdpcaConfig {
  Index q2 = 2;
  Index q3 = 2;
  Index h = 1;
  Index r = 2;
  FitMethod fit_method = FitMethod::ols;
  bool bic_lags = false;
  Index factor_lags = 1;
};

/// Complete sdPCA forecaster on a target vector and predictor block.
struct FittedSdpca {
  IntermediatePanel panel;
  FactorPanel factors;
  PredictiveModel model;
  SdpcaConfig config;
  std::vector<std::string> warnings;
};

/// Origin of the first fit row shared by the panel and the predictive equation.
Index sdpca_first_origin(const SdpcaConfig& config);

FittedSdpca fit_sdpca(const VectorXd& y, const MatrixXd& x, const SdpcaConfig& config);

/// Factor vector at origin t, recomputed from stored per-predictor coefficients.
VectorXd sdpca_factor_at(const FittedSdpca& fit, const MatrixXd& x, Index t);

/// Forecast of y_{T+h} where T is the last row of the supplied history.
double predict_sdpca(const FittedSdpca& fit, const VectorXd& y, const MatrixXd& x);

/// (y_t, y_{t-1}, ..., y_{t-q+1})
VectorXd recent_lags(const VectorXd& y, Index t, Index q);

}  // namespace gosdpca
