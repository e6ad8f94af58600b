#pragma once

// Method registry: maps a method specification (kind plus hyperparameters)
// to a Forecaster usable by the rolling and Monte Carlo drivers.

#include <gosdpca/evaluation.hpp>
#include <gosdpca/pipeline.hpp>

#include <string>

namespace gosdpca {

enum class MethodKind { gsp_star, gsp, sdpca, sw, lyb, lasso, ar, naive };

/// Display names: GsP*, GsP, sdPCA, SW, LYB, Lasso, AR, Naive.
std::string to_string(MethodKind kind);
MethodKind method_kind_from_string(const std::string& name);

/// Whether the method takes a factor count r.
bool uses_factors(MethodKind kind);

struct MethodSpec {
  MethodKind kind = MethodKind::gsp_star;
  std::string label;  // defaults to the display name
  Index q = 2;        // lag order shared by every method
  Index r = 2;
  Index h = 1;
  // GO-sdPCA / sdPCA extras
  Index q1 = 2;
  Index M = 10;       // GsP always uses one round
  Index K_n = 0;
  double C = 2.0;
  FitMethod fit_method = FitMethod::ols;
  bool bic_lags = false;
  bool allow_empty = true;
  // Lasso
  Index path_len = 100;

  std::string name() const { return label.empty() ? to_string(kind) : label; }
  /// Canonical key=value rendering of every field that affects forecasts.
  std::string canonical() const;
  std::string digest() const { return fnv1a_hex(canonical()); }
};

/// Forecast of y_{t+h} from a window whose last row is t.
double forecast_with(const MethodSpec& spec, const SeriesMatrix& history, Index target);

Forecaster make_forecaster(const MethodSpec& spec);

/// Monte Carlo wrapper: fits on rows 0..n-1 of the panel (target column 0)
/// and forecasts row n. Requires h = 1.
McMethod make_mc_method(const MethodSpec& spec);

}  // namespace gosdpca
