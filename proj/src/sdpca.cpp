#include <gosdpca/sdpca.hpp>

#include <gosdpca/baselines.hpp>
#include <gosdpca/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gosdpca {

std::string to_string(FactorMethod m) {
  switch (m) {
    case FactorMethod::sdpca: return "sdpca";
    case FactorMethod::sw: return "sw";
    case FactorMethod::lyb: return "lyb";
  }
  return "unknown";
}

std::string to_string(FitMethod m) { return m == FitMethod::ols ? "ols" : "lasso"; }

FitMethod fit_method_from_string(const std::string& s) {
  if (s == "ols") return FitMethod::ols;
  if (s == "lasso") return FitMethod::lasso;
  throw InputError("unknown fit method '" + s + "' (expected ols or lasso)");
}

VectorXd recent_lags(const VectorXd& y, Index t, Index q) {
  if (t - q + 1 < 0 || t >= y.size()) throw InputError("recent_lags: not enough history");
  VectorXd out(q);
  for (Index k = 0; k < q; ++k) out(k) = y(t - k);
  return out;
}

double IntermediateFit::evaluate(const VectorXd& x, Index t) const {
  const Index q2 = slopes.size();
  if (t - q2 + 1 < 0 || t >= x.size()) throw InputError("intermediate fit: missing history");
  double value = 0;
  for (Index k = 0; k < q2; ++k) value += slopes(k) * (x(t - k) - lag_means(k));
  return value;
}

namespace {

struct LagRegression {
  IntermediateFit fit;
  double rss = 0;
};

LagRegression regress_on_lags(const VectorXd& y, const VectorXd& x, Index q2, Index h,
                              Index first_origin) {
  const Index n = y.size();
  if (x.size() != n) throw InputError("intermediate_prediction: series lengths differ");
  if (q2 < 1) throw InputError("intermediate_prediction: q2 must be at least 1");
  if (h < 1) throw InputError("intermediate_prediction: h must be at least 1");
  if (first_origin < q2 - 1)
    throw InputError("intermediate_prediction: first origin precedes the lag window");
  const Index last = n - 1 - h;
  const Index count = last - first_origin + 1;
  if (count < q2 + h + 5)
    throw InputError("intermediate_prediction: insufficient rows (" + std::to_string(count) +
                     " usable, need " + std::to_string(q2 + h + 5) + ")");

  MatrixXd lags(count, q2);
  for (Index k = 0; k < q2; ++k) lags.col(k) = x.segment(first_origin - k, count);
  const VectorXd means = lags.colwise().mean().transpose();
  MatrixXd centered = lags.rowwise() - means.transpose();
  for (Index k = 0; k < q2; ++k) {
    const double scale = lags.col(k).cwiseAbs().maxCoeff();
    if (centered.col(k).cwiseAbs().maxCoeff() <= 1e-12 * scale) centered.col(k).setZero();
  }
  const VectorXd response = y.segment(first_origin + h, count);
  const double ybar = response.mean();
  const VectorXd yc = response.array() - ybar;

  const auto ls = least_squares(centered, yc);
  LagRegression out;
  out.fit.slopes = ls.coefficients;
  out.fit.lag_means = means;
  out.fit.fitted_part = ls.fitted;
  out.fit.intercept = ybar;
  out.fit.first_origin = first_origin;
  out.rss = accurate_squared_norm(ls.residuals);
  return out;
}

bool zero_variance(const VectorXd& v) {
  if (v.size() == 0) return true;
  const double mean = v.mean();
  const double spread = (v.array() - mean).abs().maxCoeff();
  return spread <= 1e-12 * std::max(1.0, std::abs(mean));
}

}  // namespace

IntermediateFit intermediate_prediction(const VectorXd& y, const VectorXd& x, Index q2, Index h,
                                        Index first_origin) {
  return regress_on_lags(y, x, q2, h, first_origin < 0 ? q2 - 1 : first_origin).fit;
}

Index select_lag_bic(const VectorXd& y, const VectorXd& x, Index h, Index q2_max) {
  if (q2_max < 1) throw InputError("select_lag_bic: q2_max must be at least 1");
  const Index first = q2_max - 1;
  Index best_q = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Index q = 1; q <= q2_max; ++q) {
    const auto reg = regress_on_lags(y, x, q, h, first);
    const auto n_a = static_cast<double>(reg.fit.fitted_part.size());
    const double rss = std::max(reg.rss, std::numeric_limits<double>::min());
    const double bic = n_a * std::log(rss / n_a) + static_cast<double>(q + 1) * std::log(n_a);
    if (bic < best) {
      best = bic;
      best_q = q;
    }
  }
  return best_q;
}

IntermediatePanel build_intermediate_panel(const VectorXd& y, const MatrixXd& x,
                                           const IntermediateOptions& options) {
  if (x.rows() != y.size()) throw InputError("build_intermediate_panel: row mismatch");
  const Index first = options.first_origin < 0 ? options.q2 - 1 : options.first_origin;
  const Index last = y.size() - 1 - options.h;
  if (last < first) throw InputError("build_intermediate_panel: insufficient rows");

  IntermediatePanel panel;
  panel.first_row = first;
  panel.last_row = last;
  const Index window_start = first - options.q2 + 1;
  for (Index j = 0; j < x.cols(); ++j) {
    const VectorXd col = x.col(j);
    if (zero_variance(col.segment(window_start, last - window_start + 1))) {
      panel.warnings.push_back("predictor " + std::to_string(j) +
                               " has zero variance over the window; dropped");
      continue;
    }
    const Index q = options.bic_lags ? select_lag_bic(y, col, options.h, options.q2) : options.q2;
    panel.fits.push_back(intermediate_prediction(y, col, q, options.h, first));
    panel.lags_used.push_back(q);
    panel.columns.push_back(j);
  }

  const Index rows = last - first + 1;
  panel.xhat.resize(rows, static_cast<Index>(panel.fits.size()));
  panel.intercepts.resize(static_cast<Index>(panel.fits.size()));
  for (std::size_t k = 0; k < panel.fits.size(); ++k) {
    panel.xhat.col(static_cast<Index>(k)) = panel.fits[k].fitted_part;
    panel.intercepts(static_cast<Index>(k)) = panel.fits[k].intercept;
  }
  return panel;
}

FactorPanel extract_sdpca_factors(const IntermediatePanel& panel, Index r) {
  const Index rows = panel.xhat.rows(), cols = panel.xhat.cols();
  if (r < 0 || r > std::min(rows, cols))
    throw InputError("extract_sdpca_factors: r=" + std::to_string(r) + " exceeds min(" +
                     std::to_string(rows) + ", " + std::to_string(cols) + ")");
  FactorPanel out;
  out.method = FactorMethod::sdpca;
  out.r = r;
  out.first_row = panel.first_row;
  if (r == 0) {
    out.factors.resize(rows, 0);
    out.loadings.resize(cols, 0);
    out.eigenvalues.resize(0);
    return out;
  }
  const auto axes = principal_axes(panel.xhat, r);
  out.loadings = axes.loadings;
  out.eigenvalues = axes.values;
  out.factors = panel.xhat * out.loadings;
  return out;
}

PredictiveModel fit_predictive(const VectorXd& y, const FactorPanel& factors, Index q3, Index h,
                               FitMethod fit_method, Index factor_lags) {
  if (q3 < 1) throw InputError("fit_predictive: q3 must be at least 1");
  if (h < 1) throw InputError("fit_predictive: h must be at least 1");
  if (factor_lags < 1) throw InputError("fit_predictive: factor_lags must be at least 1");
  const Index n = y.size();
  const Index r = factors.factors.cols();
  const Index first = std::max(factors.first_row + factor_lags - 1, q3 - 1);
  const Index last = std::min(factors.first_row + factors.factors.rows() - 1, n - 1 - h);
  const Index count = last - first + 1;
  const Index width = q3 + r * factor_lags;
  if (count < q3 + r + 5)
    throw InputError("fit_predictive: insufficient rows (" + std::to_string(std::max<Index>(count, 0)) +
                     " aligned, need " + std::to_string(q3 + r + 5) + ")");

  MatrixXd design(count, width);
  VectorXd response(count);
  for (Index i = 0; i < count; ++i) {
    const Index t = first + i;
    for (Index k = 0; k < q3; ++k) design(i, k) = y(t - k);
    for (Index l = 0; l < factor_lags; ++l)
      design.row(i).segment(q3 + l * r, r) = factors.factors.row(t - l - factors.first_row);
    response(i) = y(t + h);
  }

  PredictiveModel model;
  model.fit_method = fit_method;
  model.h = h;
  model.q3 = q3;
  model.factor_lags = factor_lags;
  model.first_row = first;
  model.last_row = last;

  VectorXd coef;
  if (fit_method == FitMethod::ols) {
    MatrixXd with_intercept(count, width + 1);
    with_intercept << VectorXd::Ones(count), design;
    const auto ls = least_squares(with_intercept, response);
    model.intercept = ls.coefficients(0);
    coef = ls.coefficients.tail(width);
  } else {
    const auto lasso = lasso_bic(design, response);
    model.intercept = lasso.intercept;
    coef = lasso.coefficients;
  }
  model.ar_coefficients = coef.head(q3);
  model.factor_coefficients = coef.tail(r * factor_lags);
  return model;
}

double forecast_one(const PredictiveModel& model, const VectorXd& y_recent,
                    const VectorXd& f_latest) {
  if (y_recent.size() != model.ar_coefficients.size())
    throw InputError("forecast_one: expected " + std::to_string(model.ar_coefficients.size()) +
                     " target lags, got " + std::to_string(y_recent.size()));
  if (f_latest.size() != model.factor_coefficients.size())
    throw InputError("forecast_one: expected " +
                     std::to_string(model.factor_coefficients.size()) +
                     " factor values, got " + std::to_string(f_latest.size()));
  return model.intercept + model.ar_coefficients.dot(y_recent) +
         model.factor_coefficients.dot(f_latest);
}

Index sdpca_first_origin(const SdpcaConfig& config) {
  return std::max(config.q2, config.q3) - 1;
}

FittedSdpca fit_sdpca(const VectorXd& y, const MatrixXd& x, const SdpcaConfig& config) {
  if (config.r < 0) throw InputError("fit_sdpca: r must be non-negative");
  FittedSdpca fit;
  fit.config = config;
  fit.panel = build_intermediate_panel(
      y, x, {config.q2, config.h, config.bic_lags, sdpca_first_origin(config)});
  fit.warnings = fit.panel.warnings;

  const Index r = std::min({config.r, fit.panel.xhat.cols(), fit.panel.xhat.rows()});
  if (r < config.r)
    fit.warnings.push_back("factor count clipped from " + std::to_string(config.r) + " to " +
                           std::to_string(r));
  fit.factors = extract_sdpca_factors(fit.panel, r);
  fit.model = fit_predictive(y, fit.factors, config.q3, config.h, config.fit_method,
                             config.factor_lags);
  return fit;
}

VectorXd sdpca_factor_at(const FittedSdpca& fit, const MatrixXd& x, Index t) {
  const auto kept = static_cast<Index>(fit.panel.fits.size());
  VectorXd xhat(kept);
  for (Index k = 0; k < kept; ++k) {
    const Index col = fit.panel.columns[static_cast<std::size_t>(k)];
    if (col >= x.cols()) throw InputError("sdpca: predictor block is missing columns");
    xhat(k) = fit.panel.fits[static_cast<std::size_t>(k)].evaluate(x.col(col), t);
  }
  return fit.factors.loadings.transpose() * xhat;
}

double predict_sdpca(const FittedSdpca& fit, const VectorXd& y, const MatrixXd& x) {
  if (x.rows() != y.size()) throw InputError("predict_sdpca: row mismatch");
  const Index t = y.size() - 1;
  const Index r = fit.factors.loadings.cols();
  const Index lags = fit.model.factor_lags;
  VectorXd f(r * lags);
  for (Index l = 0; l < lags; ++l) f.segment(l * r, r) = sdpca_factor_at(fit, x, t - l);
  return forecast_one(fit.model, recent_lags(y, t, fit.model.q3), f);
}

}  // namespace gosdpca
