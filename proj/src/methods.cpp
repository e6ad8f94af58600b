#include <gosdpca/methods.hpp>

#include <gosdpca/baselines.hpp>

#include <algorithm>
#include <cstdio>

namespace gosdpca {

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::gsp_star: return "GsP*";
    case MethodKind::gsp: return "GsP";
    case MethodKind::sdpca: return "sdPCA";
    case MethodKind::sw: return "SW";
    case MethodKind::lyb: return "LYB";
    case MethodKind::lasso: return "Lasso";
    case MethodKind::ar: return "AR";
    case MethodKind::naive: return "Naive";
  }
  return "?";
}

MethodKind method_kind_from_string(const std::string& name) {
  for (const auto k : {MethodKind::gsp_star, MethodKind::gsp, MethodKind::sdpca, MethodKind::sw,
                       MethodKind::lyb, MethodKind::lasso, MethodKind::ar, MethodKind::naive}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown method '" + name + "'");
}

bool uses_factors(MethodKind kind) {
  return kind == MethodKind::gsp_star || kind == MethodKind::gsp || kind == MethodKind::sdpca ||
         kind == MethodKind::sw || kind == MethodKind::lyb;
}

std::string MethodSpec::canonical() const {
  char buf[512];
  std::snprintf(buf, sizeof buf, "kind=%s;q=%ld;h=%ld", to_string(kind).c_str(),
                static_cast<long>(q), static_cast<long>(h));
  std::string out = buf;
  if (uses_factors(kind)) out += ";r=" + std::to_string(r);
  if (kind == MethodKind::gsp_star || kind == MethodKind::gsp) {
    std::snprintf(buf, sizeof buf, ";q1=%ld;M=%ld;K_n=%ld;C=%.17g;allow_empty=%d",
                  static_cast<long>(q1), static_cast<long>(kind == MethodKind::gsp ? 1 : M),
                  static_cast<long>(K_n), C, allow_empty ? 1 : 0);
    out += buf;
  }
  if (kind == MethodKind::gsp_star || kind == MethodKind::gsp || kind == MethodKind::sdpca)
    out += ";fit=" + to_string(fit_method) + ";bic_lags=" + (bic_lags ? "1" : "0");
  if (kind == MethodKind::lasso) out += ";path_len=" + std::to_string(path_len);
  return out;
}

namespace {

double factor_forecast(const VectorXd& y, const FactorPanel& f, Index q, Index h) {
  const PredictiveModel model = fit_predictive(y, f, q, h, FitMethod::ols);
  const Index t = y.size() - 1;
  VectorXd latest(f.factors.cols());
  if (latest.size() > 0) latest = f.factors.row(t - f.first_row).transpose();
  return forecast_one(model, recent_lags(y, t, q), latest);
}

}  // namespace

double forecast_with(const MethodSpec& spec, const SeriesMatrix& history, Index target) {
  const Index h = spec.h;
  switch (spec.kind) {
    case MethodKind::gsp_star:
    case MethodKind::gsp: {
      GoSdpcaConfig c;
      c.q1 = spec.q1;
      c.q2 = spec.q;
      c.q3 = spec.q;
      c.h = h;
      c.r = spec.r;
      c.M = spec.kind == MethodKind::gsp ? 1 : spec.M;
      c.K_n = spec.K_n;
      c.C = spec.C;
      c.fit_method = spec.fit_method;
      c.bic_lags = spec.bic_lags;
      c.allow_empty = spec.allow_empty;
      return predict_go_sdpca(fit_go_sdpca(history, target, c), history);
    }
    default:
      break;
  }

  const TargetSplit split = split_target(history, target);
  const VectorXd& y = split.y;
  const MatrixXd& x = split.x;
  const Index n = y.size();
  switch (spec.kind) {
    case MethodKind::sdpca: {
      SdpcaConfig c;
      c.q2 = spec.q;
      c.q3 = spec.q;
      c.h = h;
      c.r = spec.r;
      c.fit_method = spec.fit_method;
      c.bic_lags = spec.bic_lags;
      return predict_sdpca(fit_sdpca(y, x, c), y, x);
    }
    case MethodKind::sw:
      return factor_forecast(y, sw_factors(x, spec.r), spec.q, h);
    case MethodKind::lyb:
      return factor_forecast(y, lyb_factors(x, spec.q, spec.r), spec.q, h);
    case MethodKind::ar: {
      FactorPanel none;
      none.factors.resize(n, 0);
      return factor_forecast(y, none, spec.q, h);
    }
    case MethodKind::naive:
      return y(n - 1);
    case MethodKind::lasso: {
      const Index first = spec.q - 1, last = n - 1 - h;
      if (last - first + 1 < 2) throw InputError("Lasso: window too short for q and h");
      const MatrixXd design = lagged_design(y, x, spec.q, first, n - 1);
      const Index rows = last - first + 1;
      const LassoFit fit = lasso_bic(design.topRows(rows), y.segment(first + h, rows), spec.path_len);
      return fit.intercept + design.row(design.rows() - 1).dot(fit.coefficients);
    }
    default:
      break;
  }
  throw InputError("forecast_with: unsupported method");
}

Forecaster make_forecaster(const MethodSpec& spec) {
  Forecaster f;
  f.name = spec.name();
  f.config_digest = spec.digest();
  f.forecast = [spec](const SeriesMatrix& history, Index target, Index h) {
    if (h != spec.h) throw InputError("forecaster built for h=" + std::to_string(spec.h));
    return forecast_with(spec, history, target);
  };
  return f;
}

McMethod make_mc_method(const MethodSpec& spec) {
  if (spec.h != 1) throw InputError("Monte Carlo methods forecast one step ahead (h = 1)");
  McMethod m;
  m.name = spec.name();
  m.forecast = [spec](const GeneratedPanel& panel) {
    return forecast_with(spec, panel.series.slice_rows(0, panel.series.rows() - 1), 0);
  };
  return m;
}

}  // namespace gosdpca
