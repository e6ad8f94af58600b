#include <gosdpca/pipeline.hpp>

namespace gosdpca {

void GoSdpcaConfig::validate() const {
  if (q1 < 1 || q2 < 1 || q3 < 1 || h < 1 || r < 1 || M < 1 || factor_lags < 1)
    throw InputError("GO-sdPCA config: all counts must be at least 1");
  if (K_n < 0) throw InputError("GO-sdPCA config: K_n must be non-negative (0 = default)");
  if (!(C > 0)) throw InputError("GO-sdPCA config: C must be positive");
}

namespace {

MatrixXd take_columns(const MatrixXd& x, const std::vector<Index>& columns) {
  MatrixXd out(x.rows(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) out.col(static_cast<Index>(k)) = x.col(columns[k]);
  return out;
}

}  // namespace

FittedGoSdpca fit_go_sdpca(const SeriesMatrix& series, Index target, const GoSdpcaConfig& config) {
  config.validate();
  const TargetSplit split = split_target(series, target);

  FittedGoSdpca fit;
  fit.config = config;
  fit.target = target;

  const GroupDesign design = center(build_group_design(split.y, split.x, config.q1, config.h));
  GogaOptions options;
  options.max_iterations = config.K_n;
  options.C = config.C;
  options.p_total = std::max<Index>(split.x.cols(), 2);
  options.allow_empty = config.allow_empty;
  fit.selection = peel(design, config.M, options);

  const std::vector<Index>& chosen = fit.selection.union_set;
  for (const Index j : chosen) fit.selected_columns.push_back(split.predictor_columns[static_cast<std::size_t>(j)]);
  fit.degraded_ar = chosen.empty();

  SdpcaConfig sd;
  sd.q2 = config.q2;
  sd.q3 = config.q3;
  sd.h = config.h;
  sd.r = fit.degraded_ar ? 0 : config.r;
  sd.fit_method = config.fit_method;
  sd.bic_lags = config.bic_lags;
  sd.factor_lags = config.factor_lags;
  fit.sdpca = fit_sdpca(split.y, take_columns(split.x, chosen), sd);
  fit.r_used = fit.sdpca.factors.r;
  if (fit.degraded_ar) fit.warnings.push_back("no predictor selected; fitted AR(q3) only");
  fit.warnings.insert(fit.warnings.end(), fit.sdpca.warnings.begin(), fit.sdpca.warnings.end());
  if (fit.r_used == 0 && !fit.degraded_ar) fit.degraded_ar = true;
  return fit;
}

double predict_go_sdpca(const FittedGoSdpca& fit, const SeriesMatrix& series_through_t) {
  if (fit.target >= series_through_t.cols())
    throw InputError("predict_go_sdpca: target column missing from history");
  const VectorXd y = series_through_t.values.col(fit.target);
  const MatrixXd x = take_columns(series_through_t.values, fit.selected_columns);
  return predict_sdpca(fit.sdpca, y, x);
}

}  // namespace gosdpca
