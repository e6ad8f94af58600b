#pragma once

// Rolling-window forecasting, RMSFE, the Diebold-Mariano test and the
// Monte Carlo driver for the simulation designs.

#include <gosdpca/common.hpp>
#include <gosdpca/dgp.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gosdpca {

struct ForecastRecord {
  Index origin = 0;  // row t of the forecast origin
  Index horizon = 1;
  double predicted = 0;
  double realized = 0;
  std::string method;
  std::string config_digest;
};

/// A named forecaster: given the history (rows 0..t) and the target
/// column it returns the forecast of y_{t+h}.
struct Forecaster {
  std::string name;
  std::string config_digest;
  std::function<double(const SeriesMatrix& history, Index target, Index h)> forecast;
};

/// A per-window fit failed; carries the origin that triggered it.
class ForecastError : public std::runtime_error {
 public:
  ForecastError(const std::string& what, Index origin)
      : std::runtime_error(what), origin_(origin) {}
  Index origin() const noexcept { return origin_; }

 private:
  Index origin_;
};

/// One record per origin t = n-h-test_len .. n-1-h, each refitted on rows
/// t-window+1 .. t.
std::vector<ForecastRecord> rolling_forecast(const SeriesMatrix& series, Index target,
                                             const Forecaster& method, Index window, Index h,
                                             Index test_len);

double rmsfe(const std::vector<ForecastRecord>& records);
double rmsfe(const VectorXd& errors);

struct DmResult {
  double statistic = 0;
  double p_value = 0.5;
  Index n_forecasts = 0;
  Index horizon = 1;
  bool degenerate = false;  // variance floored, or a constant differential
};

/// One-sided test of "a is more accurate than b" under squared-error loss,
/// with the Harvey-Leybourne-Newbold small-sample correction.
DmResult dm_test(const VectorXd& errors_a, const VectorXd& errors_b, Index h);

/// Monte Carlo forecaster: sees the panel, must forecast row n of column 0
/// from rows 0..n-1 only (the truth record is there for oracle methods).
struct McMethod {
  std::string name;
  std::function<double(const GeneratedPanel& panel)> forecast;
};

struct McMethodSummary {
  std::string name;
  double rmsfe = 0;
  double mc_stderr = 0;
  double mean_abs_error = 0;  // replication average of |error|
  Index used = 0;
  Index failures = 0;
  std::vector<double> predicted;  // NaN where the replication failed
  std::vector<double> realized;
  std::vector<std::string> failure_messages;
};

struct McStudy {
  std::vector<std::uint64_t> seeds;
  std::vector<McMethodSummary> methods;
};

/// Replication i uses seed derive_seed(base_seed, i); the template's own
/// seed is ignored.
McStudy monte_carlo_study(const DgpConfig& tmpl, const std::vector<McMethod>& methods,
                          Index replications, std::uint64_t base_seed);

/// sqrt(mean) of squared errors and its delta-method standard error.
void summarize_squared_errors(const std::vector<double>& sq, double& root_mean, double& stderr_out);

/// Thread count from GOSDPCA_THREADS, else the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on worker_count() threads.
/// Exceptions are rethrown for the lowest failing index.
void parallel_for(Index count, const std::function<void(Index)>& body);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace gosdpca
