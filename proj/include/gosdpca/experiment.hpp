#pragma once

// JSON-configured experiment runs: Monte Carlo simulation, rolling-window
// forecasting on a CSV panel, and stand-alone DM comparison of stored
// forecasts. Every run writes summary.csv, forecasts.csv, dm.csv and a
// run.json that replays it.

#include <gosdpca/dgp.hpp>
#include <gosdpca/io.hpp>
#include <gosdpca/methods.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gosdpca {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class Mode { simulate, forecast, dm };

std::string to_string(Mode mode);

struct DmInputs {
  std::string a, b;                 // forecasts.csv files
  std::string series_a, series_b;   // optional series filters
};

struct ExperimentConfig {
  Mode mode = Mode::simulate;
  std::optional<DgpConfig> dgp;
  std::optional<DatasetSpec> dataset;
  std::vector<MethodSpec> methods;  // q and r come from the grids
  std::vector<Index> q_grid{2};
  std::vector<Index> r_grid{2};
  Index h = 1;
  Index test_len = 0;
  Index window = 0;  // 0: n - h - test_len
  Index replications = 100;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  std::string reference = "GsP*";
  DmInputs dm;

  void validate() const;  // throws ConfigError
};

/// Non-negative integer seed; throws ConfigError.
std::uint64_t parse_base_seed(const nlohmann::json& v);

/// The "dgp" block of a config; throws ConfigError.
DgpConfig parse_dgp_config(const nlohmann::json& j);

/// Relative dataset/DM paths resolve against base_dir.
ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::string& base_dir = "");
ExperimentConfig load_experiment_config(const std::string& path);

/// Fully explicit configuration, accepted back by parse_experiment_config.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// One (method, q, r) grid point per entry, in config order.
std::vector<MethodSpec> expand_grid(const ExperimentConfig& cfg);

/// "GsP*[q=2;r=10]", "Lasso[q=2]"
std::string series_label(const MethodSpec& spec);

struct RunOutcome {
  std::string output_dir;
  std::vector<std::string> warnings;
};

RunOutcome run_experiment(const ExperimentConfig& cfg);

/// DM comparison of two stored forecast files, paired on (replication, origin).
DmResult compare_forecast_files(const DmInputs& in, Index h);

std::string software_version();

}  // namespace gosdpca
