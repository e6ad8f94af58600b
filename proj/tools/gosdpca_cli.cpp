// gosdpca: command-line driver.
//
//   gosdpca simulate   --config cfg.json [--out dir]
//   gosdpca forecast   --config cfg.json [--out dir]
//   gosdpca dm         --a f1.csv --b f2.csv --h 1 [--series-a L] [--series-b L] [--out dir]
//   gosdpca export-dgp --config cfg.json --out panel.csv [--replication i]
//
// Exit status: 0 success, 2 configuration error, 3 runtime error.

#include <gosdpca/experiment.hpp>

#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace gosdpca;

int report(const char* kind, const std::string& message, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

void run_mode(const std::string& config, const std::string& out, Mode expected) {
  ExperimentConfig cfg = load_experiment_config(config);
  if (cfg.mode != expected)
    throw ConfigError("config mode is '" + to_string(cfg.mode) + "' but the subcommand is '" +
                      to_string(expected) + "'");
  if (!out.empty()) cfg.output_dir = out;
  const RunOutcome outcome = run_experiment(cfg);
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << outcome.output_dir << '\n';
}

void export_dgp(const std::string& config, const std::string& out, Index replication) {
  const nlohmann::json j = read_json(config);
  if (!j.is_object() || !j.contains("dgp")) throw ConfigError("export-dgp needs a config with a 'dgp' block");
  DgpConfig g = parse_dgp_config(j.at("dgp"));
  std::uint64_t base = 1;
  if (j.contains("base_seed")) base = parse_base_seed(j.at("base_seed"));
  if (replication < 0) throw ConfigError("--replication must be non-negative");
  g.seed = derive_seed(base, static_cast<std::uint64_t>(replication));
  const GeneratedPanel panel = generate(g);
  write_series_csv(out, panel.series, "t");
  std::cout << "wrote " << out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GO-sdPCA forecasting experiments"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  std::string config, out, file_a, file_b, series_a, series_b;
  Index h = 1, replication = 0;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study on a simulated design");
  sim->add_option("--config", config, "experiment JSON")->required();
  sim->add_option("--out", out, "output directory (overrides output_dir)");

  auto* fc = app.add_subcommand("forecast", "rolling-window forecasts on a CSV panel");
  fc->add_option("--config", config, "experiment JSON")->required();
  fc->add_option("--out", out, "output directory (overrides output_dir)");

  auto* dm = app.add_subcommand("dm", "Diebold-Mariano test on two forecast files");
  dm->add_option("--a", file_a, "forecasts.csv of method a")->required();
  dm->add_option("--b", file_b, "forecasts.csv of method b")->required();
  dm->set_help_flag("--help", "Print this help message and exit");
  dm->add_option("--h", h, "forecast horizon")->required();
  dm->add_option("--series-a", series_a, "series label to take from --a");
  dm->add_option("--series-b", series_b, "series label to take from --b");
  dm->add_option("--out", out, "write dm.csv and run.json here instead of printing");

  auto* ex = app.add_subcommand("export-dgp", "write one simulated panel as CSV");
  ex->add_option("--config", config, "JSON with a 'dgp' block and optional base_seed")->required();
  ex->add_option("--out", out, "CSV path")->required();
  ex->add_option("--replication", replication, "replication index (seed derivation)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) run_mode(config, out, Mode::simulate);
    if (*fc) run_mode(config, out, Mode::forecast);
    if (*ex) export_dgp(config, out, replication);
    if (*dm) {
      ExperimentConfig cfg;
      cfg.mode = Mode::dm;
      cfg.h = h;
      cfg.dm = {file_a, file_b, series_a, series_b};
      cfg.validate();
      if (out.empty()) {
        const DmResult r = compare_forecast_files(cfg.dm, h);
        std::cout << "statistic,p_value,n_forecasts,horizon,degenerate\n"
                  << format_double(r.statistic) << ',' << format_double(r.p_value) << ','
                  << r.n_forecasts << ',' << r.horizon << ',' << (r.degenerate ? 1 : 0) << '\n';
      } else {
        cfg.output_dir = out;
        run_experiment(cfg);
        std::cout << "wrote " << out << '\n';
      }
    }
  } catch (const ConfigError& e) {
    return report("config", e.what(), 2);
  } catch (const std::exception& e) {
    return report("runtime", e.what(), 3);
  }
  return 0;
}
