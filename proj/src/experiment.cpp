#include <gosdpca/experiment.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gosdpca {

using nlohmann::json;
namespace fs = std::filesystem;

std::string software_version() { return GOSDPCA_VERSION; }

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::simulate: return "simulate";
    case Mode::forecast: return "forecast";
    case Mode::dm: return "dm";
  }
  return "?";
}

namespace {

Mode mode_from_string(const std::string& s) {
  if (s == "simulate") return Mode::simulate;
  if (s == "forecast") return Mode::forecast;
  if (s == "dm") return Mode::dm;
  throw ConfigError("mode must be simulate, forecast or dm, got '" + s + "'");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

Index get_index(const json& obj, const std::string& key, Index fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<Index>();
}

double get_double(const json& obj, const std::string& key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<Index> get_grid(const json& obj, const std::string& key, std::vector<Index> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  std::vector<Index> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<Index>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError("grid '" + key + "' must hold integers");
      out.push_back(e.get<Index>());
    }
  } else {
    throw ConfigError("grid '" + key + "' must be an integer or an array of integers");
  }
  return out;
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return fs::absolute(p).lexically_normal().string();
}

MethodSpec parse_method(const json& m) {
  MethodSpec spec;
  if (m.is_string()) {
    spec.kind = method_kind_from_string(m.get<std::string>());
    return spec;
  }
  const std::string where = "methods[]";
  check_keys(m, {"name", "label", "q1", "M", "K_n", "C", "fit_method", "bic_lags", "allow_empty", "path_len"},
             where);
  if (!m.contains("name")) throw ConfigError("methods[]: missing 'name'");
  spec.kind = method_kind_from_string(get_string(m, "name", "", where));
  spec.label = get_string(m, "label", "", where);
  spec.q1 = get_index(m, "q1", spec.q1, where);
  spec.M = get_index(m, "M", spec.M, where);
  spec.K_n = get_index(m, "K_n", spec.K_n, where);
  spec.C = get_double(m, "C", spec.C, where);
  spec.fit_method = fit_method_from_string(get_string(m, "fit_method", to_string(spec.fit_method), where));
  spec.bic_lags = get_bool(m, "bic_lags", spec.bic_lags, where);
  spec.allow_empty = get_bool(m, "allow_empty", spec.allow_empty, where);
  spec.path_len = get_index(m, "path_len", spec.path_len, where);
  return spec;
}

json method_to_json(const MethodSpec& s) {
  json m;
  m["name"] = to_string(s.kind);
  if (!s.label.empty()) m["label"] = s.label;
  if (s.kind == MethodKind::gsp_star || s.kind == MethodKind::gsp) {
    m["q1"] = s.q1;
    m["M"] = s.M;
    m["K_n"] = s.K_n;
    m["C"] = s.C;
    m["allow_empty"] = s.allow_empty;
  }
  if (s.kind == MethodKind::gsp_star || s.kind == MethodKind::gsp || s.kind == MethodKind::sdpca) {
    m["fit_method"] = to_string(s.fit_method);
    m["bic_lags"] = s.bic_lags;
  }
  if (s.kind == MethodKind::lasso) m["path_len"] = s.path_len;
  return m;
}

std::string fmt(double v) { return std::isfinite(v) || std::isinf(v) ? format_double(v) : "NA"; }

std::string r_cell(const MethodSpec& s) { return uses_factors(s.kind) ? std::to_string(s.r) : "NA"; }

struct DmRow {
  std::string a, b;
  DmResult result;
  bool valid = false;
};

std::string dm_csv(const std::vector<DmRow>& rows) {
  std::ostringstream os;
  os << "series_a,series_b,horizon,n_forecasts,statistic,p_value,degenerate\n";
  for (const auto& row : rows) {
    os << row.a << ',' << row.b << ',';
    if (!row.valid) {
      os << "NA,NA,NA,NA,NA\n";
      continue;
    }
    os << row.result.horizon << ',' << row.result.n_forecasts << ',' << fmt(row.result.statistic) << ','
       << fmt(row.result.p_value) << ',' << (row.result.degenerate ? 1 : 0) << '\n';
  }
  return os.str();
}

const char* kForecastHeader =
    "series,method,q,r,config_digest,replication,seed,origin,origin_label,horizon,predicted,realized\n";

// Index of the reference grid point with the lowest RMSFE, or -1.
Index best_reference(const std::vector<MethodSpec>& specs, const std::vector<double>& scores,
                     const std::string& reference) {
  Index best = -1;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].name() != reference || !std::isfinite(scores[i])) continue;
    if (best < 0 || scores[i] < scores[static_cast<std::size_t>(best)]) best = static_cast<Index>(i);
  }
  return best;
}

void write_run_json(const ExperimentConfig& cfg, const json& extra) {
  json j = to_json(cfg);
  j["software_version"] = software_version();
  if (!extra.is_null()) j["provenance"] = extra;
  write_text_file((fs::path(cfg.output_dir) / "run.json").string(), j.dump(2) + "\n");
}

RunOutcome run_simulate(const ExperimentConfig& cfg) {
  RunOutcome outcome;
  outcome.output_dir = cfg.output_dir;
  const auto specs = expand_grid(cfg);
  std::vector<McMethod> mc;
  for (const auto& s : specs) mc.push_back(make_mc_method(s));
  const McStudy study = monte_carlo_study(*cfg.dgp, mc, cfg.replications, cfg.base_seed);

  std::ostringstream summary, forecasts;
  summary << "method,q,r,rmsfe,mc_stderr,replications,failures,mean_abs_error\n";
  forecasts << kForecastHeader;
  std::vector<double> scores;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    const auto& m = study.methods[k];
    scores.push_back(m.rmsfe);
    summary << s.name() << ',' << s.q << ',' << r_cell(s) << ',' << fmt(m.rmsfe) << ','
            << fmt(m.mc_stderr) << ',' << m.used << ',' << m.failures << ',' << fmt(m.mean_abs_error) << '\n';
    for (const auto& msg : m.failure_messages) outcome.warnings.push_back(series_label(s) + " " + msg);
    const std::string label = series_label(s), digest = s.digest();
    for (std::size_t i = 0; i < m.predicted.size(); ++i) {
      if (std::isnan(m.predicted[i])) continue;
      forecasts << label << ',' << s.name() << ',' << s.q << ',' << r_cell(s) << ',' << digest << ','
                << i << ',' << study.seeds[i] << ',' << cfg.dgp->n - 1 << ",," << cfg.h << ','
                << fmt(m.predicted[i]) << ',' << fmt(m.realized[i]) << '\n';
    }
  }

  std::vector<DmRow> dm_rows;
  const Index ref = best_reference(specs, scores, cfg.reference);
  if (ref >= 0) {
    const auto& a = study.methods[static_cast<std::size_t>(ref)];
    for (std::size_t k = 0; k < specs.size(); ++k) {
      if (static_cast<Index>(k) == ref) continue;
      const auto& b = study.methods[k];
      std::vector<double> ea, eb;
      for (std::size_t i = 0; i < a.predicted.size(); ++i) {
        if (std::isnan(a.predicted[i]) || std::isnan(b.predicted[i])) continue;
        ea.push_back(a.predicted[i] - a.realized[i]);
        eb.push_back(b.predicted[i] - b.realized[i]);
      }
      DmRow row{series_label(specs[static_cast<std::size_t>(ref)]), series_label(specs[k]), {}, false};
      if (ea.size() >= 8) {
        row.result = dm_test(Eigen::Map<VectorXd>(ea.data(), static_cast<Index>(ea.size())),
                             Eigen::Map<VectorXd>(eb.data(), static_cast<Index>(eb.size())), cfg.h);
        row.valid = true;
      }
      dm_rows.push_back(row);
    }
  }

  const fs::path dir(cfg.output_dir);
  write_text_file((dir / "summary.csv").string(), summary.str());
  write_text_file((dir / "forecasts.csv").string(), forecasts.str());
  write_text_file((dir / "dm.csv").string(), dm_csv(dm_rows));
  write_run_json(cfg, json());
  return outcome;
}

RunOutcome run_forecast(const ExperimentConfig& cfg) {
  RunOutcome outcome;
  outcome.output_dir = cfg.output_dir;
  const LoadedDataset data = load_csv(*cfg.dataset);
  const Index n = data.series.rows();
  const Index window = cfg.window > 0 ? cfg.window : n - cfg.h - cfg.test_len;
  if (window < 1 || window + cfg.h + cfg.test_len > n)
    throw ConfigError("window " + std::to_string(window) + " + h + test_len exceeds the " +
                      std::to_string(n) + " usable rows");

  const auto specs = expand_grid(cfg);
  std::vector<std::vector<ForecastRecord>> runs;
  for (const auto& s : specs)
    runs.push_back(rolling_forecast(data.series, data.target, make_forecaster(s), window, cfg.h, cfg.test_len));

  std::ostringstream summary, forecasts;
  summary << "method,q,r,rmsfe,n_windows\n";
  forecasts << kForecastHeader;
  std::vector<double> scores;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    scores.push_back(rmsfe(runs[k]));
    summary << s.name() << ',' << s.q << ',' << r_cell(s) << ',' << fmt(scores.back()) << ','
            << runs[k].size() << '\n';
    const std::string label = series_label(s);
    for (const auto& rec : runs[k]) {
      forecasts << label << ',' << s.name() << ',' << s.q << ',' << r_cell(s) << ',' << rec.config_digest
                << ",0,0," << rec.origin << ',' << data.series.index[static_cast<std::size_t>(rec.origin)]
                << ',' << rec.horizon << ',' << fmt(rec.predicted) << ',' << fmt(rec.realized) << '\n';
    }
  }

  std::vector<DmRow> dm_rows;
  const Index ref = best_reference(specs, scores, cfg.reference);
  if (ref >= 0) {
    auto errors = [](const std::vector<ForecastRecord>& recs) {
      VectorXd e(static_cast<Index>(recs.size()));
      for (std::size_t i = 0; i < recs.size(); ++i) e(static_cast<Index>(i)) = recs[i].predicted - recs[i].realized;
      return e;
    };
    const VectorXd ea = errors(runs[static_cast<std::size_t>(ref)]);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      if (static_cast<Index>(k) == ref) continue;
      DmRow row{series_label(specs[static_cast<std::size_t>(ref)]), series_label(specs[k]), {}, false};
      if (ea.size() >= 8) {
        row.result = dm_test(ea, errors(runs[k]), cfg.h);
        row.valid = true;
      }
      dm_rows.push_back(row);
    }
  }

  const fs::path dir(cfg.output_dir);
  write_text_file((dir / "summary.csv").string(), summary.str());
  write_text_file((dir / "forecasts.csv").string(), forecasts.str());
  write_text_file((dir / "dm.csv").string(), dm_csv(dm_rows));

  json prov;
  prov["rows_read"] = data.report.rows_read;
  prov["leading_rows_dropped"] = data.report.leading_rows_dropped;
  prov["missing_rows_dropped"] = data.report.missing_rows_dropped;
  prov["columns_dropped"] = data.report.columns_dropped;
  prov["rows_used"] = n;
  prov["window"] = window;
  write_run_json(cfg, prov);
  return outcome;
}

struct StoredSeries {
  std::string label;
  std::map<std::pair<long long, long long>, double> errors;  // (replication, origin) -> error
};

StoredSeries read_forecast_series(const std::string& path, const std::string& wanted) {
  const CsvTable t = read_csv_table(path);
  const Index c_series = t.column("series"), c_rep = t.column("replication"), c_origin = t.column("origin"),
              c_pred = t.column("predicted"), c_real = t.column("realized");
  if (c_series < 0 || c_rep < 0 || c_origin < 0 || c_pred < 0 || c_real < 0)
    throw InputError("'" + path + "' is not a forecasts file (needs series, replication, origin, predicted, realized)");
  std::set<std::string> labels;
  for (const auto& row : t.rows) labels.insert(row[static_cast<std::size_t>(c_series)]);
  StoredSeries out;
  if (wanted.empty()) {
    if (labels.size() != 1)
      throw InputError("'" + path + "' holds " + std::to_string(labels.size()) +
                       " series; choose one with --series-a/--series-b");
    out.label = *labels.begin();
  } else {
    if (!labels.count(wanted)) throw InputError("series '" + wanted + "' not found in '" + path + "'");
    out.label = wanted;
  }
  Index line = 0;
  for (const auto& row : t.rows) {
    ++line;
    if (row[static_cast<std::size_t>(c_series)] != out.label) continue;
    const double rep = parse_cell(row[static_cast<std::size_t>(c_rep)], line, "replication");
    const double origin = parse_cell(row[static_cast<std::size_t>(c_origin)], line, "origin");
    const double pred = parse_cell(row[static_cast<std::size_t>(c_pred)], line, "predicted");
    const double real = parse_cell(row[static_cast<std::size_t>(c_real)], line, "realized");
    out.errors[{static_cast<long long>(rep), static_cast<long long>(origin)}] = pred - real;
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (h < 1) throw ConfigError("h must be at least 1");
  if (mode == Mode::dm) {
    if (dm.a.empty() || dm.b.empty()) throw ConfigError("dm mode needs dm.a and dm.b forecast files");
    return;
  }
  if (dgp.has_value() == dataset.has_value()) throw ConfigError("set exactly one of 'dgp' and 'dataset'");
  if (mode == Mode::simulate && !dgp) throw ConfigError("simulate mode needs a 'dgp' block");
  if (mode == Mode::forecast && !dataset) throw ConfigError("forecast mode needs a 'dataset' block");
  if (methods.empty()) throw ConfigError("'methods' must not be empty");
  if (q_grid.empty() || r_grid.empty()) throw ConfigError("q and r grids must not be empty");
  for (const Index q : q_grid)
    if (q < 1) throw ConfigError("q grid values must be at least 1");
  for (const Index r : r_grid)
    if (r < 1) throw ConfigError("r grid values must be at least 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  std::set<std::string> names;
  bool has_reference = reference.empty();
  for (const auto& m : methods) {
    if (!names.insert(m.name()).second) throw ConfigError("duplicate method '" + m.name() + "'; set a label");
    has_reference = has_reference || m.name() == reference;
    if (m.q1 < 1 || m.M < 1 || m.K_n < 0 || !(m.C > 0) || m.path_len < 2)
      throw ConfigError("method '" + m.name() + "': invalid hyperparameters");
  }
  if (!has_reference) throw ConfigError("reference method '" + reference + "' is not in 'methods'");
  if (mode == Mode::simulate) {
    if (h != 1) throw ConfigError("simulate mode forecasts one step ahead; h must be 1");
    if (replications < 1) throw ConfigError("replications must be at least 1");
    try {
      dgp->validate();
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  } else {
    if (test_len < 1) throw ConfigError("forecast mode needs test_len >= 1");
    if (window < 0) throw ConfigError("window must be non-negative (0 = default)");
    if (dataset->path.empty() || dataset->target_column.empty())
      throw ConfigError("dataset needs 'path' and 'target_column'");
  }
}

std::uint64_t parse_base_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("base_seed must be a non-negative integer");
}

DgpConfig parse_dgp_config(const json& d) {
  check_keys(d, {"dgp_id", "n", "p", "r_dgp", "s", "burn_in", "null_signal"}, "dgp");
  DgpConfig g;
  try {
    g.dgp_id = static_cast<int>(get_index(d, "dgp_id", g.dgp_id, "dgp"));
    g.n = get_index(d, "n", g.n, "dgp");
    g.p = get_index(d, "p", g.p, "dgp");
    g.r_dgp = get_index(d, "r_dgp", g.r_dgp, "dgp");
    g.s = get_index(d, "s", g.s, "dgp");
    g.burn_in = get_index(d, "burn_in", g.burn_in, "dgp");
    g.null_signal = get_bool(d, "null_signal", g.null_signal, "dgp");
    g.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return g;
}

ExperimentConfig parse_experiment_config(const json& j, const std::string& base_dir) {
  ExperimentConfig cfg;
  try {
    check_keys(j, {"mode", "dgp", "dataset", "methods", "q", "r", "h", "test_len", "window", "replications",
                   "base_seed", "output_dir", "reference", "dm", "software_version", "provenance"},
               "config");
    if (!j.contains("mode")) throw ConfigError("config: missing 'mode'");
    cfg.mode = mode_from_string(get_string(j, "mode", "", "config"));
    if (j.contains("dgp")) cfg.dgp = parse_dgp_config(j.at("dgp"));
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      check_keys(d, {"path", "target_column", "transform_codes", "date_column", "drop_incomplete_columns"},
                 "dataset");
      DatasetSpec s;
      s.path = resolve_path(get_string(d, "path", "", "dataset"), base_dir);
      s.target_column = get_string(d, "target_column", "", "dataset");
      s.date_column = get_string(d, "date_column", "", "dataset");
      s.drop_incomplete_columns = get_bool(d, "drop_incomplete_columns", false, "dataset");
      if (d.contains("transform_codes")) {
        const json& codes = d.at("transform_codes");
        if (!codes.is_object()) throw ConfigError("dataset.transform_codes must map column names to codes");
        for (const auto& [name, code] : codes.items()) {
          if (!code.is_number_integer() || code.get<int>() < 1 || code.get<int>() > 7)
            throw ConfigError("dataset.transform_codes['" + name + "'] must be an integer in 1..7");
          s.transform_codes[name] = code.get<int>();
        }
      }
      cfg.dataset = s;
    }
    if (j.contains("methods")) {
      if (!j.at("methods").is_array()) throw ConfigError("'methods' must be an array");
      for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_method(m));
    }
    cfg.q_grid = get_grid(j, "q", cfg.q_grid);
    cfg.r_grid = get_grid(j, "r", cfg.r_grid);
    cfg.h = get_index(j, "h", cfg.h, "config");
    cfg.test_len = get_index(j, "test_len", cfg.test_len, "config");
    cfg.window = get_index(j, "window", cfg.window, "config");
    cfg.replications = get_index(j, "replications", cfg.replications, "config");
    if (j.contains("base_seed")) {
      cfg.base_seed = parse_base_seed(j.at("base_seed"));
    }
    cfg.output_dir = get_string(j, "output_dir", cfg.output_dir, "config");
    cfg.reference = get_string(j, "reference", cfg.reference, "config");
    if (j.contains("dm")) {
      const json& d = j.at("dm");
      check_keys(d, {"a", "b", "series_a", "series_b"}, "dm");
      cfg.dm.a = resolve_path(get_string(d, "a", "", "dm"), base_dir);
      cfg.dm.b = resolve_path(get_string(d, "b", "", "dm"), base_dir);
      cfg.dm.series_a = get_string(d, "series_a", "", "dm");
      cfg.dm.series_b = get_string(d, "series_b", "", "dm");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j, fs::path(path).parent_path().string());
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["h"] = cfg.h;
  j["output_dir"] = cfg.output_dir;
  if (cfg.mode == Mode::dm) {
    j["dm"] = {{"a", cfg.dm.a}, {"b", cfg.dm.b}, {"series_a", cfg.dm.series_a}, {"series_b", cfg.dm.series_b}};
    return j;
  }
  if (cfg.dgp) {
    const DgpConfig& g = *cfg.dgp;
    j["dgp"] = {{"dgp_id", g.dgp_id}, {"n", g.n},         {"p", g.p},
                {"r_dgp", g.r_dgp},   {"s", g.s},         {"burn_in", g.burn_in},
                {"null_signal", g.null_signal}};
    j["replications"] = cfg.replications;
    j["base_seed"] = cfg.base_seed;
  }
  if (cfg.dataset) {
    const DatasetSpec& d = *cfg.dataset;
    json codes = json::object();
    for (const auto& [name, code] : d.transform_codes) codes[name] = code;
    j["dataset"] = {{"path", d.path},
                    {"target_column", d.target_column},
                    {"date_column", d.date_column},
                    {"drop_incomplete_columns", d.drop_incomplete_columns},
                    {"transform_codes", codes}};
    j["test_len"] = cfg.test_len;
    j["window"] = cfg.window;
  }
  json methods = json::array();
  for (const auto& m : cfg.methods) methods.push_back(method_to_json(m));
  j["methods"] = methods;
  j["q"] = cfg.q_grid;
  j["r"] = cfg.r_grid;
  j["reference"] = cfg.reference;
  return j;
}

std::vector<MethodSpec> expand_grid(const ExperimentConfig& cfg) {
  std::vector<MethodSpec> out;
  for (const auto& base : cfg.methods) {
    for (const Index q : cfg.q_grid) {
      if (!uses_factors(base.kind)) {
        MethodSpec s = base;
        s.q = q;
        s.h = cfg.h;
        s.r = 0;
        out.push_back(s);
        continue;
      }
      for (const Index r : cfg.r_grid) {
        MethodSpec s = base;
        s.q = q;
        s.r = r;
        s.h = cfg.h;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::string series_label(const MethodSpec& spec) {
  std::string out = spec.name() + "[q=" + std::to_string(spec.q);
  if (uses_factors(spec.kind)) out += ";r=" + std::to_string(spec.r);
  return out + "]";
}

DmResult compare_forecast_files(const DmInputs& in, Index h) {
  const StoredSeries a = read_forecast_series(in.a, in.series_a);
  const StoredSeries b = read_forecast_series(in.b, in.series_b);
  std::vector<double> ea, eb;
  for (const auto& [key, err] : a.errors) {
    const auto it = b.errors.find(key);
    if (it == b.errors.end()) continue;
    ea.push_back(err);
    eb.push_back(it->second);
  }
  return dm_test(Eigen::Map<VectorXd>(ea.data(), static_cast<Index>(ea.size())),
                 Eigen::Map<VectorXd>(eb.data(), static_cast<Index>(eb.size())), h);
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  switch (cfg.mode) {
    case Mode::simulate: return run_simulate(cfg);
    case Mode::forecast: return run_forecast(cfg);
    case Mode::dm: {
      const DmResult r = compare_forecast_files(cfg.dm, cfg.h);
      const StoredSeries a = read_forecast_series(cfg.dm.a, cfg.dm.series_a);
      const StoredSeries b = read_forecast_series(cfg.dm.b, cfg.dm.series_b);
      write_text_file((fs::path(cfg.output_dir) / "dm.csv").string(), dm_csv({{a.label, b.label, r, true}}));
      write_run_json(cfg, json());
      RunOutcome outcome;
      outcome.output_dir = cfg.output_dir;
      return outcome;
    }
  }
  throw ConfigError("unknown mode");
}

}  // namespace gosdpca
