#include <gosdpca/experiment.hpp>
#include <gosdpca/io.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace gosdpca;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("gosdpca_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

json small_simulate(const std::string& out) {
  return {{"mode", "simulate"},
          {"dgp", {{"dgp_id", 1}, {"n", 80}, {"p", 20}, {"r_dgp", 2}, {"s", 6}}},
          {"methods", {"GsP*", "SW", "AR"}},
          {"q", {2}},
          {"r", {1, 2}},
          {"replications", 4},
          {"base_seed", 3},
          {"output_dir", out}};
}

std::string write_panel_csv(const TempDir& dir) {
  DgpConfig g;
  g.n = 99;
  g.p = 9;
  g.r_dgp = 2;
  g.s = 4;
  g.seed = 17;
  const std::string path = dir / "panel.csv";
  write_series_csv(path, generate(g).series, "t");
  return path;
}

}  // namespace

TEST(Transform, DifferenceExamples) {
  const VectorXd d = apply_transform(vec({1, 3, 6}), 2, "x");
  EXPECT_TRUE(std::isnan(d(0)));
  EXPECT_EQ(d(1), 2.0);
  EXPECT_EQ(d(2), 3.0);
  const VectorXd l = apply_transform(vec({1, std::exp(1.0), std::exp(2.0)}), 5, "x");
  EXPECT_NEAR(l(1), 1.0, 1e-15);
  EXPECT_NEAR(l(2), 1.0, 1e-15);
  const VectorXd s = apply_transform(vec({1, 3, 6, 10}), 3, "x");
  EXPECT_EQ(s(2), 1.0);
  EXPECT_EQ(s(3), 1.0);
  EXPECT_NEAR(apply_transform(vec({2, 4}), 4, "x")(1), std::log(4.0), 1e-15);
  EXPECT_NEAR(apply_transform(vec({1, 2, 8}), 6, "x")(2), std::log(4.0) - std::log(2.0), 1e-14);
  EXPECT_NEAR(apply_transform(vec({1, 2, 6}), 7, "x")(2), 2.0 - 1.0, 1e-15);
  EXPECT_EQ(apply_transform(vec({5, -1}), 1, "x")(1), -1.0);
}

TEST(Transform, Errors) {
  try {
    apply_transform(vec({1, 0, 2}), 5, "INDPRO");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("INDPRO"), std::string::npos);
  }
  EXPECT_THROW(apply_transform(vec({1, 0, 2}), 7, "x"), InputError);
  EXPECT_THROW(apply_transform(vec({1, 2}), 8, "x"), InputError);
  EXPECT_EQ(transform_lag(6), 2);
}

TEST(ParseCell, MissingAndErrors) {
  EXPECT_TRUE(std::isnan(parse_cell("NA", 1, "x")));
  EXPECT_TRUE(std::isnan(parse_cell("", 1, "x")));
  EXPECT_TRUE(std::isnan(parse_cell(".", 1, "x")));
  EXPECT_EQ(parse_cell(" +2.5e1 ", 1, "x"), 25.0);
  try {
    parse_cell("1,5", 7, "GDP");
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 7"), std::string::npos);
    EXPECT_NE(msg.find("GDP"), std::string::npos);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 1000; ++i) {
    const double v = normal(rng) * std::pow(10.0, i % 20 - 10);
    EXPECT_EQ(parse_cell(format_double(v), 0, "x"), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(LoadCsv, TransformRowAndAlignment) {
  TempDir dir;
  write(dir / "d.csv",
        "date,y,a,b\n"
        "Transform:,2,1,5\n"
        "2000-01,1,10,1\n"
        "2000-02,3,11,2\n"
        "2000-03,6,NA,4\n"
        "2000-04,10,13,8\n");
  DatasetSpec spec;
  spec.path = dir / "d.csv";
  spec.target_column = "y";
  spec.date_column = "date";
  const auto data = load_csv(spec);
  EXPECT_EQ(data.report.rows_read, 4);
  EXPECT_EQ(data.report.leading_rows_dropped, 1);
  EXPECT_EQ(data.report.missing_rows_dropped, 1);
  ASSERT_EQ(data.series.rows(), 2);
  EXPECT_EQ(data.series.index, (std::vector<std::string>{"2000-02", "2000-04"}));
  EXPECT_EQ(data.series.names[static_cast<std::size_t>(data.target)], "y");
  EXPECT_EQ(data.series.values(0, data.target), 2.0);
  EXPECT_EQ(data.series.values(1, data.target), 4.0);
  EXPECT_NEAR(data.series.values(1, data.series.column("b")), std::log(2.0), 1e-15);

  spec.transform_codes["y"] = 1;  // explicit codes win
  EXPECT_EQ(load_csv(spec).series.values(0, 0), 3.0);

  spec.drop_incomplete_columns = true;
  const auto dropped = load_csv(spec);
  EXPECT_EQ(dropped.report.columns_dropped, std::vector<std::string>{"a"});
  EXPECT_EQ(dropped.series.rows(), 3);
}

TEST(LoadCsv, Errors) {
  TempDir dir;
  write(dir / "bad.csv", "y,x\n1,2\n3,oops\n");
  DatasetSpec spec;
  spec.path = dir / "bad.csv";
  spec.target_column = "y";
  EXPECT_THROW(load_csv(spec), InputError);
  write(dir / "short.csv", "y,x\n1,2\n3\n");
  spec.path = dir / "short.csv";
  EXPECT_THROW(load_csv(spec), InputError);
  write(dir / "ok.csv", "y,x\n1,2\n3,4\n");
  spec.path = dir / "ok.csv";
  spec.target_column = "z";
  EXPECT_THROW(load_csv(spec), InputError);
  spec.path = dir / "missing.csv";
  EXPECT_THROW(load_csv(spec), InputError);
}

TEST(LoadCsv, ExportedPanelRoundTripsBitExactly) {
  TempDir dir;
  DgpConfig g;
  g.n = 60;
  g.p = 12;
  g.r_dgp = 2;
  g.s = 4;
  const auto panel = generate(g);
  write_series_csv(dir / "p.csv", panel.series, "t");
  DatasetSpec spec;
  spec.path = dir / "p.csv";
  spec.target_column = "y";
  spec.date_column = "t";
  const auto data = load_csv(spec);
  EXPECT_EQ(data.series.names, panel.series.names);
  EXPECT_EQ(data.series.values, panel.series.values);
}

TEST(Config, ParsesMethodsAndRoundTrips) {
  json j = small_simulate("out");
  j["methods"] = json::array({"GsP*", json{{"name", "GsP*"}, {"label", "GsP*-C4"}, {"C", 4.0}, {"M", 3}}, "Lasso"});
  j["reference"] = "GsP*-C4";
  const auto cfg = parse_experiment_config(j);
  ASSERT_EQ(cfg.methods.size(), 3u);
  EXPECT_EQ(cfg.methods[1].name(), "GsP*-C4");
  EXPECT_EQ(cfg.methods[1].C, 4.0);
  EXPECT_EQ(cfg.methods[1].M, 3);
  const json again = to_json(parse_experiment_config(to_json(cfg)));
  EXPECT_EQ(again, to_json(cfg));
  const auto grid = expand_grid(cfg);
  EXPECT_EQ(grid.size(), 5u);  // two factor methods x r {1, 2}, Lasso once
  EXPECT_EQ(series_label(grid[0]), "GsP*[q=2;r=1]");
  EXPECT_EQ(series_label(grid[4]), "Lasso[q=2]");
}

TEST(Config, Errors) {
  auto bad = [](const std::function<void(json&)>& edit) {
    json j = small_simulate("out");
    edit(j);
    EXPECT_THROW(parse_experiment_config(j), ConfigError) << j.dump();
  };
  bad([](json& j) { j["bogus"] = 1; });
  bad([](json& j) { j.erase("mode"); });
  bad([](json& j) { j["mode"] = "train"; });
  bad([](json& j) { j["methods"] = json::array(); });
  bad([](json& j) { j["methods"] = {"RF"}; });
  bad([](json& j) { j["methods"] = {"SW", "SW"}; });
  bad([](json& j) { j["r"] = json::array(); });
  bad([](json& j) { j["q"] = {0}; });
  bad([](json& j) { j["dgp"]["s"] = 21; });
  bad([](json& j) { j["dgp"]["extra"] = 1; });
  bad([](json& j) { j["dataset"] = {{"path", "x.csv"}, {"target_column", "y"}}; });
  bad([](json& j) { j["base_seed"] = -1; });
  bad([](json& j) { j["h"] = 2; });
  bad([](json& j) { j["reference"] = "LYB"; });
  bad([](json& j) { j["replications"] = 0; });
  EXPECT_THROW(load_experiment_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(RunExperiment, SimulateSchemaAndReplay) {
  TempDir dir;
  const std::string out = dir / "sim";
  run_experiment(parse_experiment_config(small_simulate(out)));
  const CsvTable summary = read_csv_table(out + "/summary.csv");
  EXPECT_EQ(summary.header, (std::vector<std::string>{"method", "q", "r", "rmsfe", "mc_stderr", "replications",
                                                      "failures", "mean_abs_error"}));
  ASSERT_EQ(summary.rows.size(), 5u);
  for (const auto& row : summary.rows) EXPECT_TRUE(std::isfinite(parse_cell(row[3], 0, "rmsfe")));
  EXPECT_EQ(summary.rows[4][2], "NA");
  const CsvTable fc = read_csv_table(out + "/forecasts.csv");
  EXPECT_EQ(fc.rows.size(), 20u);
  EXPECT_EQ(fc.header.size(), 12u);
  const CsvTable dm = read_csv_table(out + "/dm.csv");
  EXPECT_EQ(dm.rows.size(), 4u);  // best GsP* point against every other grid point
  EXPECT_EQ(dm.rows[0][3], "NA");  // four replications are too few for a DM test

  const std::string s1 = slurp(out + "/summary.csv"), f1 = slurp(out + "/forecasts.csv"),
                    r1 = slurp(out + "/run.json");
  const ExperimentConfig replay = load_experiment_config(out + "/run.json");
  run_experiment(replay);
  EXPECT_EQ(slurp(out + "/summary.csv"), s1);
  EXPECT_EQ(slurp(out + "/forecasts.csv"), f1);
  EXPECT_EQ(slurp(out + "/run.json"), r1);
  EXPECT_EQ(json::parse(r1).at("software_version"), software_version());
}

TEST(RunExperiment, ForecastAndDmModes) {
  TempDir dir;
  const std::string csv = write_panel_csv(dir);
  json j = {{"mode", "forecast"},
            {"dataset", {{"path", "panel.csv"}, {"target_column", "y"}, {"date_column", "t"}}},
            {"methods", {"GsP*", "AR", "Naive"}},
            {"r", {2}},
            {"test_len", 12},
            {"output_dir", "fc"}};
  write(dir / "cfg.json", j.dump());
  ExperimentConfig cfg = load_experiment_config(dir / "cfg.json");
  EXPECT_EQ(cfg.dataset->path, fs::absolute(csv).lexically_normal().string());
  cfg.output_dir = dir / "fc";
  run_experiment(cfg);
  const CsvTable summary = read_csv_table(dir / "fc/summary.csv");
  EXPECT_EQ(summary.header, (std::vector<std::string>{"method", "q", "r", "rmsfe", "n_windows"}));
  ASSERT_EQ(summary.rows.size(), 3u);
  EXPECT_EQ(summary.rows[0][4], "12");
  const CsvTable dm = read_csv_table(dir / "fc/dm.csv");
  ASSERT_EQ(dm.rows.size(), 2u);
  EXPECT_EQ(dm.rows[0][0], "GsP*[q=2;r=2]");
  EXPECT_EQ(dm.rows[0][3], "12");
  const json run = json::parse(slurp(dir / "fc/run.json"));
  EXPECT_EQ(run.at("provenance").at("rows_used"), 100);

  ExperimentConfig d;
  d.mode = Mode::dm;
  d.dm = {dir / "fc/forecasts.csv", dir / "fc/forecasts.csv", "GsP*[q=2;r=2]", "Naive[q=2]"};
  d.output_dir = dir / "dm";
  run_experiment(d);
  const CsvTable dm2 = read_csv_table(dir / "dm/dm.csv");
  ASSERT_EQ(dm2.rows.size(), 1u);
  EXPECT_EQ(dm2.rows[0][4], dm.rows[1][4]);  // same pair as the in-run comparison
  const DmResult r = compare_forecast_files(d.dm, 1);
  EXPECT_EQ(r.n_forecasts, 12);

  d.dm.series_a.clear();
  EXPECT_THROW(compare_forecast_files(d.dm, 1), InputError);  // ambiguous file
}

#ifdef GOSDPCA_CLI
namespace {
int run_cli(const std::string& args, const std::string& err_file) {
  const int status = std::system((std::string(GOSDPCA_CLI) + " " + args + " > /dev/null 2> " + err_file).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST(Cli, ExitCodesAndErrorJson) {
  TempDir dir;
  const std::string err = dir / "err.txt";
  write(dir / "bad.json", R"({"mode": "simulate", "methods": []})");
  EXPECT_EQ(run_cli("simulate --config " + dir / "bad.json", err), 2);
  const json e = json::parse(slurp(err));
  EXPECT_EQ(e.at("error"), "config");
  EXPECT_EQ(run_cli("simulate", err), 2);
  EXPECT_EQ(run_cli("forecast --config " + dir / "missing.json", err), 2);

  json cfg = small_simulate("sim");
  cfg["replications"] = 2;
  write(dir / "sim.json", cfg.dump());
  EXPECT_EQ(run_cli("simulate --config " + dir / "sim.json" + " --out " + dir / "sim", err), 0);
  EXPECT_TRUE(fs::exists(dir / "sim/summary.csv"));
  EXPECT_EQ(run_cli("forecast --config " + dir / "sim.json", err), 2);  // wrong subcommand for the mode

  write(dir / "rt.json", json{{"mode", "forecast"},
                               {"dataset", {{"path", "nothere.csv"}, {"target_column", "y"}}},
                               {"methods", {"AR"}},
                               {"reference", ""},
                               {"test_len", 5}}
                             .dump());
  EXPECT_EQ(run_cli("forecast --config " + dir / "rt.json" + " --out " + dir / "rt", err), 3);
  EXPECT_EQ(json::parse(slurp(err)).at("error"), "runtime");

  EXPECT_EQ(run_cli("export-dgp --config " + dir / "sim.json" + " --out " + dir / "x.csv --replication 1", err), 0);
  DgpConfig g = parse_dgp_config(cfg.at("dgp"));
  g.seed = derive_seed(3, 1);
  DatasetSpec spec;
  spec.path = dir / "x.csv";
  spec.target_column = "y";
  spec.date_column = "t";
  EXPECT_EQ(load_csv(spec).series.values, generate(g).series.values);
}
#endif
