#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dispread/errors.hpp"
#include "dispread/scenario.hpp"

using namespace dispread;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("dispread_test_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig short_scenario(const std::filesystem::path& dir) {
  ScenarioConfig c = ScenarioConfig::parse(R"({
    "system": {"epsilon_ghz": 0.02, "t_d_ns": 10},
    "decay": {"temperature_k": 0.0},
    "protocol": {"initial_states": ["bare_ground"], "t_end_ns": 40, "sample_dt_ns": 2},
    "numerics": {"grid_sigma": 90, "grid_theta": 8}
  })");
  c.output_directory = dir.string();
  return c;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("defaults resolve to the reference parameters") {
  const ScenarioConfig c = ScenarioConfig::parse("{}");
  const SystemParams p = c.system();
  CHECK(p.lambda() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.quality_factor() == doctest::Approx(p.omega_c * 100.0).epsilon(1e-12));
  CHECK(c.t_end() == doctest::Approx(520.0));
  CHECK(c.resolved_n_max() == 56);
  CHECK(c.initial_states.size() == 2);
}

TEST_CASE("malformed configurations are rejected") {
  CHECK_THROWS_AS(ScenarioConfig::parse("{ not json"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"system": {"g_ghz": 0.1, "lambda": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"decay": {"inv_kappa_ns": 100, "q_factor": 3000}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"system": {"colour": 1}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"extras": {}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"system": {"lambda": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"system": {"f_q_ghz": 5.0}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"system": {"epsilon_ghz": "big"}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"decay": {"temperature_k": -0.1}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"decay": {"variant": "sometimes"}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"protocol": {"initial_states": []}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"numerics": {"rel_tol": 0}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse(R"({"system": {"f_d_ghz": 5.1}})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::load("/nonexistent/dispread.json"), IoError);
}

TEST_CASE("resolved configuration is a fixed point") {
  const ScenarioConfig c = ScenarioConfig::parse(R"({"system": {"lambda": 0.08}, "decay": {"q_factor": 2500,
    "temperature_k": [0, 0.1], "variant": "unfiltered"}})");
  const std::string once = c.dump();
  const std::string twice = ScenarioConfig::parse(once).dump();
  CHECK(once == twice);
}

TEST_CASE("sweep value lists") {
  CHECK(parse_value_list("0.01, 0.02,0.03") == std::vector<double>{0.01, 0.02, 0.03});
  CHECK_THROWS_AS(parse_value_list(""), ConfigError);
  CHECK_THROWS_AS(parse_value_list("0.1,,0.2"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("abc"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("0.1x"), ConfigError);
}

TEST_CASE("CSV header and number format") {
  CHECK(csv_header() == "t_ns,n_cav,purity,F,F_C_analytic,F_C_opt,sigma_opt,theta_opt");
  TempDir tmp;
  FeedbackRow row{1.0 / 3.0, 2.0, 0.5, 1.0, 0.25, 0.125, 3.14159265358979, 1e-20};
  write_csv(tmp.path() / "x.csv", {row});
  const std::string text = slurp(tmp.path() / "x.csv");
  CHECK(text == "t_ns,n_cav,purity,F,F_C_analytic,F_C_opt,sigma_opt,theta_opt\n"
                "0.333333333333,2,0.5,1,0.25,0.125,3.14159265359,1e-20\n");
  CHECK_THROWS_AS(write_csv(tmp.path() / "missing" / "dir" / "x.csv", {row}), IoError);
}

TEST_CASE("a zero-length drive leaves the ground state untouched") {
  TempDir tmp;
  ScenarioConfig c = short_scenario(tmp.path());
  c.t_d_ns = 0.0;
  const TrajectoryOutput out = simulate_one(c, InitialState::BareGround, 0.0);
  REQUIRE(!out.rows.empty());
  for (const auto& row : out.rows) {
    CHECK(row.f == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(row.n_cav) < 1e-12);
  }
}

TEST_CASE("simulate writes deterministic, reproducible output") {
  TempDir tmp;
  const ScenarioConfig c = short_scenario(tmp.path() / "a");
  const RunRecord first = run_simulate(c);
  REQUIRE(first.outputs.size() == 1);
  CHECK(std::filesystem::exists(first.resolved_path));
  CHECK(std::filesystem::exists(first.record_path));
  const std::string csv = slurp(first.outputs[0].csv_path);
  CHECK(csv.rfind(std::string(csv_header()) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);

  ScenarioConfig again = c;
  again.output_directory = (tmp.path() / "b").string();
  CHECK(slurp(run_simulate(again).outputs[0].csv_path) == csv);

  ScenarioConfig echoed = ScenarioConfig::load(first.resolved_path);
  echoed.output_directory = (tmp.path() / "c").string();
  CHECK(slurp(run_simulate(echoed).outputs[0].csv_path) == csv);
}

TEST_CASE("sweep over one value reproduces the base run") {
  TempDir tmp;
  const ScenarioConfig base = short_scenario(tmp.path() / "base");
  const std::string reference = slurp(run_simulate(base).outputs[0].csv_path);

  ScenarioConfig c = short_scenario(tmp.path() / "sweep");
  const SweepRecord sweep = run_sweep(c, "system.epsilon_ghz", {0.02, 0.01});
  REQUIRE(sweep.entries.size() == 2);
  CHECK(sweep.exit_code() == 0);
  CHECK(slurp(sweep.entries[0].record.outputs[0].csv_path) == reference);
  CHECK(slurp(sweep.entries[1].record.outputs[0].csv_path) != reference);
  const std::string summary = slurp(sweep.summary_path);
  CHECK(summary.rfind("value,initial_state,temperature_k,status,final_F,final_F_C_opt,max_n_cav\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);

  CHECK_THROWS_AS(run_sweep(c, "system.epsilon_ghz", {}), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, "system.nothing", {1.0}), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, "epsilon_ghz", {1.0}), ConfigError);
  CHECK_THROWS_AS(run_sweep(c, "decay.variant", {1.0}), ConfigError);
}

TEST_CASE("a failing sweep value is reported without aborting the sweep") {
  TempDir tmp;
  ScenarioConfig c = short_scenario(tmp.path());
  c.n_max = 6;
  const SweepRecord sweep = run_sweep(c, "system.epsilon_ghz", {0.0, 0.2});
  REQUIRE(sweep.entries.size() == 2);
  CHECK(sweep.entries[0].exit_code == 0);
  CHECK(sweep.entries[1].exit_code == static_cast<int>(ExitCode::NumericalGuard));
  CHECK(sweep.exit_code() == static_cast<int>(ExitCode::NumericalGuard));
}

TEST_CASE("unwritable output directory is an I/O error") {
  TempDir tmp;
  std::ofstream(tmp.path() / "file") << "x";
  ScenarioConfig c = short_scenario(tmp.path() / "file" / "sub");
  CHECK_THROWS_AS(run_simulate(c), IoError);
}

TEST_CASE("exit codes of the error hierarchy") {
  CHECK(ConfigError("x").exit_code() == ExitCode::ConfigError);
  CHECK(InvalidArgument("x").exit_code() == ExitCode::ConfigError);
  CHECK(CutoffError("x").exit_code() == ExitCode::NumericalGuard);
  CHECK(IntegrationError("x").exit_code() == ExitCode::NumericalGuard);
  CHECK(LabelingError("x").exit_code() == ExitCode::NumericalGuard);
  CHECK(IoError("x").exit_code() == ExitCode::IoError);
}

}  // TEST_SUITE
