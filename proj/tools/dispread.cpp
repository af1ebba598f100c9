// Command-line front end: simulate, sweep, validate and fig1.

#include <cstdio>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "dispread/errors.hpp"
#include "dispread/scenario.hpp"
#include "dispread/validate.hpp"

namespace {

void print_record(const dispread::RunRecord& record) {
  for (const auto& out : record.outputs) {
    fmt::print("{}  (min purity {:.5f}, peak n_cav {:.4f}, {} steps)\n", out.csv_path.string(), out.min_purity,
               out.max_n_cav, out.stats.accepted);
  }
  fmt::print("{}\n{}\n", record.resolved_path.string(), record.record_path.string());
  for (const auto& a : record.advisories) fmt::print(stderr, "advisory: {}\n", a);
}

int run_validate(bool fast, bool fault) {
  dispread::ValidationOptions opts;
  opts.fast = fast;
  opts.zero_cavity_decay = fault;
  const auto report = dispread::run_validation(opts, [](const dispread::CheckResult& r) {
    fmt::print("{}\n", dispread::format_check(r));
    std::fflush(stdout);
  });
  std::size_t failed = 0;
  for (const auto& c : report.checks) failed += c.passed ? 0 : 1;
  fmt::print("{} checks, {} failed, {:.1f} s\n", report.checks.size(), failed, report.seconds);
  return failed == 0 ? 0 : static_cast<int>(dispread::ExitCode::CheckFailure);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersive readout simulator with coherent feedback correction"};
  app.set_version_flag("--version", std::string(dispread::version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run every initial state and temperature of a scenario");
  simulate->add_option("--config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides output.directory)");

  std::string param;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over values of one scalar field");
  sweep->add_option("--config", config_path, "Scenario JSON file")->required();
  sweep->add_option("--param", param, "Dotted field path, e.g. system.epsilon_ghz")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", out_dir, "Output directory (overrides output.directory)");

  bool fast = false;
  bool fault = false;
  auto* validate = app.add_subcommand("validate", "Run the acceptance checks on the default parameters");
  validate->add_flag("--fast", fast, "Looser tolerances and coarser optimizer grids");
  validate->add_flag("--zero-cavity-decay", fault, "Inject a fault by removing cavity decay");

  double temperature = 0.0;
  auto* fig1 = app.add_subcommand("fig1", "Reconstruction of the drive-then-decay figure with default parameters");
  fig1->add_option("--temperature", temperature, "Bath temperature in K")->check(CLI::NonNegativeNumber);
  fig1->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(dispread::ExitCode::ConfigError);
  }

  try {
    if (*simulate) {
      auto config = dispread::ScenarioConfig::load(config_path);
      if (!out_dir.empty()) config.output_directory = out_dir;
      print_record(dispread::run_simulate(config));
      return 0;
    }
    if (*sweep) {
      auto config = dispread::ScenarioConfig::load(config_path);
      if (!out_dir.empty()) config.output_directory = out_dir;
      const auto list = dispread::parse_value_list(values);
      const auto record = dispread::run_sweep(config, param, list);
      for (const auto& e : record.entries) fmt::print("{} = {:.12g}: {}\n", record.parameter, e.value, e.status);
      fmt::print("{}\n", record.summary_path.string());
      return record.exit_code();
    }
    if (*validate) return run_validate(fast, fault);
    if (*fig1) {
      auto config = dispread::ScenarioConfig::fig1(temperature);
      if (!out_dir.empty()) config.output_directory = out_dir;
      fmt::print("fig1 reconstruction: default parameters (5 GHz cavity, 6 GHz qubit, 20 ns drive), T = {} K\n",
                 temperature);
      print_record(dispread::run_simulate(config, "fig1 reconstruction with default parameters"));
      return 0;
    }
  } catch (const dispread::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(dispread::ExitCode::NumericalGuard);
  }
  return 0;
}
