#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dispread/evolve.hpp"
#include "dispread/feedback.hpp"
#include "dispread/lindblad.hpp"

namespace dispread {

[[nodiscard]] std::string_view version();

/// A complete simulation scenario as read from a JSON configuration file.
///
/// Frequencies are kept in GHz exactly as entered so that the resolved echo reproduces the
/// run bit for bit. Exactly one of g_ghz / lambda and one of inv_kappa_ns / q_factor is set.
struct ScenarioConfig {
  double f_c_ghz = 5.0;
  double f_q_ghz = 6.0;
  std::optional<double> g_ghz = 0.1;
  std::optional<double> lambda;
  std::optional<double> f_d_ghz;
  double epsilon_ghz = 0.04;
  double phi_epsilon = 0.0;
  double t_d_ns = 20.0;
  DriveForm drive_form = DriveForm::Rwa;

  std::optional<double> inv_kappa_ns = 100.0;
  std::optional<double> q_factor;
  std::vector<double> temperatures_k{0.0};
  Variant variant = Variant::Filtered;
  PurcellFormula purcell_formula = PurcellFormula::BareQubit;
  PurcellScaling purcell_scaling = PurcellScaling::SpectralDensity;

  std::vector<InitialState> initial_states{InitialState::BareGround, InitialState::DressedExcited};
  std::optional<double> t_end_ns;
  double sample_dt_ns = 1.0;

  std::optional<int> n_max;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step_ns = 1.0;
  OptimizerGrid grid;

  std::string output_directory = "out";
  std::string prefix = "run";

  /// Parses JSON text. Unknown keys, malformed values and conflicting fields raise ConfigError.
  static ScenarioConfig parse(std::string_view text);
  /// Reads and parses a file. Throws IoError if it cannot be read.
  static ScenarioConfig load(const std::filesystem::path& path);
  /// Defaults with both initial states at the given temperature.
  static ScenarioConfig fig1(double temperature_k);

  [[nodiscard]] SystemParams system() const;
  [[nodiscard]] double quality_factor() const;
  [[nodiscard]] double t_end() const;
  [[nodiscard]] int resolved_n_max() const;
  [[nodiscard]] Protocol protocol(InitialState s) const;
  [[nodiscard]] IntegratorOptions integrator() const;
  [[nodiscard]] DecaySettings decay(double temperature_k) const;
  /// Re-checks every physical and numerical invariant. Throws ConfigError.
  void validate() const;
  /// Resolved configuration as JSON text, with derived quantities under "derived".
  [[nodiscard]] std::string dump() const;
};

/// Branch whose fidelity is tracked for an initial state.
[[nodiscard]] Branch tracked_branch(InitialState s);

struct TrajectoryOutput {
  InitialState initial_state = InitialState::BareGround;
  double temperature_k = 0.0;
  std::filesystem::path csv_path;
  std::vector<FeedbackRow> rows;
  double min_purity = 1.0;
  double max_n_cav = 0.0;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  Dopri5::Stats stats;
};

struct RunRecord {
  std::string resolved_config;
  std::string code_version;
  double wall_seconds = 0.0;
  std::vector<TrajectoryOutput> outputs;
  std::vector<std::string> advisories;
  std::filesystem::path record_path;
  std::filesystem::path resolved_path;
  std::string label;
};

/// Column header of every trajectory CSV.
[[nodiscard]] std::string_view csv_header();

/// Writes rows with 12 significant digits. Throws IoError on failure.
void write_csv(const std::filesystem::path& path, const std::vector<FeedbackRow>& rows);

/// Simulates one (initial state, temperature) combination without writing files.
TrajectoryOutput simulate_one(const ScenarioConfig& config, InitialState state, double temperature_k);

/// Runs every (initial state, temperature) combination and writes the CSVs, resolved config and run record.
RunRecord run_simulate(const ScenarioConfig& config, const std::string& label = {});

struct SweepEntry {
  double value = 0.0;
  std::string status;
  int exit_code = 0;
  RunRecord record;
};

struct SweepRecord {
  std::string parameter;
  std::vector<SweepEntry> entries;
  std::filesystem::path summary_path;
  /// First non-zero exit code among the entries, or 0.
  [[nodiscard]] int exit_code() const;
};

/// Parses a comma-separated list of numbers. Throws ConfigError if empty or malformed.
std::vector<double> parse_value_list(std::string_view text);

/// Runs the scenario once per value of the scalar field at dotted `parameter` path.
///
/// Each value writes into its own subdirectory of the output directory; a summary CSV
/// lists per-value status, final F, final optimized F^C and peak cavity occupation.
SweepRecord run_sweep(const ScenarioConfig& config, const std::string& parameter, const std::vector<double>& values);

}  // namespace dispread
