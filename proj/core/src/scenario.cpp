#include "dispread/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dispread/errors.hpp"
#include "json.hpp"

#ifndef DISPREAD_VERSION
#define DISPREAD_VERSION "0.0.0"
#endif

namespace dispread {

using nlohmann::json;

std::string_view version() { return DISPREAD_VERSION; }

namespace {

const std::set<std::string> kSections{"system", "decay", "protocol", "numerics", "output", "derived"};
const std::map<std::string, std::set<std::string>> kKeys{
    {"system", {"f_c_ghz", "f_q_ghz", "g_ghz", "lambda", "f_d_ghz", "epsilon_ghz", "phi_epsilon", "t_d_ns", "drive_form"}},
    {"decay", {"inv_kappa_ns", "q_factor", "temperature_k", "variant", "purcell_formula", "purcell_scaling"}},
    {"protocol", {"initial_states", "t_end_ns", "sample_dt_ns"}},
    {"numerics", {"n_max", "rel_tol", "abs_tol", "max_step_ns", "grid_sigma", "grid_theta", "refine_iterations"}},
    {"output", {"directory", "prefix"}},
};

double get_number(const json& obj, const std::string& section, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("{}.{} must be a number", section, key));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(fmt::format("{}.{} must be finite", section, key));
  return x;
}

int get_int(const json& obj, const std::string& section, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(fmt::format("{}.{} must be an integer", section, key));
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& section, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(fmt::format("{}.{} must be a string", section, key));
  return v.get<std::string>();
}

template <typename Enum>
Enum parse_enum(const std::string& text, const std::vector<std::pair<std::string_view, Enum>>& options,
                const std::string& what) {
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (text == name) return value;
    allowed += allowed.empty() ? std::string(name) : ", " + std::string(name);
  }
  throw ConfigError(fmt::format("{} must be one of [{}], got '{}'", what, allowed, text));
}

const std::vector<std::pair<std::string_view, InitialState>> kStates{
    {"bare_ground", InitialState::BareGround},
    {"dressed_excited", InitialState::DressedExcited},
    {"bare_excited", InitialState::BareExcited}};

std::string_view drive_form_name(DriveForm f) { return f == DriveForm::Rwa ? "rwa" : "lab"; }

std::string temperature_tag(double t) { return fmt::format("{:g}", t); }

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("configuration is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw ConfigError("configuration root must be an object");

  for (const auto& [section, value] : root.items()) {
    if (!kSections.contains(section)) throw ConfigError(fmt::format("unknown configuration section '{}'", section));
    if (!value.is_object()) throw ConfigError(fmt::format("section '{}' must be an object", section));
    if (section == "derived") continue;
    for (const auto& [key, _] : value.items()) {
      if (!kKeys.at(section).contains(key)) throw ConfigError(fmt::format("unknown key '{}.{}'", section, key));
    }
  }

  ScenarioConfig c;
  c.g_ghz.reset();
  c.inv_kappa_ns.reset();
  const json empty = json::object();
  const json& sys = root.contains("system") ? root.at("system") : empty;
  const json& dec = root.contains("decay") ? root.at("decay") : empty;
  const json& pro = root.contains("protocol") ? root.at("protocol") : empty;
  const json& num = root.contains("numerics") ? root.at("numerics") : empty;
  const json& out = root.contains("output") ? root.at("output") : empty;

  if (sys.contains("f_c_ghz")) c.f_c_ghz = get_number(sys, "system", "f_c_ghz");
  if (sys.contains("f_q_ghz")) c.f_q_ghz = get_number(sys, "system", "f_q_ghz");
  if (sys.contains("g_ghz") && sys.contains("lambda")) {
    throw ConfigError("system.g_ghz and system.lambda are mutually exclusive");
  }
  if (sys.contains("g_ghz")) c.g_ghz = get_number(sys, "system", "g_ghz");
  if (sys.contains("lambda")) c.lambda = get_number(sys, "system", "lambda");
  if (!c.g_ghz && !c.lambda) c.g_ghz = 0.1;
  if (sys.contains("f_d_ghz")) c.f_d_ghz = get_number(sys, "system", "f_d_ghz");
  if (sys.contains("epsilon_ghz")) c.epsilon_ghz = get_number(sys, "system", "epsilon_ghz");
  if (sys.contains("phi_epsilon")) c.phi_epsilon = get_number(sys, "system", "phi_epsilon");
  if (sys.contains("t_d_ns")) c.t_d_ns = get_number(sys, "system", "t_d_ns");
  if (sys.contains("drive_form")) {
    c.drive_form = parse_enum<DriveForm>(get_string(sys, "system", "drive_form"),
                                         {{"rwa", DriveForm::Rwa}, {"lab", DriveForm::Lab}}, "system.drive_form");
  }

  if (dec.contains("inv_kappa_ns") && dec.contains("q_factor")) {
    throw ConfigError("decay.inv_kappa_ns and decay.q_factor are mutually exclusive");
  }
  if (dec.contains("inv_kappa_ns")) c.inv_kappa_ns = get_number(dec, "decay", "inv_kappa_ns");
  if (dec.contains("q_factor")) c.q_factor = get_number(dec, "decay", "q_factor");
  if (!c.inv_kappa_ns && !c.q_factor) c.inv_kappa_ns = 100.0;
  if (dec.contains("temperature_k")) {
    const json& t = dec.at("temperature_k");
    c.temperatures_k.clear();
    if (t.is_number()) {
      c.temperatures_k.push_back(get_number(dec, "decay", "temperature_k"));
    } else if (t.is_array()) {
      for (const auto& x : t) {
        if (!x.is_number()) throw ConfigError("decay.temperature_k entries must be numbers");
        c.temperatures_k.push_back(x.get<double>());
      }
    } else {
      throw ConfigError("decay.temperature_k must be a number or a list of numbers");
    }
  }
  if (dec.contains("variant")) {
    c.variant = parse_enum<Variant>(get_string(dec, "decay", "variant"),
                                    {{"filtered", Variant::Filtered}, {"unfiltered", Variant::Unfiltered}},
                                    "decay.variant");
  }
  if (dec.contains("purcell_formula")) {
    c.purcell_formula = parse_enum<PurcellFormula>(
        get_string(dec, "decay", "purcell_formula"),
        {{"bare_qubit", PurcellFormula::BareQubit}, {"shifted_qubit", PurcellFormula::ShiftedQubit}}, "decay.purcell_formula");
  }
  if (dec.contains("purcell_scaling")) {
    c.purcell_scaling = parse_enum<PurcellScaling>(
        get_string(dec, "decay", "purcell_scaling"),
        {{"spectral_density", PurcellScaling::SpectralDensity}, {"literal", PurcellScaling::Literal}},
        "decay.purcell_scaling");
  }

  if (pro.contains("initial_states")) {
    const json& s = pro.at("initial_states");
    if (!s.is_array()) throw ConfigError("protocol.initial_states must be a list");
    c.initial_states.clear();
    for (const auto& x : s) {
      if (!x.is_string()) throw ConfigError("protocol.initial_states entries must be strings");
      c.initial_states.push_back(parse_enum<InitialState>(x.get<std::string>(), kStates, "protocol.initial_states"));
    }
  }
  if (pro.contains("t_end_ns")) c.t_end_ns = get_number(pro, "protocol", "t_end_ns");
  if (pro.contains("sample_dt_ns")) c.sample_dt_ns = get_number(pro, "protocol", "sample_dt_ns");

  if (num.contains("n_max")) c.n_max = get_int(num, "numerics", "n_max");
  if (num.contains("rel_tol")) c.rel_tol = get_number(num, "numerics", "rel_tol");
  if (num.contains("abs_tol")) c.abs_tol = get_number(num, "numerics", "abs_tol");
  if (num.contains("max_step_ns")) c.max_step_ns = get_number(num, "numerics", "max_step_ns");
  if (num.contains("grid_sigma")) c.grid.sigma_points = get_int(num, "numerics", "grid_sigma");
  if (num.contains("grid_theta")) c.grid.theta_points = get_int(num, "numerics", "grid_theta");
  if (num.contains("refine_iterations")) c.grid.refine_iterations = get_int(num, "numerics", "refine_iterations");

  if (out.contains("directory")) c.output_directory = get_string(out, "output", "directory");
  if (out.contains("prefix")) c.prefix = get_string(out, "output", "prefix");

  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read configuration '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ScenarioConfig ScenarioConfig::fig1(double temperature_k) {
  ScenarioConfig c;
  c.temperatures_k = {temperature_k};
  c.output_directory = "fig1";
  c.prefix = "fig1";
  c.validate();
  return c;
}

SystemParams ScenarioConfig::system() const {
  const double f_d = f_d_ghz.value_or(f_c_ghz);
  double g = g_ghz.value_or(0.0);
  if (lambda) g = *lambda * (f_q_ghz - f_c_ghz);
  return SystemParams::from_ghz(f_c_ghz, f_q_ghz, g, f_d, epsilon_ghz, phi_epsilon, t_d_ns);
}

double ScenarioConfig::quality_factor() const {
  const double omega_c = kTwoPi * f_c_ghz;
  return q_factor ? *q_factor : omega_c * inv_kappa_ns.value_or(100.0);
}

double ScenarioConfig::t_end() const { return t_end_ns.value_or(t_d_ns + 500.0); }

int ScenarioConfig::resolved_n_max() const { return n_max.value_or(default_n_max(system())); }

Protocol ScenarioConfig::protocol(InitialState s) const { return {s, t_d_ns, t_end(), sample_dt_ns}; }

IntegratorOptions ScenarioConfig::integrator() const {
  IntegratorOptions o;
  o.rel_tol = rel_tol;
  o.abs_tol = abs_tol;
  o.max_step = max_step_ns;
  o.drive_form = drive_form;
  return o;
}

DecaySettings ScenarioConfig::decay(double temperature_k) const {
  return {quality_factor(), temperature_k, variant, purcell_formula, purcell_scaling};
}

void ScenarioConfig::validate() const {
  if (g_ghz.has_value() == lambda.has_value()) throw ConfigError("exactly one of system.g_ghz and system.lambda is required");
  if (inv_kappa_ns.has_value() == q_factor.has_value()) {
    throw ConfigError("exactly one of decay.inv_kappa_ns and decay.q_factor is required");
  }
  if (f_q_ghz == f_c_ghz) throw ConfigError("qubit and cavity frequencies must differ");
  if (f_d_ghz && *f_d_ghz != f_c_ghz) {
    throw ConfigError(fmt::format("system.f_d_ghz = {} must equal the cavity frequency {}; only resonant drives are supported",
                                  *f_d_ghz, f_c_ghz));
  }
  try {
    system().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (inv_kappa_ns && !(*inv_kappa_ns > 0.0)) throw ConfigError("decay.inv_kappa_ns must be positive");
  if (q_factor && !(*q_factor > 0.0)) throw ConfigError("decay.q_factor must be positive");
  if (temperatures_k.empty()) throw ConfigError("decay.temperature_k must not be empty");
  for (double t : temperatures_k) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("temperatures must be finite and non-negative");
  }
  if (initial_states.empty()) throw ConfigError("protocol.initial_states must not be empty");
  std::set<InitialState> seen(initial_states.begin(), initial_states.end());
  if (seen.size() != initial_states.size()) throw ConfigError("protocol.initial_states contains duplicates");
  std::set<double> temps(temperatures_k.begin(), temperatures_k.end());
  if (temps.size() != temperatures_k.size()) throw ConfigError("decay.temperature_k contains duplicates");
  try {
    protocol(InitialState::BareGround).validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (n_max && *n_max < 1) throw ConfigError("numerics.n_max must be at least 1");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step_ns > 0.0)) {
    throw ConfigError("numerics tolerances and max_step_ns must be positive");
  }
  if (grid.sigma_points < 1 || grid.theta_points < 1 || grid.refine_iterations < 0) {
    throw ConfigError("optimizer grids must be positive");
  }
  if (prefix.empty() || prefix.find('/') != std::string::npos) {
    throw ConfigError("output.prefix must be a non-empty file name fragment");
  }
  if (output_directory.empty()) throw ConfigError("output.directory must not be empty");
}

std::string ScenarioConfig::dump() const {
  json j;
  json sys;
  sys["f_c_ghz"] = f_c_ghz;
  sys["f_q_ghz"] = f_q_ghz;
  if (g_ghz) sys["g_ghz"] = *g_ghz;
  if (lambda) sys["lambda"] = *lambda;
  if (f_d_ghz) sys["f_d_ghz"] = *f_d_ghz;
  sys["epsilon_ghz"] = epsilon_ghz;
  sys["phi_epsilon"] = phi_epsilon;
  sys["t_d_ns"] = t_d_ns;
  sys["drive_form"] = drive_form_name(drive_form);
  j["system"] = sys;

  json dec;
  if (inv_kappa_ns) dec["inv_kappa_ns"] = *inv_kappa_ns;
  if (q_factor) dec["q_factor"] = *q_factor;
  dec["temperature_k"] = temperatures_k;
  dec["variant"] = to_string(variant);
  dec["purcell_formula"] = to_string(purcell_formula);
  dec["purcell_scaling"] = to_string(purcell_scaling);
  j["decay"] = dec;

  json states = json::array();
  for (auto s : initial_states) states.push_back(to_string(s));
  j["protocol"] = {{"initial_states", states}, {"t_end_ns", t_end()}, {"sample_dt_ns", sample_dt_ns}};
  j["numerics"] = {{"n_max", resolved_n_max()},
                   {"rel_tol", rel_tol},
                   {"abs_tol", abs_tol},
                   {"max_step_ns", max_step_ns},
                   {"grid_sigma", grid.sigma_points},
                   {"grid_theta", grid.theta_points},
                   {"refine_iterations", grid.refine_iterations}};
  j["output"] = {{"directory", output_directory}, {"prefix", prefix}};

  const SystemParams p = system();
  const double q = quality_factor();
  j["derived"] = {{"omega_c", p.omega_c},
                  {"omega_q", p.omega_q},
                  {"g", p.g},
                  {"omega_d", p.omega_d},
                  {"epsilon_abs", p.epsilon_abs},
                  {"delta", p.delta()},
                  {"lambda", p.lambda()},
                  {"chi", p.chi()},
                  {"omega_g", p.omega_g()},
                  {"omega_e", p.omega_e()},
                  {"omega_g_prime", p.omega_g_prime()},
                  {"omega_e_prime", p.omega_e_prime()},
                  {"q_factor", q},
                  {"kappa", p.omega_c / q},
                  {"gamma_p", purcell_rate(p, q, purcell_formula)},
                  {"max_drive_amplitude", max_drive_amplitude(p)},
                  {"dimension", 2 * (resolved_n_max() + 1)}};
  return j.dump(2);
}

Branch tracked_branch(InitialState s) { return s == InitialState::BareGround ? Branch::G : Branch::E; }

std::string_view csv_header() { return "t_ns,n_cav,purity,F,F_C_analytic,F_C_opt,sigma_opt,theta_opt"; }

void write_csv(const std::filesystem::path& path, const std::vector<FeedbackRow>& rows) {
  std::string text(csv_header());
  text += '\n';
  for (const auto& r : rows) {
    text += fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", r.t, r.n_cav, r.purity,
                        r.f, r.f_c_analytic, r.f_c_opt, r.sigma_opt, r.theta_opt);
  }
  write_text(path, text);
}

TrajectoryOutput simulate_one(const ScenarioConfig& config, InitialState state, double temperature_k) {
  const SystemParams p = config.system();
  const HilbertSpace space(config.resolved_n_max());
  const EigenLadder ladder = eigenladder(space, p);
  const DecayModel model = make_decay_model(ladder, p, config.decay(temperature_k));
  const Protocol protocol = config.protocol(state);
  const StateVector psi0 = initial_state(ladder, state);
  const Trajectory traj =
      integrate_from(p, ladder, psi0.vector() * psi0.vector().adjoint(), protocol, &model, config.integrator());

  TrajectoryOutput out;
  out.initial_state = state;
  out.temperature_k = temperature_k;
  out.rows = annotate(traj, tracked_branch(state), p, model.kappa, protocol.t_d, config.grid);
  for (const auto& r : out.rows) {
    out.min_purity = std::min(out.min_purity, r.purity);
    out.max_n_cav = std::max(out.max_n_cav, r.n_cav);
  }
  out.max_trace_error = traj.max_trace_error();
  out.max_hermiticity_error = traj.max_hermiticity_error();
  out.min_eigenvalue = traj.min_eigenvalue();
  out.stats = traj.stats;
  return out;
}

RunRecord run_simulate(const ScenarioConfig& config, const std::string& label) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir(config.output_directory);
  ensure_directory(dir);

  std::vector<std::future<TrajectoryOutput>> jobs;
  for (auto state : config.initial_states) {
    for (double t : config.temperatures_k) {
      jobs.push_back(std::async(std::launch::async, [&config, state, t] { return simulate_one(config, state, t); }));
    }
  }

  RunRecord record;
  record.label = label;
  record.code_version = std::string(version());
  record.resolved_config = config.dump();
  for (auto& job : jobs) record.outputs.push_back(job.get());

  for (auto& out : record.outputs) {
    out.csv_path = dir / fmt::format("{}_{}_T{}.csv", config.prefix, to_string(out.initial_state),
                                     temperature_tag(out.temperature_k));
    write_csv(out.csv_path, out.rows);
  }

  const SystemParams p = config.system();
  double peak = 0.0;
  for (const auto& out : record.outputs) peak = std::max(peak, out.max_n_cav);
  const int photons = std::max(1, static_cast<int>(std::ceil(peak)));
  const ValidityHorizon h = validity_horizon(p, photons);
  const double span = config.t_end();
  record.advisories.push_back(fmt::format("cavity-decay validity horizon {:.4g} ns for N = {} photons (simulated span {:g} ns)",
                                          h.cavity_ns, photons, span));
  if (config.variant == Variant::Unfiltered) {
    record.advisories.push_back(fmt::format("Purcell validity horizon {:.4g} ns for N = {} photons (simulated span {:g} ns)",
                                            h.purcell_ns, photons, span));
  }
  if (span > h.cavity_ns) record.advisories.push_back("simulated span exceeds the cavity-decay validity horizon");
  if (config.variant == Variant::Unfiltered && span > h.purcell_ns) {
    record.advisories.push_back("simulated span exceeds the Purcell validity horizon");
  }
  {
    const EigenLadder ladder = eigenladder(HilbertSpace(config.resolved_n_max()), p);
    for (auto& w : decay_operators(ladder, p).warnings) record.advisories.push_back(std::move(w));
  }

  record.resolved_path = dir / fmt::format("{}_resolved.json", config.prefix);
  write_text(record.resolved_path, record.resolved_config + "\n");

  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json outputs = json::array();
  for (const auto& out : record.outputs) {
    outputs.push_back({{"initial_state", to_string(out.initial_state)},
                       {"temperature_k", out.temperature_k},
                       {"csv", out.csv_path.string()},
                       {"samples", out.rows.size()},
                       {"min_purity", out.min_purity},
                       {"max_n_cav", out.max_n_cav},
                       {"max_trace_error", out.max_trace_error},
                       {"max_hermiticity_error", out.max_hermiticity_error},
                       {"min_eigenvalue", out.min_eigenvalue},
                       {"steps_accepted", out.stats.accepted},
                       {"steps_rejected", out.stats.rejected},
                       {"rhs_evaluations", out.stats.rhs_evaluations}});
  }
  json rec{{"code_version", record.code_version},
           {"wall_seconds", record.wall_seconds},
           {"resolved_config", json::parse(record.resolved_config)},
           {"resolved_config_path", record.resolved_path.string()},
           {"outputs", outputs},
           {"advisories", record.advisories}};
  if (!label.empty()) rec["label"] = label;
  record.record_path = dir / fmt::format("{}_record.json", config.prefix);
  write_text(record.record_path, rec.dump(2) + "\n");
  return record;
}

int SweepRecord::exit_code() const {
  for (const auto& e : entries) {
    if (e.exit_code != 0) return e.exit_code;
  }
  return 0;
}

std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> values;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("sweep value list contains an empty entry");
    const auto last = item.find_last_not_of(" \t");
    const std::string trimmed = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(trimmed, &used);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("sweep value '{}' is not a number", trimmed));
    }
    if (used != trimmed.size() || !std::isfinite(v)) {
      throw ConfigError(fmt::format("sweep value '{}' is not a finite number", trimmed));
    }
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("sweep value list is empty");
  return values;
}

namespace {

ScenarioConfig with_parameter(const ScenarioConfig& base, const std::string& parameter, double value) {
  const auto dot = parameter.find('.');
  if (dot == std::string::npos || parameter.find('.', dot + 1) != std::string::npos) {
    throw ConfigError(fmt::format("sweep parameter '{}' must have the form section.key", parameter));
  }
  const std::string section = parameter.substr(0, dot);
  const std::string key = parameter.substr(dot + 1);
  if (!kKeys.contains(section) || !kKeys.at(section).contains(key)) {
    throw ConfigError(fmt::format("sweep parameter '{}' is not a configuration field", parameter));
  }
  json j = json::parse(base.dump());
  j.erase("derived");
  json& sec = j[section];
  if (sec.contains(key) && !sec.at(key).is_number() && !sec.at(key).is_array()) {
    throw ConfigError(fmt::format("sweep parameter '{}' is not a scalar numeric field", parameter));
  }
  if (sec.contains(key) && sec.at(key).is_array() && key != "temperature_k") {
    throw ConfigError(fmt::format("sweep parameter '{}' is not a scalar numeric field", parameter));
  }
  static const std::map<std::string, std::string> partner{{"g_ghz", "lambda"},
                                                          {"lambda", "g_ghz"},
                                                          {"inv_kappa_ns", "q_factor"},
                                                          {"q_factor", "inv_kappa_ns"}};
  if (partner.contains(key)) sec.erase(partner.at(key));
  const std::set<std::string> integral{"n_max", "grid_sigma", "grid_theta", "refine_iterations"};
  if (integral.contains(key)) {
    if (value != std::floor(value)) throw ConfigError(fmt::format("sweep parameter '{}' needs integer values", parameter));
    sec[key] = static_cast<int>(value);
  } else {
    sec[key] = value;
  }
  // A changed drive or duration changes the default cutoff and end time.
  if (section == "system" && !base.n_max) j["numerics"].erase("n_max");
  if (key == "t_d_ns" && !base.t_end_ns) j["protocol"].erase("t_end_ns");
  return ScenarioConfig::parse(j.dump());
}

}  // namespace

SweepRecord run_sweep(const ScenarioConfig& config, const std::string& parameter, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep value list is empty");
  config.validate();
  std::vector<ScenarioConfig> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig c = with_parameter(config, parameter, values[i]);
    c.output_directory = (std::filesystem::path(config.output_directory) / fmt::format("sweep_{:03d}", i)).string();
    configs.push_back(std::move(c));
  }
  ensure_directory(config.output_directory);

  std::vector<std::future<RunRecord>> jobs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string label = fmt::format("{} = {:.12g}", parameter, values[i]);
    jobs.push_back(std::async(std::launch::async, [&configs, i, label] { return run_simulate(configs[i], label); }));
  }

  SweepRecord sweep;
  sweep.parameter = parameter;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    SweepEntry entry;
    entry.value = values[i];
    try {
      entry.record = jobs[i].get();
      entry.status = "ok";
    } catch (const Error& e) {
      entry.status = e.what();
      entry.exit_code = static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
      entry.status = e.what();
      entry.exit_code = static_cast<int>(ExitCode::NumericalGuard);
    }
    sweep.entries.push_back(std::move(entry));
  }

  std::string text = "value,initial_state,temperature_k,status,final_F,final_F_C_opt,max_n_cav\n";
  auto quote = [](std::string s) {
    for (auto& ch : s) {
      if (ch == '"') ch = '\'';
      if (ch == '\n') ch = ' ';
    }
    return "\"" + s + "\"";
  };
  for (const auto& e : sweep.entries) {
    if (e.exit_code != 0) {
      text += fmt::format("{:.12g},,,{},,,\n", e.value, quote(e.status));
      continue;
    }
    for (const auto& out : e.record.outputs) {
      const auto& last = out.rows.back();
      text += fmt::format("{:.12g},{},{:.12g},ok,{:.12g},{:.12g},{:.12g}\n", e.value, to_string(out.initial_state),
                          out.temperature_k, last.f, last.f_c_opt, out.max_n_cav);
    }
  }
  sweep.summary_path = std::filesystem::path(config.output_directory) / fmt::format("{}_sweep_summary.csv", config.prefix);
  write_text(sweep.summary_path, text);
  return sweep;
}

}  // namespace dispread
