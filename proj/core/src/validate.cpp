#include "dispread/validate.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dispread/dressed.hpp"
#include "dispread/evolve.hpp"
#include "dispread/feedback.hpp"
#include "dispread/lindblad.hpp"

namespace dispread {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> registered_checks() {
  return {"thermal_occupation",      "dressed_state_formation", "excited_drive_ground_weight",    "purity_floor_cold",
          "correction_dominance_cold", "decay_law",             "steady_state_cold",   "purity_floor_hot",
          "hot_crossover",           "purcell_filter_contrast",     "structural_invariants", "suite_runtime"};
}

std::string format_check(const CheckResult& r) {
  std::string line = fmt::format("[{}] {}: measured {:.6g} (tolerance: {})", r.passed ? "PASS" : "FAIL", r.name,
                                 r.measured, r.tolerance);
  if (!r.detail.empty()) line += " | " + r.detail;
  return line;
}

namespace {

struct Diagnostics {
  double trace = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();

  void add(const Trajectory& t) {
    trace = std::max(trace, t.max_trace_error());
    hermiticity = std::max(hermiticity, t.max_hermiticity_error());
    min_eigenvalue = std::min(min_eigenvalue, t.min_eigenvalue());
  }
};

/// Least-squares slope of log(y) against t.
double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  return (dn * sty - st * sy) / (dn * stt - st * st);
}

/// Delay after t_d from which F_C_analytic < F holds at every later sample, or NaN if never.
double crossover_delay(const std::vector<FeedbackRow>& rows, double t_d) {
  std::size_t first_good = rows.size();
  for (std::size_t i = rows.size(); i-- > 0;) {
    if (rows[i].t <= t_d) break;
    if (rows[i].f_c_analytic < rows[i].f) {
      first_good = i;
    } else {
      break;
    }
  }
  if (first_good == rows.size()) return std::numeric_limits<double>::quiet_NaN();
  return rows[first_good].t - t_d;
}

struct Runner {
  ValidationOptions options;
  const std::function<void(const CheckResult&)>& progress;
  ValidationReport report;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void emit(CheckResult r) {
    if (progress) progress(r);
    report.checks.push_back(std::move(r));
  }
};

}  // namespace

ValidationReport run_validation(const ValidationOptions& options,
                                const std::function<void(const CheckResult&)>& progress) {
  Runner run{options, progress, {}};
  const SystemParams p = SystemParams::defaults();
  const double lambda = p.lambda();
  const double l2 = lambda * lambda;
  const HilbertSpace space(default_n_max(p));
  const EigenLadder ladder = eigenladder(space, p);
  const double q_factor = p.omega_c * 100.0;
  const double kappa = p.omega_c / q_factor;

  IntegratorOptions integ;
  OptimizerGrid grid;
  if (options.fast) {
    integ.rel_tol = 1e-6;
    integ.abs_tol = 1e-8;
    grid.sigma_points = 360;
    grid.theta_points = 8;
  }
  Diagnostics diag;

  {
    const double n = bose_occupation(kTwoPi * 5.0, 0.1);
    run.emit({"thermal_occupation", std::abs(n - 0.100) <= 0.001, n, "0.100 +/- 0.001",
              "Bose occupation at 5 GHz and 100 mK"});
  }

  {
    IntegratorOptions closed;
    closed.rel_tol = 1e-10;
    closed.abs_tol = 1e-12;
    closed.keep_states = true;
    const Protocol drive{InitialState::BareGround, p.t_d, p.t_d, p.t_d};
    const Trajectory g = integrate_pure(p, space, drive, closed);
    const StateVector target = dressed_coherent_state(space, lambda, Branch::G, drive_amplitude(p, Branch::G, p.t_d));
    const double f = DensityMatrix(space, g.states.back()).fidelity(target);
    run.emit({"dressed_state_formation", f >= 1.0 - 5.0 * l2, f, fmt::format(">= {:.4g}", 1.0 - 5.0 * l2),
              fmt::format("closed drive from |g,0> for {} ns, |alpha| = {:.4f}", p.t_d,
                          std::abs(drive_amplitude(p, Branch::G, p.t_d)))});

    const Protocol drive_e{InitialState::BareExcited, p.t_d, p.t_d, p.t_d};
    const Trajectory e = integrate_pure(p, space, drive_e, closed);
    const double w = e.branch_population(e.size() - 1, Branch::G);
    const double expected = std::pow(std::sin(lambda), 2);
    run.emit({"excited_drive_ground_weight", std::abs(w - expected) <= 5e-4, w, fmt::format("{:.5f} +/- 0.0005", expected),
              fmt::format("ground-branch weight after driving |e,0>; at t = 0 it is {:.5f}",
                          e.branch_population(0, Branch::G))});
    diag.trace = std::max({diag.trace, g.max_trace_error(), e.max_trace_error()});
    diag.hermiticity = std::max({diag.hermiticity, g.max_hermiticity_error(), e.max_hermiticity_error()});
  }

  auto model_for = [&](double temperature, Variant variant, bool fault) {
    DecayModel m = make_decay_model(ladder, p, {q_factor, temperature, variant});
    if (fault) m.a_c = Operator(space, Matrix::Zero(space.dim(), space.dim()));
    return m;
  };
  const std::array<InitialState, 2> starts{InitialState::BareGround, InitialState::DressedExcited};
  const double t_protocol = p.t_d + 500.0;

  struct Run {
    Trajectory traj;
    std::vector<FeedbackRow> rows;
  };
  auto simulate = [&](InitialState s, const DecayModel& model, double t_end) {
    Run r;
    r.traj = integrate(p, space, {s, p.t_d, t_end, 1.0}, &model, integ);
    r.rows = annotate(r.traj, s == InitialState::BareGround ? Branch::G : Branch::E, p, model.kappa, p.t_d, grid);
    diag.add(r.traj);
    return r;
  };

  std::array<Run, 2> cold;
  {
    const DecayModel model = model_for(0.0, Variant::Filtered, options.zero_cavity_decay);
    const double t_long = p.t_d + 10.0 / kappa;
    for (int i = 0; i < 2; ++i) cold[i] = simulate(starts[i], model, t_long);

    double min_p[2] = {1.0, 1.0};
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
      for (const auto& row : cold[i].rows) {
        if (row.t > t_protocol) break;
        min_p[i] = std::min(min_p[i], row.purity);
        worst_gap = std::min(worst_gap, row.f_c_opt - row.f);
      }
    }
    const double mp = std::min(min_p[0], min_p[1]);
    run.emit({"purity_floor_cold", mp >= 0.98, mp, ">= 0.98",
              fmt::format("min purity G start {:.5f}, E start {:.5f}", min_p[0], min_p[1])});
    run.emit({"correction_dominance_cold", worst_gap >= -1e-9, worst_gap, "min(F_C_opt - F) >= -1e-9",
              "both starts, every sample up to t_d + 500 ns"});

    std::vector<double> ts, ns;
    for (const auto& row : cold[0].rows) {
      if (row.t > p.t_d && row.t <= t_protocol) {
        ts.push_back(row.t);
        ns.push_back(row.n_cav);
      }
    }
    const double k_fit = -log_slope(ts, ns);
    const double rel = std::abs(k_fit / kappa - 1.0);
    run.emit({"decay_law", rel <= 0.02, k_fit, fmt::format("{:.6g} /ns within 2%", kappa),
              fmt::format("relative deviation {:.4f} from the post-drive fit of n_cav", rel)});

    const std::size_t last = cold[0].traj.size() - 1;
    const double f_g = cold[0].traj.level_population(last, {Branch::G, 0});
    const double f_e = cold[1].traj.level_population(last, {Branch::E, 1});
    const double fs = std::min(f_g, f_e);
    run.emit({"steady_state_cold", fs >= 0.999, fs, ">= 0.999",
              fmt::format("at t_d + 10/kappa: |g,0> population {:.6f} (G start), dressed (E,1) population {:.6f} (E start)",
                          f_g, f_e),
              false});
  }

  {
    const DecayModel model = model_for(0.1, Variant::Filtered, false);
    std::array<Run, 2> hot;
    for (int i = 0; i < 2; ++i) hot[i] = simulate(starts[i], model, t_protocol);
    double min_p[2] = {1.0, 1.0};
    for (int i = 0; i < 2; ++i) {
      for (const auto& row : hot[i].rows) min_p[i] = std::min(min_p[i], row.purity);
    }
    const double mp = std::min(min_p[0], min_p[1]);
    run.emit({"purity_floor_hot", mp >= 0.90, mp, ">= 0.90",
              fmt::format("min purity G start {:.5f}, E start {:.5f}", min_p[0], min_p[1])});

    const double c_g = crossover_delay(hot[0].rows, p.t_d);
    const double c_e = crossover_delay(hot[1].rows, p.t_d);
    auto in_window = [](double c) { return std::isfinite(c) && c >= 40.0 && c <= 120.0; };
    const bool ok = in_window(c_g) && in_window(c_e);
    const double worst = std::isfinite(c_g) && std::isfinite(c_e) ? std::max(c_g, c_e)
                                                                 : std::numeric_limits<double>::quiet_NaN();
    run.emit({"hot_crossover", ok, worst, "crossover delay in [40, 120] ns for both starts",
              fmt::format("analytic correction worse than none from {} ns (G) and {} ns (E) after drive-off", c_g, c_e)});
  }

  {
    const DecayModel unf = model_for(0.0, Variant::Unfiltered, false);
    const Run g = simulate(InitialState::BareGround, unf, t_protocol);
    const Run e = simulate(InitialState::DressedExcited, unf, t_protocol);
    double df = 0.0;
    for (std::size_t i = 0; i < g.rows.size() && i < cold[0].rows.size(); ++i) {
      if (options.zero_cavity_decay) break;
      df = std::max(df, std::abs(g.rows[i].f - cold[0].rows[i].f));
    }
    if (options.zero_cavity_decay) df = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> ts, pe, pe_filtered;
    for (std::size_t i = 0; i < e.traj.size(); ++i) {
      if (e.traj.times[i] <= p.t_d) continue;
      ts.push_back(e.traj.times[i]);
      pe.push_back(e.traj.branch_population(i, Branch::E));
      pe_filtered.push_back(cold[1].traj.branch_population(i, Branch::E));
    }
    const double rate = -log_slope(ts, pe);
    const double rate_filtered = -log_slope(ts, pe_filtered);
    const double ratio = rate / unf.gamma_p;
    const bool ok = ratio >= 0.75 && ratio <= 1.25 && df <= 1e-3;
    run.emit({"purcell_filter_contrast", ok, ratio, "E-branch decay rate within 25% of gamma_P; G-start |dF| <= 1e-3",
              fmt::format("unfiltered E-branch rate {:.4g} /ns vs gamma_P {:.4g} /ns (filtered {:.3g} /ns); "
                          "max |F_unfiltered - F_filtered| for the G start {:.3g}",
                          rate, unf.gamma_p, rate_filtered, df)});
  }

  {
    const DecayOperators ops = decay_operators(ladder, p);
    const auto lo = ladder_ops(space);
    const double residual = (ops.a_c.matrix() + ops.a_p.matrix() - lo.a.matrix()).cwiseAbs().maxCoeff();

    double worst_round_trip = 1.0;
    for (Branch b : {Branch::G, Branch::E}) {
      for (double eps : {0.01, 0.04, 0.1}) {
        SystemParams q = p;
        q.epsilon_abs = kTwoPi * eps;
        for (double td : {5.0, 20.0, 37.0, 80.0}) {
          for (double tau : {0.0, 30.0, 150.0}) {
            const QubitVector psi = first_order_qubit_map(b, q, td, kappa, tau);
            const CorrectionParams cp = analytic_correction(b, q, kappa, td, tau);
            const QubitVector out = correction_unitary(cp) * psi;
            worst_round_trip = std::min(worst_round_trip, std::norm(out(b == Branch::G ? 0 : 1)));
          }
        }
      }
    }
    const bool ok = diag.trace < 1e-8 && diag.hermiticity < 1e-10 && diag.min_eigenvalue >= -1e-6 &&
                    residual <= 10.0 * l2 && 1.0 - worst_round_trip <= 1e-10;
    run.emit({"structural_invariants", ok, diag.min_eigenvalue,
              "trace < 1e-8, hermiticity < 1e-10, min eigenvalue >= -1e-6, residual <= 0.1, round trip within 1e-10",
              fmt::format("trace drift {:.3g}, hermiticity drift {:.3g}, min eigenvalue {:.3g}, "
                          "max|a_C + a_P - a| {:.4g}, largest dropped |C| {:.3g}, round-trip fidelity deficit {:.3g}",
                          diag.trace, diag.hermiticity, diag.min_eigenvalue, residual, ops.max_dropped, 1.0 - worst_round_trip)});
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
  run.emit({"suite_runtime", elapsed < 900.0, elapsed, "< 900 s",
            fmt::format("n_max = {}, dimension {}", space.n_max(), space.dim())});
  run.report.seconds = elapsed;
  return run.report;
}

}  // namespace dispread
