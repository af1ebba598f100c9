#include "dispread/feedback.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dispread/errors.hpp"

namespace dispread {

double wrap_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

CorrectionParams analytic_correction(Branch branch, const SystemParams& p, double kappa, double t_d, double tau) {
  if (tau < 0.0) throw InvalidArgument("decay time must be non-negative");
  const double envelope = drive_envelope(p, t_d);
  const double amp = std::abs(p.lambda() * envelope) * std::exp(-0.5 * kappa * tau);
  CorrectionParams cp;
  cp.branch = branch;
  cp.theta = std::atan(amp);
  double sigma = p.phi_epsilon + 0.5 * std::numbers::pi;
  if (branch == Branch::G) {
    sigma += p.omega_g() * t_d + p.omega_g_prime() * tau;
  } else {
    sigma += p.omega_e() * t_d + p.omega_e_prime() * tau;
  }
  if (p.lambda() * envelope < 0.0) sigma += std::numbers::pi;
  cp.sigma = wrap_phase(sigma);
  return cp;
}

Qubit2 correction_unitary(const CorrectionParams& cp) {
  const double c = std::cos(cp.theta);
  const double s = std::sin(cp.theta);
  Qubit2 u;
  u << c, -s * std::polar(1.0, cp.sigma), s * std::polar(1.0, -cp.sigma), c;
  return u;
}

double fidelity_uncorrected(const Qubit2& rho, Branch branch) {
  return branch == Branch::G ? rho(0, 0).real() : rho(1, 1).real();
}

double fidelity_corrected(const Qubit2& rho, Branch branch, const CorrectionParams& cp) {
  const Qubit2 u = correction_unitary(cp);
  const int v = branch == Branch::G ? 0 : 1;
  const auto row = u.row(v);
  return (row * rho * row.adjoint())(0, 0).real();
}

namespace {

/// ⟨ν|UρU†|ν⟩ expanded in closed form for speed inside the grid search.
struct FastFidelity {
  double rgg, ree;
  cplx rge;
  int v;

  [[nodiscard]] double operator()(double theta, double sigma) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    cplx u0, u1;
    if (v == 0) {
      u0 = c;
      u1 = -s * std::polar(1.0, sigma);
    } else {
      u0 = s * std::polar(1.0, -sigma);
      u1 = c;
    }
    return std::norm(u0) * rgg + std::norm(u1) * ree + 2.0 * (std::conj(u0) * u1 * std::conj(rge)).real();
  }
};

}  // namespace

OptimizationResult optimize_correction(const Qubit2& rho, Branch branch, const CorrectionParams& analytic,
                                       const OptimizerGrid& grid) {
  if (grid.sigma_points < 1 || grid.theta_points < 1) throw InvalidArgument("optimizer grids must be non-empty");
  const FastFidelity fid{rho(0, 0).real(), rho(1, 1).real(), rho(0, 1), branch == Branch::G ? 0 : 1};

  std::vector<double> thetas{0.0};
  for (int i = 0; i < grid.theta_points; ++i) {
    const double factor = grid.theta_points == 1 ? 1.0 : 1.5 * i / (grid.theta_points - 1);
    const double th = factor * analytic.theta;
    if (th > 0.0) thetas.push_back(th);
  }

  // Improvements smaller than kTie count as ties.
  constexpr double kTie = 1e-14;
  OptimizationResult best;
  best.fidelity_at_optimum = fid(0.0, 0.0);
  best.theta_star = 0.0;
  best.sigma_star = 0.0;
  std::size_t evaluated = 1;
  for (std::size_t it = 1; it < thetas.size(); ++it) {
    for (int k = 0; k < grid.sigma_points; ++k) {
      const double sg = kTwoPi * k / grid.sigma_points;
      const double f = fid(thetas[it], sg);
      ++evaluated;
      if (f > best.fidelity_at_optimum + kTie) {
        best.fidelity_at_optimum = f;
        best.theta_star = thetas[it];
        best.sigma_star = sg;
      }
    }
  }

  if (best.theta_star > 0.0 && grid.refine_iterations > 0) {
    const double step = kTwoPi / grid.sigma_points;
    double a = best.sigma_star - step;
    double b = best.sigma_star + step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = fid(best.theta_star, x1);
    double f2 = fid(best.theta_star, x2);
    evaluated += 2;
    for (int i = 0; i < grid.refine_iterations; ++i) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = fid(best.theta_star, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = fid(best.theta_star, x2);
      }
      ++evaluated;
    }
    const double xs = f1 > f2 ? x1 : x2;
    const double fs = std::max(f1, f2);
    if (fs > best.fidelity_at_optimum + kTie) {
      best.fidelity_at_optimum = fs;
      best.sigma_star = wrap_phase(xs);
    }
  }
  best.grid_points_evaluated = evaluated;
  return best;
}

std::vector<FeedbackRow> annotate(const Trajectory& traj, Branch branch, const SystemParams& p, double kappa,
                                  double t_d, const OptimizerGrid& grid) {
  std::vector<FeedbackRow> rows;
  rows.reserve(traj.size());
  for (const auto& s : traj.samples) {
    FeedbackRow row;
    row.t = s.t;
    row.n_cav = s.n_cav;
    row.purity = purity(s.qubit);
    row.f = fidelity_uncorrected(s.qubit, branch);
    const double drive_time = std::min(s.t, t_d);
    const double tau = std::max(0.0, s.t - t_d);
    const CorrectionParams cp = analytic_correction(branch, p, kappa, drive_time, tau);
    row.f_c_analytic = fidelity_corrected(s.qubit, branch, cp);
    const OptimizationResult opt = optimize_correction(s.qubit, branch, cp, grid);
    row.f_c_opt = opt.fidelity_at_optimum;
    row.sigma_opt = opt.sigma_star;
    row.theta_opt = opt.theta_star;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dispread
