#pragma once

#include <cstddef>
#include <vector>

#include "dispread/dressed.hpp"
#include "dispread/evolve.hpp"

namespace dispread {

/// Rotation angle θ ∈ [0, π/2) and axis phase Σ ∈ [0, 2π) of a qubit correction.
struct CorrectionParams {
  double theta = 0.0;
  double sigma = 0.0;
  Branch branch = Branch::G;
};

struct OptimizationResult {
  double sigma_star = 0.0;
  double theta_star = 0.0;
  double fidelity_at_optimum = 0.0;
  std::size_t grid_points_evaluated = 0;
};

/// Wraps an angle into [0, 2π).
double wrap_phase(double x);

/// θ = arctan(λ|α(t_d)|e^{−κτ/2}) with Σ from the first-order map phases.
CorrectionParams analytic_correction(Branch branch, const SystemParams& p, double kappa, double t_d, double tau);

/// exp{i(cosΣ σ_y − sinΣ σ_x)θ} with σ_x = σ⁺ + σ⁻ and σ_y = −i(σ⁺ − σ⁻), in (g, e) order.
Qubit2 correction_unitary(const CorrectionParams& cp);

/// ⟨ν|ρ|ν⟩ with ν = g for branch G and e for branch E.
double fidelity_uncorrected(const Qubit2& rho, Branch branch);

/// ⟨ν|UρU†|ν⟩.
double fidelity_corrected(const Qubit2& rho, Branch branch, const CorrectionParams& cp);

struct OptimizerGrid {
  int sigma_points = 720;
  int theta_points = 16;
  int refine_iterations = 20;
};

/// Grid search over Σ ∈ {2πk/N_Σ} and θ ∈ {0} ∪ {1.5·θ_a·i/(N_θ − 1)}, then golden-section refinement in Σ.
///
/// Ties, meaning improvements below 1e-14, go to the smaller θ, then the smaller Σ. The identity is always a candidate.
OptimizationResult optimize_correction(const Qubit2& rho, Branch branch, const CorrectionParams& analytic,
                                       const OptimizerGrid& grid = {});

/// Per-sample feedback record of a trajectory.
struct FeedbackRow {
  double t = 0.0;
  double n_cav = 0.0;
  double purity = 0.0;
  double f = 0.0;
  double f_c_analytic = 0.0;
  double f_c_opt = 0.0;
  double sigma_opt = 0.0;
  double theta_opt = 0.0;
};

/// Computes uncorrected, analytic-corrected and optimized fidelities at every sample.
///
/// Before t_d the analytic correction uses the elapsed drive time and τ = 0.
std::vector<FeedbackRow> annotate(const Trajectory& traj, Branch branch, const SystemParams& p, double kappa,
                                  double t_d, const OptimizerGrid& grid = {});

}  // namespace dispread
