#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dispread/dopri5.hpp"
#include "dispread/hilbert.hpp"
#include "dispread/lindblad.hpp"

namespace dispread {

enum class InitialState { BareGround, DressedExcited, BareExcited };

[[nodiscard]] std::string_view to_string(InitialState s);

/// Drive-then-decay schedule: the drive is on for 0 ≤ t < t_d and samples are taken every sample_dt up to t_end.
struct Protocol {
  InitialState initial_state = InitialState::BareGround;
  double t_d = 0.0;
  double t_end = 0.0;
  double sample_dt = 1.0;

  /// Drive for p.t_d, decay for 500 ns, sample every ns.
  static Protocol standard(const SystemParams& p, InitialState initial);
  /// Throws InvalidArgument unless 0 ≤ t_d ≤ t_end and sample_dt > 0.
  void validate() const;
  [[nodiscard]] std::vector<double> sample_times() const;
};

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 1.0;
  DriveForm drive_form = DriveForm::Rwa;
  /// Store the lab-frame density matrix at every sample.
  bool keep_states = false;
  /// Compute the smallest eigenvalue of ρ at every sample.
  bool check_positivity = true;
  /// Largest tolerated population of the two highest Fock levels.
  double cutoff_guard = 1e-6;
};

/// Observables of one sample point. The qubit state is the lab-frame reduced state in (g, e) order.
struct Sample {
  double t = 0.0;
  double n_cav = 0.0;
  Qubit2 qubit = Qubit2::Zero();
  /// Populations of the Jaynes-Cummings eigenstates in ladder order.
  Eigen::VectorXd level_populations;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double top_fock_population = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Sample> samples;
  /// Lab-frame density matrices, filled only when IntegratorOptions::keep_states is set.
  std::vector<Matrix> states;
  std::vector<LevelLabel> labels;
  Dopri5::Stats stats;

  [[nodiscard]] std::size_t size() const { return samples.size(); }
  /// Total population of one dressed branch at sample i.
  [[nodiscard]] double branch_population(std::size_t i, Branch branch) const;
  /// Population of the eigenstate carrying `label` at sample i.
  [[nodiscard]] double level_population(std::size_t i, LevelLabel label) const;
  [[nodiscard]] double max_trace_error() const;
  [[nodiscard]] double max_hermiticity_error() const;
  [[nodiscard]] double min_eigenvalue() const;
};

/// Initial state on the ladder's space. DressedExcited is the eigenvector labelled (E, 1).
StateVector initial_state(const EigenLadder& ladder, InitialState s);

/// Integrates the master equation of `model`, or closed von Neumann dynamics when model is null.
///
/// Throws CutoffError if the top two Fock levels exceed the guard and IntegrationError if the
/// integrator fails.
Trajectory integrate(const SystemParams& p, const HilbertSpace& space, const Protocol& protocol,
                     const DecayModel* model, const IntegratorOptions& options = {});

/// As integrate, starting from an arbitrary lab-frame density matrix instead of protocol.initial_state.
Trajectory integrate_from(const SystemParams& p, const EigenLadder& ladder, const Matrix& rho0,
                          const Protocol& protocol, const DecayModel* model, const IntegratorOptions& options = {});

/// Closed-system Schrödinger integration of a pure state.
Trajectory integrate_pure(const SystemParams& p, const HilbertSpace& space, const Protocol& protocol,
                          const IntegratorOptions& options = {});

/// Schrödinger integration from an arbitrary lab-frame state. Returns the final lab-frame state.
StateVector evolve_pure_state(const SystemParams& p, const EigenLadder& ladder, const StateVector& psi0,
                              double t_end, const IntegratorOptions& options = {});

/// Qubit reduced state Tr_cavity ρ in (g, e) order.
Qubit2 partial_trace_cavity(const DensityMatrix& rho);
Qubit2 partial_trace_cavity(const HilbertSpace& space, const Matrix& rho);

/// Tr[a†a ρ].
double cavity_occupation(const DensityMatrix& rho);
double cavity_occupation(const HilbertSpace& space, const Matrix& rho);

/// Tr[ρ²] of a qubit state.
double purity(const Qubit2& rho);

}  // namespace dispread
