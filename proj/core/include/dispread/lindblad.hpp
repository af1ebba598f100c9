#pragma once

#include <string>
#include <vector>

#include "dispread/dressed.hpp"
#include "dispread/hilbert.hpp"

namespace dispread {

/// 1/(e^{ħω/k_BT} − 1) for ω in rad/ns and T in K; exactly 0 at T = 0.
double bose_occupation(double omega, double temperature);

/// Branch and ladder index of a Jaynes-Cummings eigenvector.
struct LevelLabel {
  Branch branch = Branch::G;
  int n = 0;
  friend bool operator==(const LevelLabel&, const LevelLabel&) = default;
};

/// Eigen-decomposition of the Jaynes-Cummings Hamiltonian sorted by increasing energy.
///
/// Column j of `vectors` is the eigenvector with energy `energies(j)`, total excitation
/// `excitations[j]` and label `labels[j]`. Bare |g,n⟩-dominant levels are (G, n); bare
/// |e,n−1⟩-dominant levels are (E, n).
struct EigenLadder {
  HilbertSpace space{0};
  Eigen::VectorXd energies;
  Matrix vectors;
  std::vector<LevelLabel> labels;
  std::vector<int> excitations;

  [[nodiscard]] int size() const { return static_cast<int>(labels.size()); }
  /// Position of a label in the ladder. Throws InvalidArgument if absent.
  [[nodiscard]] int position(LevelLabel label) const;
  [[nodiscard]] StateVector state(int j) const;
  /// ρ expressed in the eigenbasis, V†ρV.
  [[nodiscard]] Matrix to_eigenbasis(const Matrix& bare) const;
  /// Total population of one branch for a bare-basis density matrix.
  [[nodiscard]] double branch_population(const Matrix& rho, Branch branch) const;
};

/// Diagonalizes jc_hamiltonian sector by sector and labels each level by its dominant bare state.
///
/// Throws LabelingError when the largest squared bare overlap of some level is below 0.7
/// or two levels claim the same label.
EigenLadder eigenladder(const HilbertSpace& space, const SystemParams& p);

/// C_jk = ⟨j|(a + a†)|k⟩ in ladder order.
Matrix transition_elements(const EigenLadder& ladder);

enum class TransitionClass { Cavity, Purcell, Other };

/// Cavity: same branch with adjacent index. Purcell: (G, n) with (E, n+1).
TransitionClass classify(LevelLabel a, LevelLabel b);

struct DecayOperators {
  Operator a_c;
  Operator a_p;
  /// Largest |C_jk| among energy-lowering pairs outside both classes.
  double max_dropped = 0.0;
  std::vector<std::string> warnings;
};

/// a_C and a_P in the bare basis, built from energy-lowering pairs of each class.
DecayOperators decay_operators(const EigenLadder& ladder, const SystemParams& p);

enum class Variant { Filtered, Unfiltered };
enum class PurcellFormula { BareQubit, ShiftedQubit };
/// How the Purcell dissipator is weighted.
///
/// SpectralDensity multiplies D[a_P] by the bath spectral density ω_q/Q_F so that the
/// resulting qubit decay rate is γ_P. Literal multiplies D[a_P] by γ_P itself.
enum class PurcellScaling { SpectralDensity, Literal };

[[nodiscard]] std::string_view to_string(Variant v);
[[nodiscard]] std::string_view to_string(PurcellFormula f);
[[nodiscard]] std::string_view to_string(PurcellScaling s);

/// λ²ω_q/Q_F (BareQubit) or λ²(ω_q+χ)/Q_F (ShiftedQubit).
double purcell_rate(const SystemParams& p, double q_factor, PurcellFormula formula = PurcellFormula::BareQubit);

/// A Lindblad jump operator and the rate multiplying its dissipator.
struct JumpTerm {
  Operator op;
  double rate;
};

struct DecayModel {
  double q_factor = 0.0;
  double temperature = 0.0;
  double kappa = 0.0;
  double gamma_p = 0.0;
  Variant variant = Variant::Filtered;
  PurcellFormula formula = PurcellFormula::BareQubit;
  PurcellScaling scaling = PurcellScaling::SpectralDensity;
  Operator a_c;
  Operator a_p;
  double n_th_c = 0.0;
  double n_th_q = 0.0;
  /// Bath spectral density at the qubit frequency, ω_q/Q_F or (ω_q+χ)/Q_F.
  double spectral_density_q = 0.0;
  std::vector<std::string> warnings;

  /// Rate multiplying D[a_P] at zero temperature.
  [[nodiscard]] double purcell_coefficient() const;
  /// All dissipators applied by the model, skipping zero rates.
  [[nodiscard]] std::vector<JumpTerm> jump_terms() const;
};

struct DecaySettings {
  double q_factor = 0.0;
  double temperature = 0.0;
  Variant variant = Variant::Filtered;
  PurcellFormula formula = PurcellFormula::BareQubit;
  PurcellScaling scaling = PurcellScaling::SpectralDensity;
};

DecayModel make_decay_model(const EigenLadder& ladder, const SystemParams& p, const DecaySettings& settings);

/// xρx† − ½{x†x, ρ}.
Matrix dissipator(const Operator& x, const Matrix& rho);

/// Lab-frame master-equation right-hand side at time t.
Matrix me_rhs(const DecayModel& model, const SystemParams& p, const Matrix& rho, double t,
              DriveForm form = DriveForm::Rwa);

struct ValidityHorizon {
  double cavity_ns;
  double purcell_ns;
};

/// 1/(Nχλ²) and 1/(Nχ) with χ taken in cycles per ns.
ValidityHorizon validity_horizon(const SystemParams& p, int photons);

}  // namespace dispread
