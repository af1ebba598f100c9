#pragma once

#include <string_view>

#include "dispread/hilbert.hpp"

namespace dispread {

/// Dressed branch: G is |g,n⟩-dominant, E is |e,n−1⟩-dominant.
enum class Branch { G, E };

[[nodiscard]] std::string_view to_string(Branch b);

/// A dressed coherent amplitude with its branch, drive duration and decay time.
struct DressedAmplitude {
  cplx alpha{0.0, 0.0};
  Branch branch = Branch::G;
  double t_d = 0.0;
  double tau = 0.0;
};

/// First-order dressed eigenstate. Branch E is indexed by total excitation n ≥ 1.
///
/// (G, n): cos(λ√n)|g,n⟩ − sin(λ√n)|e,n−1⟩.
/// (E, n): cos(λ√n)|e,n−1⟩ + sin(λ√n)|g,n⟩.
StateVector dressed_eigenstate(const HilbertSpace& space, double lambda, Branch branch, int n);

/// Truncated dressed coherent sum before renormalization.
Vector dressed_coherent_vector(const HilbertSpace& space, double lambda, Branch branch, cplx alpha);

/// e^{−|α|²/2} Σ αⁿ/√n! |branch, n⟩ renormalized after truncation.
///
/// Throws InvalidArgument unless |α|² + 5|α| < n_max.
StateVector dressed_coherent_state(const HilbertSpace& space, double lambda, Branch branch, cplx alpha);

/// Bare coherent state of the cavity as Fock amplitudes 0..n_max, renormalized.
Eigen::VectorXcd coherent_amplitudes(int n_max, cplx alpha);

/// Coherent amplitude after a resonant drive of duration t_d. Requires ω_d = ω_c.
cplx drive_amplitude(const SystemParams& p, Branch branch, double t_d);

/// drive_amplitude packaged with its branch and t_d, at τ = 0.
DressedAmplitude dressed_amplitude(const SystemParams& p, Branch branch, double t_d);

/// α·e^{−κτ/2}·e^{−iω'τ} with ω' = ω_c ∓ χ for branch G / E.
cplx decayed_amplitude(const DressedAmplitude& amp, double kappa, double tau, const SystemParams& p);

/// Signed drive envelope (2|ε|/χ)·sin(χ t_d/2).
double drive_envelope(const SystemParams& p, double t_d);

/// Qubit state that |g⟩ (branch G) or |e⟩ (branch E) is mapped to after driving for t_d and decaying for τ.
///
/// Components are ordered (g, e).
QubitVector first_order_qubit_map(Branch branch, const SystemParams& p, double t_d, double kappa, double tau);

/// Product approximation (|g⟩ − λα_g|e⟩)⊗|α_g⟩ or (|e⟩ + λα_e*|g⟩)⊗|α_e⟩, normalized.
StateVector first_order_product_state(const HilbertSpace& space, const SystemParams& p, Branch branch, double t_d);

/// U_D = exp{λ(σ⁺a − σ⁻a†)}.
Operator dispersive_transform(const HilbertSpace& space, double lambda);

/// State reached from |e,0⟩ after a resonant drive of duration t_d.
///
/// cos(λ)·|E, α_e(t_d)⟩ − e^{iG} sin(λ)·U_D†|g⟩ e^{−i(ω_c − χ)a†a t_d} D(α'_g)|1⟩, normalized, where the
/// relative phase G is a free parameter.
StateVector undressed_excited_state(const HilbertSpace& space, const SystemParams& p, double t_d,
                                    double relative_phase = 0.0);

}  // namespace dispread
