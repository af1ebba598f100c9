#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace dispread {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Qubit2 = Eigen::Matrix2cd;
using QubitVector = Eigen::Vector2cd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Reduced Planck constant over Boltzmann constant in ns·K.
inline constexpr double kHbarOverKb = 7.63823e-3;

/// Physical constants of the driven qubit-cavity model.
///
/// Angular frequencies are in rad/ns and durations in ns with ħ = 1.
struct SystemParams {
  double omega_c = 0.0;
  double omega_q = 0.0;
  double g = 0.0;
  double omega_d = 0.0;
  double epsilon_abs = 0.0;
  double phi_epsilon = 0.0;
  double t_d = 0.0;

  /// Builds parameters from ordinary frequencies given in GHz.
  static SystemParams from_ghz(double f_c, double f_q, double g_ghz, double f_d, double epsilon_ghz,
                               double phi_epsilon, double t_d);
  /// Cavity at 5 GHz, qubit at 6 GHz, g/2π = 0.1 GHz, resonant drive of 0.04 GHz for 20 ns.
  static SystemParams defaults();

  [[nodiscard]] double delta() const { return omega_q - omega_c; }
  [[nodiscard]] double lambda() const { return g / delta(); }
  [[nodiscard]] double chi() const { return g * g / delta(); }
  [[nodiscard]] double omega_g() const { return omega_c - 0.5 * chi(); }
  [[nodiscard]] double omega_e() const { return omega_c + 0.5 * chi(); }
  [[nodiscard]] double omega_g_prime() const { return omega_c - chi(); }
  [[nodiscard]] double omega_e_prime() const { return omega_c + chi(); }
  [[nodiscard]] cplx epsilon() const { return std::polar(epsilon_abs, phi_epsilon); }

  /// Throws InvalidArgument unless frequencies are positive, Δ ≠ 0 and |λ| < 1.
  void validate() const;
};

/// Truncated qubit ⊗ Fock space with index = s·(n_max+1) + n, s = 0 for |g⟩ and s = 1 for |e⟩.
class HilbertSpace {
 public:
  explicit HilbertSpace(int n_max);

  [[nodiscard]] int n_max() const { return n_max_; }
  [[nodiscard]] int levels() const { return n_max_ + 1; }
  [[nodiscard]] int dim() const { return 2 * (n_max_ + 1); }
  [[nodiscard]] int index(int qubit, int photons) const;
  [[nodiscard]] int qubit_of(int i) const { return i / levels(); }
  [[nodiscard]] int photons_of(int i) const { return i % levels(); }
  /// Photon number plus one if the qubit is excited.
  [[nodiscard]] int excitation_of(int i) const { return photons_of(i) + qubit_of(i); }

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  int n_max_;
};

HilbertSpace build_space(int n_max);

/// Dense operator bound to a HilbertSpace.
class Operator {
 public:
  /// Zero operator on the two-dimensional space with n_max = 0.
  Operator();
  Operator(const HilbertSpace& space, Matrix m);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] cplx operator()(int i, int j) const { return m_(i, j); }
  [[nodiscard]] Operator adjoint() const;
  /// Largest |A − A†| element.
  [[nodiscard]] double hermiticity_error() const;
  /// Throws NumericalError when hermiticity_error() exceeds tol.
  void assert_hermitian(double tol = 1e-12) const;

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, const Operator& a);

 private:
  HilbertSpace space_;
  Matrix m_;
};

/// Normalized pure state on a HilbertSpace.
class StateVector {
 public:
  /// Throws InvalidArgument unless the norm is 1 within 1e-10.
  StateVector(const HilbertSpace& space, Vector v);
  /// Rescales v to unit norm. Throws InvalidArgument for a zero vector.
  static StateVector normalized(const HilbertSpace& space, Vector v);
  static StateVector basis(const HilbertSpace& space, int qubit, int photons);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Vector& vector() const { return v_; }
  /// |⟨this|other⟩|².
  [[nodiscard]] double fidelity(const StateVector& other) const;

 private:
  HilbertSpace space_;
  Vector v_;
};

struct DensityDiagnostics {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

/// Density matrix on a HilbertSpace.
class DensityMatrix {
 public:
  DensityMatrix(const HilbertSpace& space, Matrix m);
  static DensityMatrix pure(const StateVector& psi);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return m_; }
  [[nodiscard]] DensityDiagnostics diagnostics() const;
  /// Throws NumericalError if Hermiticity (1e-10), trace (1e-8) or positivity (−1e-8) fail.
  void check() const;
  /// ⟨ψ|ρ|ψ⟩.
  [[nodiscard]] double fidelity(const StateVector& psi) const;

 private:
  HilbertSpace space_;
  Matrix m_;
};

struct LadderOperators {
  Operator a;
  Operator a_dag;
  Operator sigma_z;
  Operator sigma_plus;
  Operator sigma_minus;
};

/// Cavity and qubit ladder operators with σ_z|g⟩ = +|g⟩ and a†|n_max⟩ = 0.
LadderOperators ladder_ops(const HilbertSpace& space);
/// N_ex = a†a + |e⟩⟨e|.
Operator excitation_number(const HilbertSpace& space);
Operator number_operator(const HilbertSpace& space);

/// H = ω_c a†a − (ω_q/2)σ_z + g(σ⁻a† + σ⁺a).
Operator jc_hamiltonian(const HilbertSpace& space, const SystemParams& p);
/// H_D = ω_c a†a − ((ω_q+χ)/2)σ_z − χ σ_z a†a.
Operator dispersive_hamiltonian(const HilbertSpace& space, const SystemParams& p);

enum class DriveForm { Lab, Rwa };

/// Lab form 2cos(ω_d t)(εa + ε*a†); rwa form εe^{iω_d t}a + ε*e^{−iω_d t}a†.
Operator drive_hamiltonian(const HilbertSpace& space, const SystemParams& p, double t, DriveForm form);
/// Whether the drive is on at time t, that is 0 ≤ t < t_d.
[[nodiscard]] bool drive_active(double t, double t_d);
/// Jaynes-Cummings Hamiltonian plus the drive while it is on.
Operator total_hamiltonian(const HilbertSpace& space, const SystemParams& p, double t,
                           DriveForm form = DriveForm::Rwa);

/// (2|ε|/χ)|sin(χ t_d/2)|, the largest coherent amplitude reached by a resonant drive.
double max_drive_amplitude(const SystemParams& p);
/// ceil(|α|² + 5|α| + 10) with |α| = max_drive_amplitude(p).
int default_n_max(const SystemParams& p);

}  // namespace dispread
