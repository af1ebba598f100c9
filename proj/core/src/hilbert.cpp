#include "dispread/hilbert.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "dispread/errors.hpp"

namespace dispread {

SystemParams SystemParams::from_ghz(double f_c, double f_q, double g_ghz, double f_d,
                                    double epsilon_ghz, double phi_epsilon, double t_d) {
  SystemParams p;
  p.omega_c = kTwoPi * f_c;
  p.omega_q = kTwoPi * f_q;
  p.g = kTwoPi * g_ghz;
  p.omega_d = kTwoPi * f_d;
  p.epsilon_abs = kTwoPi * epsilon_ghz;
  p.phi_epsilon = phi_epsilon;
  p.t_d = t_d;
  return p;
}

SystemParams SystemParams::defaults() { return from_ghz(5.0, 6.0, 0.1, 5.0, 0.04, 0.0, 20.0); }

void SystemParams::validate() const {
  if (!(omega_c > 0.0) || !(omega_q > 0.0)) {
    throw InvalidArgument(fmt::format("frequencies must be positive (omega_c={}, omega_q={})", omega_c, omega_q));
  }
  if (delta() == 0.0) throw InvalidArgument("qubit and cavity are resonant (Delta = 0)");
  if (!(std::abs(lambda()) < 1.0)) {
    throw InvalidArgument(fmt::format("|lambda| = {} is outside the dispersive regime", std::abs(lambda())));
  }
  if (!(omega_d >= 0.0) || !(epsilon_abs >= 0.0)) {
    throw InvalidArgument("drive frequency and drive magnitude must be non-negative");
  }
  if (!(t_d >= 0.0) || !std::isfinite(t_d) || !std::isfinite(phi_epsilon) || !std::isfinite(g)) {
    throw InvalidArgument("drive duration must be finite and non-negative");
  }
}

HilbertSpace::HilbertSpace(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw InvalidArgument(fmt::format("n_max must be non-negative, got {}", n_max));
}

int HilbertSpace::index(int qubit, int photons) const {
  if (qubit < 0 || qubit > 1 || photons < 0 || photons > n_max_) {
    throw InvalidArgument(fmt::format("basis label (s={}, n={}) outside space with n_max={}", qubit, photons, n_max_));
  }
  return qubit * levels() + photons;
}

HilbertSpace build_space(int n_max) { return HilbertSpace(n_max); }

Operator::Operator() : space_(0), m_(Matrix::Zero(2, 2)) {}

Operator::Operator(const HilbertSpace& space, Matrix m) : space_(space), m_(std::move(m)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
    throw InvalidArgument(fmt::format("operator shape {}x{} does not match dimension {}", m_.rows(), m_.cols(),
                                      space_.dim()));
  }
}

Operator Operator::adjoint() const { return {space_, m_.adjoint()}; }

double Operator::hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

void Operator::assert_hermitian(double tol) const {
  const double err = hermiticity_error();
  if (err > tol) throw NumericalError(fmt::format("operator is not Hermitian: max|A - A^+| = {:.3e}", err));
}

namespace {
void require_same_space(const Operator& a, const Operator& b) {
  if (!(a.space() == b.space())) throw InvalidArgument("operators act on different spaces");
}
}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space_, a.m_ + b.m_};
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space_, a.m_ - b.m_};
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a, b);
  return {a.space_, a.m_ * b.m_};
}

Operator operator*(cplx s, const Operator& a) { return {a.space_, s * a.m_}; }

StateVector::StateVector(const HilbertSpace& space, Vector v) : space_(space), v_(std::move(v)) {
  if (v_.size() != space_.dim()) {
    throw InvalidArgument(fmt::format("state length {} does not match dimension {}", v_.size(), space_.dim()));
  }
  const double err = std::abs(v_.norm() - 1.0);
  if (err > 1e-10) throw InvalidArgument(fmt::format("state is not normalized (|norm - 1| = {:.3e})", err));
}

StateVector StateVector::normalized(const HilbertSpace& space, Vector v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  v /= n;
  return {space, std::move(v)};
}

StateVector StateVector::basis(const HilbertSpace& space, int qubit, int photons) {
  Vector v = Vector::Zero(space.dim());
  v(space.index(qubit, photons)) = 1.0;
  return {space, std::move(v)};
}

double StateVector::fidelity(const StateVector& other) const {
  if (!(space_ == other.space_)) throw InvalidArgument("states live on different spaces");
  return std::norm(v_.dot(other.v_));
}

DensityMatrix::DensityMatrix(const HilbertSpace& space, Matrix m) : space_(space), m_(std::move(m)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
    throw InvalidArgument(fmt::format("density matrix shape {}x{} does not match dimension {}", m_.rows(),
                                      m_.cols(), space_.dim()));
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return {psi.space(), psi.vector() * psi.vector().adjoint()};
}

DensityDiagnostics DensityMatrix::diagnostics() const {
  DensityDiagnostics d;
  d.hermiticity_error = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m_.trace() - cplx(1.0, 0.0));
  const Matrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

void DensityMatrix::check() const {
  const auto d = diagnostics();
  if (d.hermiticity_error > 1e-10 || d.trace_error > 1e-8 || d.min_eigenvalue < -1e-8) {
    throw NumericalError(fmt::format("invalid density matrix: hermiticity {:.3e}, trace error {:.3e}, min eigenvalue {:.3e}",
                                     d.hermiticity_error, d.trace_error, d.min_eigenvalue));
  }
}

double DensityMatrix::fidelity(const StateVector& psi) const {
  if (!(space_ == psi.space())) throw InvalidArgument("state and density matrix live on different spaces");
  return psi.vector().dot(m_ * psi.vector()).real();
}

LadderOperators ladder_ops(const HilbertSpace& space) {
  const int d = space.dim();
  Matrix a = Matrix::Zero(d, d);
  Matrix sz = Matrix::Zero(d, d);
  Matrix sp = Matrix::Zero(d, d);
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n <= space.n_max(); ++n) {
      const int i = space.index(s, n);
      if (n > 0) a(space.index(s, n - 1), i) = std::sqrt(static_cast<double>(n));
      sz(i, i) = (s == 0) ? 1.0 : -1.0;
      if (s == 0) sp(space.index(1, n), i) = 1.0;
    }
  }
  Matrix a_dag = a.adjoint();
  Matrix sm = sp.adjoint();
  return {Operator(space, std::move(a)), Operator(space, std::move(a_dag)), Operator(space, std::move(sz)),
          Operator(space, std::move(sp)), Operator(space, std::move(sm))};
}

Operator excitation_number(const HilbertSpace& space) {
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) m(i, i) = space.excitation_of(i);
  return {space, std::move(m)};
}

Operator number_operator(const HilbertSpace& space) {
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) m(i, i) = space.photons_of(i);
  return {space, std::move(m)};
}

Operator jc_hamiltonian(const HilbertSpace& space, const SystemParams& p) {
  const auto ops = ladder_ops(space);
  const Matrix& a = ops.a.matrix();
  const Matrix& sp = ops.sigma_plus.matrix();
  const Matrix& sm = ops.sigma_minus.matrix();
  Matrix h = p.omega_c * ops.a_dag.matrix() * a - 0.5 * p.omega_q * ops.sigma_z.matrix() +
             p.g * (sm * ops.a_dag.matrix() + sp * a);
  return {space, std::move(h)};
}

Operator dispersive_hamiltonian(const HilbertSpace& space, const SystemParams& p) {
  const double chi = p.chi();
  Matrix h = Matrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const double n = space.photons_of(i);
    const double z = space.qubit_of(i) == 0 ? 1.0 : -1.0;
    h(i, i) = p.omega_c * n - 0.5 * (p.omega_q + chi) * z - chi * z * n;
  }
  return {space, std::move(h)};
}

Operator drive_hamiltonian(const HilbertSpace& space, const SystemParams& p, double t, DriveForm form) {
  const auto ops = ladder_ops(space);
  const cplx eps = p.epsilon();
  cplx coef_a;
  cplx coef_adag;
  if (form == DriveForm::Lab) {
    const double c = 2.0 * std::cos(p.omega_d * t);
    coef_a = c * eps;
    coef_adag = c * std::conj(eps);
  } else {
    const cplx ph = std::polar(1.0, p.omega_d * t);
    coef_a = eps * ph;
    coef_adag = std::conj(eps * ph);
  }
  Matrix h = coef_a * ops.a.matrix() + coef_adag * ops.a_dag.matrix();
  return {space, std::move(h)};
}

bool drive_active(double t, double t_d) { return t >= 0.0 && t < t_d; }

Operator total_hamiltonian(const HilbertSpace& space, const SystemParams& p, double t, DriveForm form) {
  Operator h = jc_hamiltonian(space, p);
  if (!drive_active(t, p.t_d)) return h;
  return h + drive_hamiltonian(space, p, t, form);
}

double max_drive_amplitude(const SystemParams& p) {
  const double chi = p.chi();
  if (chi == 0.0) return p.epsilon_abs * p.t_d;
  return std::abs(2.0 * p.epsilon_abs / chi * std::sin(0.5 * chi * p.t_d));
}

int default_n_max(const SystemParams& p) {
  const double a = max_drive_amplitude(p);
  return static_cast<int>(std::ceil(a * a + 5.0 * a + 10.0));
}

}  // namespace dispread
