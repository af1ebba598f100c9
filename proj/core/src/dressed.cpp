#include "dispread/dressed.hpp"

#include <cmath>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "dispread/errors.hpp"

namespace dispread {

std::string_view to_string(Branch b) { return b == Branch::G ? "G" : "E"; }

StateVector dressed_eigenstate(const HilbertSpace& space, double lambda, Branch branch, int n) {
  const int lo = branch == Branch::G ? 0 : 1;
  if (n < lo || n > space.n_max()) {
    throw InvalidArgument(fmt::format("dressed index ({}, {}) outside [{}, {}]", to_string(branch), n, lo,
                                      space.n_max()));
  }
  const double angle = lambda * std::sqrt(static_cast<double>(n));
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Vector v = Vector::Zero(space.dim());
  if (branch == Branch::G) {
    v(space.index(0, n)) = c;
    if (n >= 1) v(space.index(1, n - 1)) = -s;
  } else {
    v(space.index(1, n - 1)) = c;
    v(space.index(0, n)) = s;
  }
  return {space, std::move(v)};
}

namespace {

void check_truncation(const HilbertSpace& space, cplx alpha) {
  const double a = std::abs(alpha);
  if (!(a * a + 5.0 * a < space.n_max())) {
    throw InvalidArgument(fmt::format("|alpha| = {:.4g} needs n_max > {:.4g}, have {}", a, a * a + 5.0 * a,
                                      space.n_max()));
  }
}

/// αⁿ/√n! e^{−|α|²/2} for n = 0..count−1 by recurrence.
Eigen::VectorXcd poisson_amplitudes(int count, cplx alpha) {
  Eigen::VectorXcd c(count);
  if (count == 0) return c;
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < count; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

}  // namespace

Eigen::VectorXcd coherent_amplitudes(int n_max, cplx alpha) {
  Eigen::VectorXcd c = poisson_amplitudes(n_max + 1, alpha);
  return c / c.norm();
}

Vector dressed_coherent_vector(const HilbertSpace& space, double lambda, Branch branch, cplx alpha) {
  const Eigen::VectorXcd c = poisson_amplitudes(space.n_max() + 1, alpha);
  Vector v = Vector::Zero(space.dim());
  for (int n = 0; n <= space.n_max(); ++n) {
    const int ladder = branch == Branch::G ? n : n + 1;
    if (ladder > space.n_max()) break;
    v += c(n) * dressed_eigenstate(space, lambda, branch, ladder).vector();
  }
  return v;
}

StateVector dressed_coherent_state(const HilbertSpace& space, double lambda, Branch branch, cplx alpha) {
  check_truncation(space, alpha);
  return StateVector::normalized(space, dressed_coherent_vector(space, lambda, branch, alpha));
}

double drive_envelope(const SystemParams& p, double t_d) {
  const double chi = p.chi();
  return 2.0 * p.epsilon_abs / chi * std::sin(0.5 * chi * t_d);
}

cplx drive_amplitude(const SystemParams& p, Branch branch, double t_d) {
  if (p.omega_d != p.omega_c) {
    throw InvalidArgument("drive amplitude formula requires a drive resonant with the bare cavity");
  }
  const double chi = p.chi();
  const double w = branch == Branch::G ? p.omega_c - 0.5 * chi : p.omega_c + 0.5 * chi;
  const cplx pref = cplx(0.0, -2.0) * std::conj(p.epsilon()) / chi * std::sin(0.5 * chi * t_d);
  return pref * std::polar(1.0, -w * t_d);
}

DressedAmplitude dressed_amplitude(const SystemParams& p, Branch branch, double t_d) {
  return {drive_amplitude(p, branch, t_d), branch, t_d, 0.0};
}

cplx decayed_amplitude(const DressedAmplitude& amp, double kappa, double tau, const SystemParams& p) {
  if (tau < 0.0) throw InvalidArgument("decay time must be non-negative");
  const double w = amp.branch == Branch::G ? p.omega_g_prime() : p.omega_e_prime();
  return amp.alpha * std::exp(-0.5 * kappa * tau) * std::polar(1.0, -w * tau);
}

QubitVector first_order_qubit_map(Branch branch, const SystemParams& p, double t_d, double kappa, double tau) {
  if (tau < 0.0) throw InvalidArgument("decay time must be non-negative");
  const double amp = p.lambda() * drive_envelope(p, t_d) * std::exp(-0.5 * kappa * tau);
  const double norm = std::sqrt(1.0 + amp * amp);
  const double base = p.phi_epsilon + 0.5 * std::numbers::pi;
  QubitVector v;
  if (branch == Branch::G) {
    const double phase = base + p.omega_g() * t_d + p.omega_g_prime() * tau;
    v << 1.0, -amp * std::polar(1.0, -phase);
  } else {
    const double phase = base + p.omega_e() * t_d + p.omega_e_prime() * tau;
    v << amp * std::polar(1.0, phase), 1.0;
  }
  return v / norm;
}

StateVector first_order_product_state(const HilbertSpace& space, const SystemParams& p, Branch branch,
                                      double t_d) {
  const cplx alpha = drive_amplitude(p, branch, t_d);
  check_truncation(space, alpha);
  const Eigen::VectorXcd cav = coherent_amplitudes(space.n_max(), alpha);
  const double lambda = p.lambda();
  Vector v(space.dim());
  const cplx qg = branch == Branch::G ? cplx(1.0) : lambda * std::conj(alpha);
  const cplx qe = branch == Branch::G ? -lambda * alpha : cplx(1.0);
  v.head(space.levels()) = qg * cav;
  v.tail(space.levels()) = qe * cav;
  return StateVector::normalized(space, std::move(v));
}

Operator dispersive_transform(const HilbertSpace& space, double lambda) {
  const auto ops = ladder_ops(space);
  const Matrix gen =
      lambda * (ops.sigma_plus.matrix() * ops.a.matrix() - ops.sigma_minus.matrix() * ops.a_dag.matrix());
  Matrix u = gen.exp();
  return {space, std::move(u)};
}

StateVector undressed_excited_state(const HilbertSpace& space, const SystemParams& p, double t_d,
                                    double relative_phase) {
  const double lambda = p.lambda();
  const double chi = p.chi();
  const cplx alpha_e = drive_amplitude(p, Branch::E, t_d);
  const cplx beta = std::conj(p.epsilon()) * (std::polar(1.0, -chi * t_d) - 1.0) / chi;
  check_truncation(space, alpha_e);
  check_truncation(space, beta);

  const int levels = space.levels();
  const Eigen::VectorXcd coh = poisson_amplitudes(levels + 1, beta);
  Eigen::VectorXcd displaced_one(levels);
  for (int n = 0; n < levels; ++n) {
    const cplx raise = n >= 1 ? std::sqrt(static_cast<double>(n)) * coh(n - 1) : cplx(0.0);
    displaced_one(n) = raise - std::conj(beta) * coh(n);
    displaced_one(n) *= std::polar(1.0, -(p.omega_c - chi) * n * t_d);
  }
  Vector ground = Vector::Zero(space.dim());
  ground.head(levels) = displaced_one;
  const Operator ud = dispersive_transform(space, lambda);
  const Vector ground_term = ud.matrix().adjoint() * ground;

  const StateVector dressed_e = dressed_coherent_state(space, lambda, Branch::E, alpha_e);
  Vector v = std::cos(lambda) * dressed_e.vector() -
             std::polar(1.0, relative_phase) * std::sin(lambda) * ground_term / ground_term.norm();
  return StateVector::normalized(space, std::move(v));
}

}  // namespace dispread
