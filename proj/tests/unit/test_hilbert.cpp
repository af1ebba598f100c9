#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dispread/errors.hpp"
#include "dispread/hilbert.hpp"
#include "test_support.hpp"

using namespace dispread;

TEST_SUITE("hilbert") {

TEST_CASE("space dimension and index layout") {
  CHECK(build_space(0).dim() == 2);
  CHECK(build_space(59).dim() == 120);
  const HilbertSpace s = build_space(59);
  CHECK(s.index(1, 3) == 63);
  CHECK(s.index(0, 0) == 0);
  CHECK(s.qubit_of(63) == 1);
  CHECK(s.photons_of(63) == 3);
  CHECK(s.excitation_of(63) == 4);
  CHECK_THROWS_AS(build_space(-1), InvalidArgument);
  CHECK_THROWS_AS((void)s.index(2, 0), InvalidArgument);
  CHECK_THROWS_AS((void)s.index(0, 60), InvalidArgument);
}

TEST_CASE("ladder operators act on basis states") {
  const HilbertSpace s(6);
  const LadderOperators ops = ladder_ops(s);
  const Vector g1 = StateVector::basis(s, 0, 1).vector();
  const Vector g0 = StateVector::basis(s, 0, 0).vector();
  const Vector e3 = StateVector::basis(s, 1, 3).vector();

  CHECK((ops.a.matrix() * g1 - g0).norm() < 1e-14);
  CHECK((ops.a.matrix() * g0).norm() < 1e-14);
  const Matrix n = ops.a_dag.matrix() * ops.a.matrix();
  CHECK((n * e3 - 3.0 * e3).norm() < 1e-13);
  CHECK((ops.sigma_z.matrix() * g0 - g0).norm() < 1e-14);
  CHECK((ops.sigma_z.matrix() * e3 + e3).norm() < 1e-14);
  CHECK((ops.sigma_plus.matrix() * g1 - StateVector::basis(s, 1, 1).vector()).norm() < 1e-14);
  CHECK((ops.sigma_minus.matrix() * g1).norm() < 1e-14);
  CHECK((ops.a_dag.matrix() * StateVector::basis(s, 0, 6).vector()).norm() < 1e-14);
  CHECK(std::abs(ops.a_dag(s.index(0, 4), s.index(0, 3)) - std::sqrt(4.0)) < 1e-14);
  CHECK(test::max_abs(number_operator(s).matrix() - n) < 1e-14);
}

TEST_CASE("Jaynes-Cummings matrix elements and excitation conservation") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(10);
  const Operator h = jc_hamiltonian(s, p);
  CHECK(std::abs(h(s.index(1, 0), s.index(0, 1)) - p.g) < 1e-14);
  CHECK(std::abs(h(s.index(0, 0), s.index(0, 0)) + 0.5 * p.omega_q) < 1e-12);
  CHECK(std::abs(h(s.index(1, 2), s.index(1, 2)) - (2.0 * p.omega_c + 0.5 * p.omega_q)) < 1e-12);
  CHECK(h.hermiticity_error() < 1e-14);
  const Matrix nex = excitation_number(s).matrix();
  CHECK(test::max_abs(h.matrix() * nex - nex * h.matrix()) < 1e-12);
}

TEST_CASE("Jaynes-Cummings spectrum matches closed-form doublets") {
  const SystemParams p = SystemParams::defaults();
  const int n_max = 25;
  const HilbertSpace s(n_max);
  Eigen::SelfAdjointEigenSolver<Matrix> es(jc_hamiltonian(s, p).matrix());
  std::vector<double> numeric(es.eigenvalues().data(), es.eigenvalues().data() + s.dim());

  std::vector<double> exact{-0.5 * p.omega_q, n_max * p.omega_c + 0.5 * p.omega_q};
  for (int n = 1; n <= n_max; ++n) {
    const double a = n * p.omega_c - 0.5 * p.omega_q;
    const double b = (n - 1) * p.omega_c + 0.5 * p.omega_q;
    const double c = p.g * std::sqrt(static_cast<double>(n));
    const double mean = 0.5 * (a + b);
    const double half = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
    exact.push_back(mean - half);
    exact.push_back(mean + half);
  }
  std::sort(exact.begin(), exact.end());
  REQUIRE(exact.size() == numeric.size());
  for (std::size_t i = 0; i < exact.size(); ++i) CHECK(numeric[i] == doctest::Approx(exact[i]).epsilon(1e-12));
}

TEST_CASE("dispersive energies approach Jaynes-Cummings energies at low photon number") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(12);
  const double chi = p.chi();
  CHECK(chi / kTwoPi == doctest::Approx(0.01).epsilon(1e-12));

  const Operator hd = dispersive_hamiltonian(s, p);
  CHECK(std::abs(hd(s.index(0, 4), s.index(0, 4)) - hd(s.index(0, 3), s.index(0, 3)) - (p.omega_c - chi)) < 1e-12);
  CHECK(std::abs(hd(s.index(1, 0), s.index(1, 0)) - hd(s.index(0, 0), s.index(0, 0)) - (p.omega_q + chi)) < 1e-12);

  const double lambda = p.lambda();
  const double ground_d = hd(s.index(0, 0), s.index(0, 0)).real();
  const double ground_jc = -0.5 * p.omega_q;
  for (int n = 1; n <= 5; ++n) {
    const double a = n * p.omega_c - 0.5 * p.omega_q;
    const double b = (n - 1) * p.omega_c + 0.5 * p.omega_q;
    const double half = std::sqrt(0.25 * (a - b) * (a - b) + p.g * p.g * n);
    const double jc_g = 0.5 * (a + b) - half - ground_jc;
    const double jc_e = 0.5 * (a + b) + half - ground_jc;
    const double d_g = hd(s.index(0, n), s.index(0, n)).real() - ground_d;
    const double d_e = hd(s.index(1, n - 1), s.index(1, n - 1)).real() - ground_d;
    const double tol = 10.0 * std::pow(lambda, 4) * n * n * std::abs(p.delta());
    CHECK(std::abs(jc_g - d_g) <= tol);
    CHECK(std::abs(jc_e - d_e) <= tol);
  }
}

TEST_CASE("drive Hamiltonian forms") {
  SystemParams p = SystemParams::defaults();
  const HilbertSpace s(8);
  const LadderOperators ops = ladder_ops(s);

  SUBCASE("zero amplitude gives the zero operator") {
    SystemParams q = p;
    q.epsilon_abs = 0.0;
    CHECK(test::max_abs(drive_hamiltonian(s, q, 3.7, DriveForm::Lab).matrix()) == 0.0);
    CHECK(test::max_abs(drive_hamiltonian(s, q, 3.7, DriveForm::Rwa).matrix()) == 0.0);
  }
  SUBCASE("rotating form at t = 0 with zero phase is |eps|(a + a^dag)") {
    const Matrix expected = p.epsilon_abs * (ops.a.matrix() + ops.a_dag.matrix());
    CHECK(test::max_abs(drive_hamiltonian(s, p, 0.0, DriveForm::Rwa).matrix() - expected) < 1e-15);
  }
  SUBCASE("lab minus rotating form is the counter-rotating term") {
    p.phi_epsilon = 0.7;
    const int periods = 64;
    Matrix average = Matrix::Zero(s.dim(), s.dim());
    double peak = 0.0;
    for (int k = 0; k < periods; ++k) {
      const double t = kTwoPi / p.omega_d * k / periods;
      const Matrix diff = drive_hamiltonian(s, p, t, DriveForm::Lab).matrix() -
                          drive_hamiltonian(s, p, t, DriveForm::Rwa).matrix();
      const cplx phase = std::exp(cplx(0.0, -p.omega_d * t));
      const Matrix counter = p.epsilon() * phase * ops.a.matrix() + std::conj(p.epsilon() * phase) * ops.a_dag.matrix();
      CHECK(test::max_abs(diff - counter) < 1e-14);
      average += diff / static_cast<double>(periods);
      peak = std::max(peak, std::abs(diff(s.index(0, 0), s.index(0, 1))));
    }
    CHECK(test::max_abs(average) < 1e-14);
    CHECK(peak == doctest::Approx(p.epsilon_abs).epsilon(1e-12));
  }
  SUBCASE("every builder is Hermitian") {
    CHECK(jc_hamiltonian(s, p).hermiticity_error() < 1e-12);
    CHECK(dispersive_hamiltonian(s, p).hermiticity_error() < 1e-12);
    for (double t : {0.0, 1.3, 7.9}) {
      CHECK(drive_hamiltonian(s, p, t, DriveForm::Lab).hermiticity_error() < 1e-12);
      CHECK(drive_hamiltonian(s, p, t, DriveForm::Rwa).hermiticity_error() < 1e-12);
    }
  }
}

TEST_CASE("total Hamiltonian switches the drive off at t_d") {
  SystemParams p = SystemParams::defaults();
  const HilbertSpace s(8);
  const Matrix h0 = jc_hamiltonian(s, p).matrix();
  CHECK(drive_active(0.0, p.t_d));
  CHECK_FALSE(drive_active(p.t_d, p.t_d));
  CHECK(test::max_abs(total_hamiltonian(s, p, p.t_d + 1.0).matrix() - h0) == 0.0);
  CHECK(test::max_abs(total_hamiltonian(s, p, 0.0).matrix() - h0 -
                      drive_hamiltonian(s, p, 0.0, DriveForm::Rwa).matrix()) < 1e-15);
  p.t_d = 0.0;
  CHECK(test::max_abs(total_hamiltonian(s, p, 0.0).matrix() - h0) == 0.0);
}

TEST_CASE("default truncation covers the largest drive amplitude") {
  const SystemParams p = SystemParams::defaults();
  const double alpha = max_drive_amplitude(p);
  CHECK(alpha == doctest::Approx(8.0 * std::sin(0.2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(default_n_max(p) == 56);
}

TEST_CASE("parameter validation") {
  SystemParams p = SystemParams::defaults();
  CHECK_NOTHROW(p.validate());
  p.g = p.delta();
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = SystemParams::defaults();
  p.omega_q = p.omega_c;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = SystemParams::defaults();
  p.omega_c = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("state and density containers enforce their invariants") {
  const HilbertSpace s(3);
  Vector v = Vector::Zero(s.dim());
  v(0) = 2.0;
  CHECK_THROWS_AS(StateVector(s, v), InvalidArgument);
  CHECK_THROWS_AS(StateVector::normalized(s, Vector::Zero(s.dim())), InvalidArgument);
  const StateVector psi = StateVector::normalized(s, v);
  CHECK(psi.fidelity(StateVector::basis(s, 0, 0)) == doctest::Approx(1.0));

  const DensityMatrix rho(s, test::random_density(s.dim(), 7));
  CHECK_NOTHROW(rho.check());
  const auto d = rho.diagnostics();
  CHECK(d.trace_error < 1e-12);
  CHECK(d.min_eigenvalue > 0.0);

  Matrix bad = Matrix::Zero(s.dim(), s.dim());
  bad(0, 0) = 1.2;
  bad(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix(s, bad).check(), NumericalError);
  CHECK(DensityMatrix::pure(psi).fidelity(psi) == doctest::Approx(1.0));
}

}  // TEST_SUITE
