#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "dispread/errors.hpp"
#include "dispread/feedback.hpp"

using namespace dispread;

namespace {

Qubit2 projector(const QubitVector& v) { return v * v.adjoint(); }

Qubit2 random_qubit(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Qubit2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
  Qubit2 rho = a * a.adjoint();
  return rho / rho.trace().real();
}

/// Drive amplitude that makes |α(t_d)| equal to `target` at the default coupling.
SystemParams with_amplitude(double target) {
  SystemParams p = SystemParams::defaults();
  p.epsilon_abs = target * p.chi() / (2.0 * std::sin(0.5 * p.chi() * p.t_d));
  return p;
}

}  // namespace

TEST_SUITE("feedback") {

TEST_CASE("phase wrapping") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - kTwoPi));
  CHECK(wrap_phase(kTwoPi) == 0.0);
}

TEST_CASE("analytic correction angle") {
  SystemParams p = SystemParams::defaults();
  const double kappa = 0.01;
  SystemParams off = p;
  off.epsilon_abs = 0.0;
  CHECK(analytic_correction(Branch::G, off, kappa, p.t_d, 0.0).theta == 0.0);

  double previous = 10.0;
  for (double tau : {0.0, 10.0, 100.0, 400.0}) {
    const double theta = analytic_correction(Branch::G, p, kappa, p.t_d, tau).theta;
    CHECK(theta < previous);
    previous = theta;
  }

  const SystemParams four = with_amplitude(4.0);
  CHECK(std::abs(drive_amplitude(four, Branch::G, four.t_d)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(analytic_correction(Branch::G, four, kappa, four.t_d, 0.0).theta ==
        doctest::Approx(std::atan(0.4)).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_correction(Branch::G, p, kappa, p.t_d, -1.0), InvalidArgument);
}

TEST_CASE("correction unitary") {
  CHECK((correction_unitary({0.0, 1.3, Branch::G}) - Qubit2::Identity()).cwiseAbs().maxCoeff() == 0.0);

  Qubit2 sx;
  sx << 0.0, 1.0, 1.0, 0.0;
  Qubit2 sy;
  sy << 0.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 0.0;
  for (double theta : {0.1, 0.7, 1.4}) {
    for (double sigma : {0.0, 1.0, 3.5, 6.0}) {
      const Qubit2 u = correction_unitary({theta, sigma, Branch::G});
      CHECK((u * u.adjoint() - Qubit2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
      const Qubit2 gen = cplx(0.0, theta) * (std::cos(sigma) * sy - std::sin(sigma) * sx);
      const Qubit2 expected = gen.exp();
      CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("analytic correction inverts the first-order map") {
  const double kappa = 0.01;
  for (double eps_ghz : {0.01, 0.04, 0.08}) {
    SystemParams p = SystemParams::defaults();
    p.epsilon_abs = kTwoPi * eps_ghz;
    for (double phi : {0.0, 0.9, -2.2}) {
      p.phi_epsilon = phi;
      for (double t_d : {5.0, 20.0, 70.0}) {
        for (double tau : {0.0, 37.0, 250.0}) {
          for (Branch b : {Branch::G, Branch::E}) {
            const Qubit2 rho = projector(first_order_qubit_map(b, p, t_d, kappa, tau));
            const CorrectionParams cp = analytic_correction(b, p, kappa, t_d, tau);
            CHECK(fidelity_corrected(rho, b, cp) == doctest::Approx(1.0).epsilon(1e-10));
          }
        }
      }
    }
  }
}

TEST_CASE("uncorrected and corrected fidelities") {
  Qubit2 g = Qubit2::Zero();
  g(0, 0) = 1.0;
  Qubit2 e = Qubit2::Zero();
  e(1, 1) = 1.0;
  CHECK(fidelity_uncorrected(g, Branch::G) == 1.0);
  CHECK(fidelity_uncorrected(e, Branch::G) == 0.0);
  CHECK(fidelity_uncorrected(e, Branch::E) == 1.0);

  QubitVector v;
  v << 1.0, -0.4;
  v.normalize();
  CHECK(fidelity_uncorrected(projector(v), Branch::G) == doctest::Approx(1.0 / 1.16).epsilon(1e-14));

  std::mt19937 rng(17);
  for (int k = 0; k < 20; ++k) {
    const Qubit2 rho = random_qubit(rng);
    CHECK(fidelity_corrected(rho, Branch::G, {0.0, 2.0, Branch::G}) ==
          doctest::Approx(fidelity_uncorrected(rho, Branch::G)).epsilon(1e-14));
  }
}

TEST_CASE("optimizer recovers a planted rotation") {
  for (double theta0 : {0.2, 0.38, 0.6}) {
    for (double sigma0 : {0.4, 2.9, 5.5}) {
      const CorrectionParams planted{theta0, sigma0, Branch::G};
      const Qubit2 u = correction_unitary(planted);
      const Qubit2 rho = u.adjoint() * projector(QubitVector(1.0, 0.0)) * u;
      const OptimizationResult r = optimize_correction(rho, Branch::G, {theta0, 0.0, Branch::G});
      CHECK(r.fidelity_at_optimum >= 1.0 - 1e-4);
      CHECK(r.theta_star == doctest::Approx(theta0).epsilon(1e-12));
      CHECK(std::abs(std::remainder(r.sigma_star - sigma0, kTwoPi)) <= kTwoPi / 720.0);
      CHECK(r.grid_points_evaluated >= 720u * 15u + 1u);
    }
  }
}

TEST_CASE("optimizer on degenerate and random states") {
  const Qubit2 mixed = 0.5 * Qubit2::Identity();
  const OptimizationResult r = optimize_correction(mixed, Branch::G, {0.3, 1.0, Branch::G});
  CHECK(r.fidelity_at_optimum == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.theta_star == 0.0);
  CHECK(r.sigma_star == 0.0);

  std::mt19937 rng(23);
  for (int k = 0; k < 50; ++k) {
    const Qubit2 rho = random_qubit(rng);
    for (Branch b : {Branch::G, Branch::E}) {
      const OptimizationResult opt = optimize_correction(rho, b, {0.5, 0.0, b}, {90, 8, 20});
      Eigen::SelfAdjointEigenSolver<Qubit2> es(rho);
      CHECK(opt.fidelity_at_optimum >= fidelity_uncorrected(rho, b) - 1e-14);
      CHECK(opt.fidelity_at_optimum <= es.eigenvalues()(1) + 1e-12);
      CHECK(opt.fidelity_at_optimum ==
            doctest::Approx(fidelity_corrected(rho, b, {opt.theta_star, opt.sigma_star, b})).epsilon(1e-12));
    }
  }
}

}  // TEST_SUITE
