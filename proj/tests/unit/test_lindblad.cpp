#include <cmath>
#include <set>

#include "doctest.h"
#include "dispread/errors.hpp"
#include "dispread/evolve.hpp"
#include "dispread/lindblad.hpp"
#include "test_support.hpp"

using namespace dispread;

namespace {

std::pair<double, double> doublet(const SystemParams& p, int n) {
  const double a = n * p.omega_c - 0.5 * p.omega_q;
  const double b = (n - 1) * p.omega_c + 0.5 * p.omega_q;
  const double half = std::sqrt(0.25 * (a - b) * (a - b) + p.g * p.g * n);
  return {0.5 * (a + b) - half, 0.5 * (a + b) + half};
}

}  // namespace

TEST_SUITE("lindblad") {

TEST_CASE("Bose occupation") {
  CHECK(bose_occupation(kTwoPi * 5.0, 0.0) == 0.0);
  CHECK(bose_occupation(kTwoPi * 5.0, 0.1) == doctest::Approx(0.100).epsilon(0.01));
  double previous = 0.0;
  for (double t : {0.02, 0.05, 0.1, 0.2, 0.5}) {
    const double n = bose_occupation(kTwoPi * 5.0, t);
    CHECK(n > previous);
    previous = n;
  }
  CHECK_THROWS_AS(bose_occupation(0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(bose_occupation(kTwoPi, -1.0), InvalidArgument);
}

TEST_CASE("eigenladder matches the closed-form spectrum and labels") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(20);
  const EigenLadder ladder = eigenladder(s, p);
  REQUIRE(ladder.size() == s.dim());

  CHECK(ladder.labels[0] == LevelLabel{Branch::G, 0});
  CHECK(ladder.energies(0) == doctest::Approx(-0.5 * p.omega_q).epsilon(1e-14));
  CHECK(ladder.state(0).fidelity(StateVector::basis(s, 0, 0)) == doctest::Approx(1.0));

  for (int n = 1; n <= s.n_max(); ++n) {
    const auto [low, high] = doublet(p, n);
    CHECK(ladder.energies(ladder.position({Branch::G, n})) == doctest::Approx(low).epsilon(1e-12));
    CHECK(ladder.energies(ladder.position({Branch::E, n})) == doctest::Approx(high).epsilon(1e-12));
  }

  const Matrix overlap = ladder.vectors.adjoint() * ladder.vectors;
  CHECK(test::max_abs(overlap - Matrix::Identity(s.dim(), s.dim())) < 1e-12);

  std::set<std::pair<int, int>> seen;
  for (const auto& l : ladder.labels) seen.insert({static_cast<int>(l.branch), l.n});
  CHECK(static_cast<int>(seen.size()) == ladder.size());
  for (int j = 1; j < ladder.size(); ++j) CHECK(ladder.energies(j) >= ladder.energies(j - 1));
}

TEST_CASE("labelling fails when levels are strongly hybridized") {
  SystemParams p = SystemParams::defaults();
  p.g = 0.5 * p.delta();
  CHECK_THROWS_AS(eigenladder(HilbertSpace(20), p), LabelingError);
}

TEST_CASE("transition elements") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(16);
  const EigenLadder ladder = eigenladder(s, p);
  const Matrix c = transition_elements(ladder);
  const double l2 = p.lambda() * p.lambda();
  for (int n = 0; n <= 10; ++n) {
    const double cav = std::abs(c(ladder.position({Branch::G, n}), ladder.position({Branch::G, n + 1})));
    CHECK(std::abs(cav - std::sqrt(n + 1.0)) <= 10.0 * l2 * (n + 1));
    const double pur = std::abs(c(ladder.position({Branch::G, n}), ladder.position({Branch::E, n + 1})));
    CHECK(pur >= 0.5 * p.lambda());
    CHECK(pur <= 2.0 * p.lambda() * std::sqrt(n + 1.0));
    if (n >= 1) {
      CHECK(std::abs(c(ladder.position({Branch::G, n}), ladder.position({Branch::E, n}))) < 1e-14);
    }
    CHECK(std::abs(c(ladder.position({Branch::G, n}), ladder.position({Branch::E, n + 3}))) <= 10.0 * l2);
  }
  CHECK(classify({Branch::G, 2}, {Branch::G, 3}) == TransitionClass::Cavity);
  CHECK(classify({Branch::E, 3}, {Branch::E, 2}) == TransitionClass::Cavity);
  CHECK(classify({Branch::G, 2}, {Branch::E, 3}) == TransitionClass::Purcell);
  CHECK(classify({Branch::E, 3}, {Branch::G, 2}) == TransitionClass::Purcell);
  CHECK(classify({Branch::G, 3}, {Branch::E, 3}) == TransitionClass::Other);
  CHECK(classify({Branch::G, 1}, {Branch::G, 3}) == TransitionClass::Other);
}

TEST_CASE("decay operators in the weak-coupling limit") {
  SystemParams p = SystemParams::defaults();
  p.g = 1e-6 * p.delta();
  const HilbertSpace s(8);
  const EigenLadder ladder = eigenladder(s, p);
  const DecayOperators ops = decay_operators(ladder, p);
  const LadderOperators bare = ladder_ops(s);
  const double bound = 10.0 * p.lambda() * std::sqrt(static_cast<double>(s.n_max()));
  CHECK(test::max_abs(ops.a_c.matrix() - bare.a.matrix()) <= bound);
  CHECK(test::max_abs(ops.a_p.matrix()) <= bound);
  CHECK(test::max_abs(ops.a_c.matrix() + ops.a_p.matrix() - bare.a.matrix()) <= 1e-9);
}

TEST_CASE("decay operators at the default coupling") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(16);
  const EigenLadder ladder = eigenladder(s, p);
  const DecayOperators ops = decay_operators(ladder, p);
  const double l2 = p.lambda() * p.lambda();

  Matrix lowering = Matrix::Zero(s.dim(), s.dim());
  const Matrix c = transition_elements(ladder);
  for (int j = 0; j < ladder.size(); ++j)
    for (int k = 0; k < ladder.size(); ++k)
      if (ladder.energies(j) < ladder.energies(k)) lowering(j, k) = c(j, k);
  const Matrix lowering_bare = ladder.vectors * lowering * ladder.vectors.adjoint();
  const Matrix kept = ops.a_c.matrix() + ops.a_p.matrix();
  CHECK(test::max_abs(kept - lowering_bare) <= 10.0 * l2);

  const Vector ground = ladder.state(ladder.position({Branch::G, 0})).vector();
  CHECK((ops.a_c.matrix() * ground).norm() < 1e-12);
  const Vector g1 = ladder.state(ladder.position({Branch::G, 1})).vector();
  CHECK(std::abs(std::abs(ground.dot(ops.a_c.matrix() * g1)) - 1.0) <= 10.0 * l2);
  for (int n = 0; n <= s.n_max(); ++n) {
    const Vector gn = ladder.state(ladder.position({Branch::G, n})).vector();
    CHECK((ops.a_p.matrix() * gn).norm() < 1e-12);
  }
  CHECK(ops.max_dropped <= 10.0 * l2 * s.n_max());
}

TEST_CASE("Purcell rate") {
  SystemParams p = SystemParams::defaults();
  const double q = p.omega_c * 100.0;
  CHECK(purcell_rate(p, q) == doctest::Approx(1.2e-4).epsilon(1e-12));
  CHECK(purcell_rate(p, q, PurcellFormula::ShiftedQubit) / purcell_rate(p, q) ==
        doctest::Approx((p.omega_q + p.chi()) / p.omega_q).epsilon(1e-12));
  p.g = 0.0;
  CHECK(purcell_rate(p, q) == 0.0);
}

TEST_CASE("dissipator") {
  const HilbertSpace s(4);
  const Operator a = ladder_ops(s).a;
  const Matrix vac = DensityMatrix::pure(StateVector::basis(s, 0, 0)).matrix();
  const Matrix one = DensityMatrix::pure(StateVector::basis(s, 0, 1)).matrix();
  CHECK(test::max_abs(dissipator(a, vac)) == 0.0);
  CHECK(test::max_abs(dissipator(a, one) - (vac - one)) < 1e-15);

  const Matrix rho = test::random_density(s.dim(), 11);
  const Matrix d = dissipator(a, rho);
  CHECK(std::abs(d.trace()) < 1e-14);
  CHECK(test::max_abs(d - d.adjoint()) < 1e-14);

  CHECK_THROWS_AS(dissipator(a, Matrix::Zero(3, 3)), InvalidArgument);
}

TEST_CASE("decay model") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(12);
  const EigenLadder ladder = eigenladder(s, p);
  const double q = p.omega_c * 100.0;

  const DecayModel filtered = make_decay_model(ladder, p, {q, 0.0, Variant::Filtered});
  CHECK(filtered.kappa == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(filtered.gamma_p == doctest::Approx(1.2e-4).epsilon(1e-12));
  const auto terms = filtered.jump_terms();
  REQUIRE(terms.size() == 1);
  CHECK(test::max_abs(terms[0].op.matrix() - filtered.a_c.matrix()) == 0.0);

  const DecayModel unfiltered = make_decay_model(ladder, p, {q, 0.1, Variant::Unfiltered});
  CHECK(unfiltered.n_th_c == doctest::Approx(0.1).epsilon(0.01));
  CHECK(unfiltered.jump_terms().size() == 4);
  const double coefficient = unfiltered.purcell_coefficient();
  CHECK(coefficient * p.lambda() * p.lambda() == doctest::Approx(unfiltered.gamma_p).epsilon(1e-12));

  const DecayModel literal =
      make_decay_model(ladder, p, {q, 0.0, Variant::Unfiltered, PurcellFormula::BareQubit, PurcellScaling::Literal});
  CHECK(literal.purcell_coefficient() == doctest::Approx(literal.gamma_p).epsilon(1e-12));
}

TEST_CASE("master-equation right-hand side") {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace s(20);
  const EigenLadder ladder = eigenladder(s, p);
  const double q = p.omega_c * 100.0;
  const DecayModel filtered = make_decay_model(ladder, p, {q, 0.0, Variant::Filtered});

  const Matrix ground = DensityMatrix::pure(ladder.state(0)).matrix();
  CHECK(test::max_abs(me_rhs(filtered, p, ground, p.t_d + 1.0)) < 1e-12);

  const DecayModel unfiltered = make_decay_model(ladder, p, {q, 0.05, Variant::Unfiltered});
  const Matrix rho = test::random_density(s.dim(), 5);
  for (double t : {1.0, p.t_d + 1.0}) {
    const Matrix d = me_rhs(unfiltered, p, rho, t);
    CHECK(std::abs(d.trace()) < 1e-10);
    CHECK(test::max_abs(d - d.adjoint()) < 1e-10);
  }

  const StateVector dcs = dressed_coherent_state(s, p.lambda(), Branch::G, 2.0);
  const Matrix rho_dcs = DensityMatrix::pure(dcs).matrix();
  const Matrix drho = me_rhs(filtered, p, rho_dcs, p.t_d + 1.0);
  const double n = cavity_occupation(s, rho_dcs);
  const double dn = cavity_occupation(s, drho);
  CHECK(std::abs(dn + filtered.kappa * n) <= 10.0 * p.lambda() * p.lambda() * filtered.kappa * n);
}

TEST_CASE("validity horizons") {
  const SystemParams p = SystemParams::defaults();
  const ValidityHorizon one = validity_horizon(p, 1);
  CHECK(one.cavity_ns == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(one.purcell_ns == doctest::Approx(100.0).epsilon(1e-12));
  const ValidityHorizon two = validity_horizon(p, 2);
  CHECK(two.cavity_ns == doctest::Approx(0.5 * one.cavity_ns).epsilon(1e-12));
  CHECK_THROWS_AS(validity_horizon(p, 0), InvalidArgument);
}

}  // TEST_SUITE
