#include <benchmark/benchmark.h>

#include <random>

#include "dispread/evolve.hpp"
#include "dispread/feedback.hpp"
#include "dispread/lindblad.hpp"

namespace {

using namespace dispread;

Matrix random_density(int dim) {
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss;
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Diagonalizes and labels the Jaynes-Cummings ladder at a given cutoff.
static void BM_EigenLadder(benchmark::State& state) {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace space(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigenladder(space, p));
  state.SetLabel("dim " + std::to_string(space.dim()));
}

BENCHMARK(BM_EigenLadder)->Arg(20)->Arg(56)->Unit(benchmark::kMillisecond);

// Dense lab-frame master-equation right-hand side with every dissipator switched on.
static void BM_MasterEquationRhs(benchmark::State& state) {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace space(static_cast<int>(state.range(0)));
  const EigenLadder ladder = eigenladder(space, p);
  const DecayModel model = make_decay_model(ladder, p, {p.omega_c * 100.0, 0.1, Variant::Unfiltered});
  const Matrix rho = random_density(space.dim());
  for (auto _ : state) benchmark::DoNotOptimize(me_rhs(model, p, rho, 1.0));
}

BENCHMARK(BM_MasterEquationRhs)->Arg(20)->Arg(56)->Unit(benchmark::kMicrosecond);

// Full drive-and-decay density-matrix integration over a short window.
static void BM_IntegrateShortWindow(benchmark::State& state) {
  const SystemParams p = SystemParams::defaults();
  const HilbertSpace space(default_n_max(p));
  const EigenLadder ladder = eigenladder(space, p);
  const DecayModel model = make_decay_model(ladder, p, {p.omega_c * 100.0, 0.0, Variant::Filtered});
  const Protocol protocol{InitialState::BareGround, p.t_d, p.t_d + 20.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(p, space, protocol, &model));
}

BENCHMARK(BM_IntegrateShortWindow)->Unit(benchmark::kMillisecond)->Iterations(3);

// Grid search plus golden-section refinement for one qubit state.
static void BM_OptimizeCorrection(benchmark::State& state) {
  Qubit2 rho;
  rho << 0.86, cplx(0.1, -0.3), cplx(0.1, 0.3), 0.14;
  const CorrectionParams analytic{0.38, 1.0, Branch::G};
  const OptimizerGrid grid{static_cast<int>(state.range(0)), 16, 20};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_correction(rho, Branch::G, analytic, grid));
}

BENCHMARK(BM_OptimizeCorrection)->Arg(360)->Arg(720)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
