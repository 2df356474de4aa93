#include <benchmark/benchmark.h>

#include "superspine/experiment.hpp"
#include "superspine/extinction.hpp"
#include "superspine/sampler.hpp"
#include "superspine/solver.hpp"
#include "superspine/transition.hpp"
#include "superspine/williams.hpp"

using namespace superspine;

namespace {

void BM_StableV(benchmark::State& state) {
  LocalMechanism m;
  m.stable_c = 1.0;
  m.stable_index = 1.5;
  m.atoms = {{0.5, 1.0}};  // no closed form: forces the quadrature inversion
  for (auto _ : state) benchmark::DoNotOptimize(solve_v_homogeneous(m, 1.0));
}
BENCHMARK(BM_StableV);

void BM_CsbpExact(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_csbp_exact(1.0, 1.0, 1.0, rng));
}
BENCHMARK(BM_CsbpExact);

void BM_ForwardPath(benchmark::State& state) {
  SuperprocessStepper stepper(BranchingMechanism::quadratic(1.0), MotionModel::brownian(1, 1.0),
                              ParticleControls{});
  auto times = uniform_times(0.005, 200);
  auto mu = ParticleMeasure::dirac(Point{}, 1.0);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_superprocess(stepper, mu, times, rng));
}
BENCHMARK(BM_ForwardPath)->Unit(benchmark::kMicrosecond);

void BM_WilliamsQuadratic(benchmark::State& state) {
  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  WilliamsControls ctrl;
  ctrl.dt = 0.005;
  ctrl.delta = 0.01;
  auto mu = ParticleMeasure::dirac(Point{}, 1.0);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_williams(stepper, profile, mu, 1.0, ctrl, rng));
}
BENCHMARK(BM_WilliamsQuadratic)->Unit(benchmark::kMillisecond);

void BM_MildStep(benchmark::State& state) {
  BranchingMechanism mech(ScalarField::constant(0.0), ScalarField::parse("1 + exp(-|x|^2)"), {}, 100.0);
  SpatialGrid grid(1, {-6, 0, 0}, {6, 0, 0}, {static_cast<int>(state.range(0)), 1, 1});
  MildSolver solver(mech, MotionModel::brownian(1, 1.0), grid, SolverControls{});
  GridField u(grid.size(), 1.0);
  for (auto _ : state) {
    GridField w = u;
    solver.step(w, 0.005);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_MildStep)->Arg(61)->Arg(121)->Arg(241)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
