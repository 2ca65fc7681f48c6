#include "msflow/config.hpp"
#include "msflow/coupling.hpp"
#include "msflow/platform.hpp"
#include "msflow/simulation.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace msflow;

namespace {

struct Setup {
  SimulationConfig config;
  SimulationState state;
};

/// example1 with `n` vertices per curve and the matching fine mesh width.
Setup make_setup(long n) {
  const double h = n >= 128 ? 0.0625 : 0.125;
  RunConfig c = resolve_config(std::nullopt, "example1",
                               {"geometry.vertices_per_curve=" + std::to_string(n), "mesh.h_fine=" + std::to_string(h)});
  const CurveNetwork net = build_network(c);
  Setup s{to_simulation_config(c), {}};
  s.config.timing = false;
  s.state = initialize(net, build_curve_params(c, net.curves.size()), s.config);
  return s;
}

void BM_Adapt(benchmark::State& bs) {
  const Setup s = make_setup(bs.range(0));
  for (auto _ : bs) benchmark::DoNotOptimize(adapt(s.state.network, s.config.mesh));
  bs.counters["bulk_vertices"] = static_cast<double>(s.state.mesh.num_vertices());
}

void BM_ClipSegments(benchmark::State& bs) {
  const Setup s = make_setup(bs.range(0));
  for (auto _ : bs) benchmark::DoNotOptimize(clip_segments(s.state.mesh, s.state.network));
}

void BM_Assemble(benchmark::State& bs) {
  const Setup s = make_setup(bs.range(0));
  for (auto _ : bs) {
    BlockSystem b = assemble_blocks(s.state.mesh, s.state.network, s.state.params, s.config.assembly);
    benchmark::DoNotOptimize(build_reduced_system(b));
  }
}

void solve_with(benchmark::State& bs, SolverMethod method) {
  const Setup s = make_setup(bs.range(0));
  const BlockSystem b = assemble_blocks(s.state.mesh, s.state.network, s.state.params, s.config.assembly);
  const ReducedSystem sys = build_reduced_system(b);
  SolverConfig cfg = s.config.solver;
  cfg.method = method;
  double iterations = 0;
  for (auto _ : bs) {
    SolverStats stats;
    benchmark::DoNotOptimize(solve_reduced(sys, cfg, stats));
    iterations = static_cast<double>(stats.iterations);
  }
  bs.counters["unknowns"] = static_cast<double>(sys.M0.rows());
  bs.counters["iterations"] = iterations;
}

void BM_SolveGmresLsq(benchmark::State& bs) { solve_with(bs, SolverMethod::GmresLsq); }
void BM_SolveMergedDirect(benchmark::State& bs) { solve_with(bs, SolverMethod::MergedDirect); }

void BM_Step(benchmark::State& bs) {
  Setup s = make_setup(bs.range(0));
  for (auto _ : bs) step(s.state, s.config);
}

}  // namespace

BENCHMARK(BM_Adapt)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClipSegments)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveGmresLsq)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveMergedDirect)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond)->Iterations(20);

int main(int argc, char** argv) {
  ensure_working_blas(argv);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
