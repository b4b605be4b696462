#include <benchmark/benchmark.h>

#include "sft/activity.hpp"
#include "sft/fem.hpp"
#include "sft/fock.hpp"
#include "sft/interaction.hpp"
#include "sft/measure.hpp"
#include "sft/ribbon_graph.hpp"
#include "sft/surface_mesh.hpp"

using namespace sft;

namespace {

measure::FieldParams tiny_field() {
  measure::FieldParams p;
  p.max_length = 2.4;
  p.cutoff = 2.5;
  p.kappa = 4.0;
  p.t_half = 0.5;
  p.dt = 0.25;
  p.n_cells = 35;
  return p;
}

void BM_FockBasis(benchmark::State& state) {
  const double cutoff = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fock::enumerate_basis({1, 1.0, 1.0, cutoff}).size());
}
BENCHMARK(BM_FockBasis)->Arg(10)->Arg(20)->Arg(30);

void BM_Sample(benchmark::State& state) {
  const measure::FreeFieldSampler s(tiny_field());
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(i++).amplitudes.data());
}
BENCHMARK(BM_Sample);

void BM_Interaction(benchmark::State& state) {
  const auto f = tiny_field();
  const measure::FreeFieldSampler s(f);
  const interaction::VertexKernel k(f, s.basis(), {});
  const auto x = s.sample(0);
  for (auto _ : state) benchmark::DoNotOptimize(interaction::interaction_I(x, k).value);
}
BENCHMARK(BM_Interaction);

void BM_GraphMoment(benchmark::State& state) {
  const graphs::GridEvaluator ev(tiny_field(), {});
  for (auto _ : state) benchmark::DoNotOptimize(graphs::wick_moment(2, ev).value);
}
BENCHMARK(BM_GraphMoment)->Unit(benchmark::kMillisecond);

void BM_Activity(benchmark::State& state) {
  const auto g = graphs::enumerate_graphs(1).back();
  std::vector<graphs::EdgeLabel> labels;
  for (const auto& e : g.edges()) {
    const int slot = g.kind(e.conj.vertex) == graphs::VertexKind::split ? e.conj.slot : e.plain.slot;
    labels.push_back({0.4, slot == 0 ? 2.2 : 1.1});
  }
  graphs::ActivityParams p;
  p.quad_points = 16;
  for (auto _ : state) benchmark::DoNotOptimize(graphs::activity_f(g, labels, p).value);
}
BENCHMARK(BM_Activity)->Unit(benchmark::kMillisecond);

void BM_TorusSpectrum(benchmark::State& state) {
  const auto mesh = surfaces::flat_torus(2.0, 2.0, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(surfaces::fem_spectrum(mesh, 1.0, 50).eigenvalues.back());
}
BENCHMARK(BM_TorusSpectrum)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
