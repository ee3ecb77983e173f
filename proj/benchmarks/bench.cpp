#include <benchmark/benchmark.h>

#include "rotcoh/centrifuge.hpp"
#include "rotcoh/coupling.hpp"
#include "rotcoh/dynamics.hpp"
#include "rotcoh/observables.hpp"
#include "rotcoh/rotor.hpp"
#include "rotcoh/wigner.hpp"

using namespace rotcoh;

namespace {

MoleculeSpec d2s() { return MoleculeSpec{"D2S", 164.57, 135.38, 73.24, {23.5, 24.0, 23.0}, {}}; }

void BM_SmallD(benchmark::State& state) {
  const int J = static_cast<int>(state.range(0));
  double theta = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wigner::small_d(J, J / 2, -J / 3, theta));
    theta += 1e-6;
  }
}
BENCHMARK(BM_SmallD)->Arg(4)->Arg(20)->Arg(60);

void BM_ThreeJ(benchmark::State& state) {
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner::three_j(j, 2, j + 2, j, 2, -j - 2));
}
BENCHMARK(BM_ThreeJ)->Arg(10)->Arg(60);

void BM_DiagonalizeMultiplet(benchmark::State& state) {
  const auto s = d2s();
  const int J = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_multiplet(J, s));
}
BENCHMARK(BM_DiagonalizeMultiplet)->Arg(14)->Arg(60)->Unit(benchmark::kMicrosecond);

// One propagation step of the J <= 18 reference basis at peak field.
void BM_PropagatorStep(benchmark::State& state) {
  const auto s = d2s();
  const PolarizabilityCoupling pc(s, 18);
  const auto route = find_route(pc, 14, Axis::b);
  const auto basis = reachable_basis(pc, {route.path->states.front()}, 18);
  const auto lab = build_lab_polarizability(pc, basis);
  Centrifuge pulse;
  pulse.schedule = resonance_schedule(*route.path, pulse.params);
  CentrifugeOperator op(lab);
  const double t = pulse.schedule.entries[3].t_ps;
  op.set_terms(interaction_terms(t, pulse.params, pulse.schedule, lab.isotropic));
  Wavepacket wp = make_eigenstate_packet(pc, basis, route.path->states[3]);
  PropagatorConfig cfg;
  for (auto _ : state) step(wp, op, cfg);
  state.counters["basis"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_PropagatorStep)->Unit(benchmark::kMicrosecond);

void BM_AlignmentMC(benchmark::State& state) {
  CoherenceSpec c;
  c.axis = Axis::b;
  c.j_min = c.j_max = 14;
  const auto packet = resolve_coherence(c, d2s());
  const auto cosine = parse_cosine("bZX");
  MonteCarloConfig mc;
  mc.samples = state.range(0);
  mc.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(alignment_cos2_mc(packet, 0.0, cosine, mc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AlignmentMC)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
