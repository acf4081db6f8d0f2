#include <benchmark/benchmark.h>

#include <vector>

#include "canlab/estimators.hpp"
#include "canlab/exact.hpp"
#include "canlab/simulator.hpp"
#include "generators.hpp"

using namespace canlab;

namespace {

void BM_Psi(benchmark::State& state) {
  Rng rng(1, 0);
  std::vector<LocalOp> ops;
  for (int k = 0; k < 256; ++k) ops.push_back(gen::random_ts_op(rng, gen::random_parity(rng)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(psi(ops[i++ % ops.size()]));
}
BENCHMARK(BM_Psi);

void BM_ApplyAndGrad(benchmark::State& state) {
  Rng rng(2, 0);
  const LocalOp a = gen::random_ts_op(rng, Parity::Integer);
  const Config x = gen::random_config(rng, Parity::Integer, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(grad(apply(a, x)));
}
BENCHMARK(BM_ApplyAndGrad)->Arg(64)->Arg(1024);

void BM_SimulatorSteps(benchmark::State& state) {
  const auto dyn = mc::make_dynamics(rebellious_table(0.6));
  mc::Simulator sim(dyn, Config::heaviside(Parity::Integer, DoubledIndex::site(0)), Rng(3, 0));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(1e300));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorSteps);

void BM_RingSimulatorSteps(benchmark::State& state) {
  const auto n = state.range(0);
  std::string bits(static_cast<std::size_t>(n), '0');
  Rng rng(4, 0);
  for (auto& b : bits) b = rng.bernoulli(0.5) ? '1' : '0';
  const Config x = Config::from_bits(LatticeTag::ring(n, Parity::Integer), 0, bits);
  mc::Simulator sim(mc::make_dynamics(voter_table()), x, Rng(4, 1));
  for (auto _ : state) {
    if (!sim.step(1e300)) {
      state.PauseTiming();
      sim = mc::Simulator(mc::make_dynamics(voter_table()), x, Rng(4, state.iterations()));
      state.ResumeTiming();
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RingSimulatorSteps)->Arg(256)->Arg(4096);

void BM_BuildGenerator(benchmark::State& state) {
  const auto model = exact::RingModel::from_table(rebellious_table(0.7), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact::build_generator(model));
}
BENCHMARK(BM_BuildGenerator)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Transient(benchmark::State& state) {
  const auto g = exact::build_generator(exact::RingModel::from_table(rebellious_table(0.7), 12));
  const auto p0 = exact::Distribution::point_mass(12, 0b000000111011);
  for (auto _ : state) benchmark::DoNotOptimize(exact::transient(g, p0, 1.0, 1e-10));
}
BENCHMARK(BM_Transient)->Unit(benchmark::kMillisecond);

void BM_HatChain(benchmark::State& state) {
  const RateTable y = interface_table(rebellious_table(0.9));
  for (auto _ : state) benchmark::DoNotOptimize(exact::truncated_hatY_analysis(y, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_HatChain)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_HarmonicEvaluation(benchmark::State& state) {
  mc::HatYOptions o;
  o.horizon = 2e4;
  o.seed = 5;
  const auto run = mc::simulate_hatY(interface_table(rebellious_table(0.8)), o);
  const auto h = mc::HarmonicFunction::from_samples(run.samples);
  Rng rng(5, 1);
  const Config x = gen::random_finite(rng, Parity::HalfInteger, 40);
  for (auto _ : state) benchmark::DoNotOptimize(h(x));
  state.counters["states"] = static_cast<double>(h.states());
}
BENCHMARK(BM_HarmonicEvaluation);

}  // namespace
BENCHMARK_MAIN();
