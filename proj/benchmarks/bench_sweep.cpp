#include <benchmark/benchmark.h>

#include "semigp/chain.hpp"
#include "semigp/simulate.hpp"

using namespace semigp;

namespace {

void BM_sweep(benchmark::State& state, ResidualModel model) {
  const int n = static_cast<int>(state.range(0));
  sim::GeneratorSpec spec = sim::GeneratorSpec::case_one(n, 0);
  RngStream rng(11);
  const auto data = sim::generate(spec, rng);
  SamplerConfig cfg;
  cfg.iterations = 10;
  cfg.burn_in = 1;
  Chain chain(data.train, cfg, model, RngStream(12));
  for (int warm = 0; warm < 50; ++warm) chain.sweep();
  for (auto _ : state) chain.sweep();
}

void BM_sweep_slm(benchmark::State& state) { BM_sweep(state, ResidualModel::slm); }
void BM_sweep_nlm(benchmark::State& state) { BM_sweep(state, ResidualModel::nlm); }

BENCHMARK(BM_sweep_slm)->Arg(100)->Arg(500);
BENCHMARK(BM_sweep_nlm)->Arg(100)->Arg(500);

}  // namespace
