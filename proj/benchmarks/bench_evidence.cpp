#include <benchmark/benchmark.h>

#include "semigp/evidence.hpp"
#include "semigp/simulate.hpp"

using namespace semigp;

namespace {

Dataset bench_data(int n, int p) {
  sim::GeneratorSpec spec;
  spec.beta_true = Eigen::VectorXd::Zero(p);
  spec.beta_true[0] = 2.0;
  spec.residual = sim::ResidualLaw::gaussian(0.0, 1.0);
  spec.n = n;
  spec.test_n = 0;
  RngStream rng(21);
  return sim::generate(spec, rng).train;
}

void BM_conditional_log_marginal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Dataset data = bench_data(n, 2);
  const SigmaOps ops(Allocation::single_cluster(n));
  const auto gamma = InclusionVector::make({1, 1}, n);
  const evidence::GPrior prior{};
  for (auto _ : state)
    benchmark::DoNotOptimize(evidence::conditional_log_marginal(ops, gamma, data, prior));
}
BENCHMARK(BM_conditional_log_marginal)->Arg(20)->Arg(200)->Arg(2000);

void BM_exact_log_marginal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Dataset data = bench_data(n, 2);
  const auto gamma = InclusionVector::make({1, 1}, n);
  const evidence::GPrior prior{};
  // warm the interpolation table outside the loop
  benchmark::DoNotOptimize(evidence::exact_log_marginal(data, gamma, 1.0, prior));
  for (auto _ : state)
    benchmark::DoNotOptimize(evidence::exact_log_marginal(data, gamma, 1.0, prior));
}
BENCHMARK(BM_exact_log_marginal)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_enumerate_partitions(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(evidence::enumerate_partition_weights(n, 1.0));
}
BENCHMARK(BM_enumerate_partitions)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
