#include <benchmark/benchmark.h>

#include "semigp/rng.hpp"
#include "semigp/sigma_ops.hpp"

using namespace semigp;

namespace {

Allocation crp_allocation(int n, RngStream& rng) {
  std::vector<int> labels(n);
  std::vector<int> sizes;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * (i + 1.0);
    double cum = 0.0;
    int pick = static_cast<int>(sizes.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      cum += sizes[j];
      if (u < cum) {
        pick = static_cast<int>(j);
        break;
      }
    }
    if (pick == static_cast<int>(sizes.size())) sizes.push_back(0);
    sizes[pick] += 1;
    labels[i] = pick;
  }
  return Allocation::from_labels(labels);
}

void BM_inv_apply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1);
  const SigmaOps ops(crp_allocation(n, rng));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(ops.inv_apply(v));
  state.SetComplexityN(n);
}
BENCHMARK(BM_inv_apply)->Range(1000, 100000)->Complexity(benchmark::oN);

void BM_inv_sqrt_apply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(2);
  const SigmaOps ops(crp_allocation(n, rng));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(ops.inv_sqrt_apply(v));
  state.SetComplexityN(n);
}
BENCHMARK(BM_inv_sqrt_apply)->Range(1000, 100000)->Complexity(benchmark::oN);

void BM_inv_quadform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int q = 8;
  RngStream rng(3);
  const SigmaOps ops(crp_allocation(n, rng));
  Eigen::MatrixXd x(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) x(i, j) = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(ops.inv_quadform(x));
  state.SetComplexityN(n);
}
BENCHMARK(BM_inv_quadform)->Range(1000, 100000)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
