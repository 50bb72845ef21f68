// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "polyscale/kernels.hpp"
#include "polyscale/rng.hpp"
#include "polyscale/sampler.hpp"

using namespace polyscale;

namespace {

std::vector<double> points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(2 * n);
  for (auto& x : v) x = rng.normal();
  return v;
}

SpinChain chain(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  SpinChain c(n);
  for (auto& s : c) s = rng.coin() ? 1 : -1;
  return c;
}

void BM_CostMatrixParallel(benchmark::State& st) {
  const auto a = points(static_cast<std::size_t>(st.range(0)), 1), b = points(static_cast<std::size_t>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::cost_matrix_parallel(a, b, 2, 2.0, kernels::GroundNorm::Euclidean));
}
void BM_CostMatrixSerial(benchmark::State& st) {
  const auto a = points(static_cast<std::size_t>(st.range(0)), 1), b = points(static_cast<std::size_t>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::cost_matrix_serial(a, b, 2, 2.0, kernels::GroundNorm::Euclidean));
}

void BM_ChainEnergiesParallel(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const KernelTable t(InteractionKernel::power_law(1.5), n);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::chain_state_energies_parallel(n, t));
}
void BM_ChainEnergiesSerial(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const KernelTable t(InteractionKernel::power_law(1.5), n);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::chain_state_energies_serial(n, t));
}

void BM_LagProducts(benchmark::State& st) {
  const auto c = chain(static_cast<std::size_t>(st.range(0)), 3);
  std::vector<std::int64_t> out(129);
  for (auto _ : st) {
    kernels::lag_products(c, 128, out);
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_LagProductsReference(benchmark::State& st) {
  const auto c = chain(static_cast<std::size_t>(st.range(0)), 3);
  std::vector<std::int64_t> out(129);
  for (auto _ : st) {
    kernels::lag_products_reference(c, 128, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ReplicasParallel(benchmark::State& st) {
  auto t = std::make_shared<const KernelTable>(InteractionKernel::power_law(1.5), 1024);
  for (auto _ : st)
    kernels::for_each_replica_parallel(16, [&](std::size_t r) {
      ChainSampler s(t, 1024, 0.1, Algorithm::ClusterLongRange, r);
      s.sweeps(10);
    });
}
void BM_ReplicasSerial(benchmark::State& st) {
  auto t = std::make_shared<const KernelTable>(InteractionKernel::power_law(1.5), 1024);
  for (auto _ : st)
    kernels::for_each_replica_serial(16, [&](std::size_t r) {
      ChainSampler s(t, 1024, 0.1, Algorithm::ClusterLongRange, r);
      s.sweeps(10);
    });
}

}  // namespace

BENCHMARK(BM_CostMatrixParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_CostMatrixSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_ChainEnergiesParallel)->Arg(14)->Arg(18);
BENCHMARK(BM_ChainEnergiesSerial)->Arg(14)->Arg(18);
BENCHMARK(BM_LagProducts)->Arg(4096)->Arg(16384);
BENCHMARK(BM_LagProductsReference)->Arg(4096)->Arg(16384);
BENCHMARK(BM_ReplicasParallel);
BENCHMARK(BM_ReplicasSerial);

BENCHMARK_MAIN();
