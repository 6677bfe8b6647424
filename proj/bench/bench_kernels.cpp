// Serial reference loops against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "qsn/hilbert.hpp"
#include "qsn/kernels.hpp"
#include "qsn/minet.hpp"
#include "qsn/rng.hpp"

using namespace qsn;

namespace {

std::vector<double> random_vector(std::size_t size) {
  Stream rng(5);
  std::vector<double> v(size);
  for (auto& x : v) x = rng.uniform() - 0.5;
  return v;
}

Graph bench_graph(int n) {
  Stream rng(derive_seed(1, {std::uint64_t(n)}));
  return gen_watts_strogatz(n, 4, 0.5, rng);
}

void BM_MatvecSerial(benchmark::State& state) {
  const SparseHamiltonian h(bench_graph(int(state.range(0))), {1.0, 0.7});
  const auto x = random_vector(h.dimension());
  std::vector<double> y(h.dimension());
  for (auto _ : state) {
    h.apply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * h.dimension());
}

void BM_MatvecOmp(benchmark::State& state) {
  const SparseHamiltonian h(bench_graph(int(state.range(0))), {1.0, 0.7});
  const auto x = random_vector(h.dimension());
  std::vector<double> y(h.dimension());
  for (auto _ : state) {
    h.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * h.dimension());
}

void BM_PairBlockSerial(benchmark::State& state) {
  const int n = int(state.range(0));
  const auto psi = random_vector(std::size_t{1} << n);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::pair_block(psi, n, 1, n - 2));
}

void BM_PairBlockOmp(benchmark::State& state) {
  const int n = int(state.range(0));
  const auto psi = random_vector(std::size_t{1} << n);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pair_block(psi, n, 1, n - 2));
}

void BM_DotSerial(benchmark::State& state) {
  const auto x = random_vector(std::size_t{1} << state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::dot(x, x));
}

void BM_DotOmp(benchmark::State& state) {
  const auto x = random_vector(std::size_t{1} << state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(x, x));
}

void BM_RdmTableSerial(benchmark::State& state) {
  const GroundState gs = ground_state(SparseHamiltonian(bench_graph(int(state.range(0))), {1.0, 1.0}));
  for (auto _ : state) benchmark::DoNotOptimize(rdm_table_serial(gs.state));
}

void BM_RdmTableOmp(benchmark::State& state) {
  const GroundState gs = ground_state(SparseHamiltonian(bench_graph(int(state.range(0))), {1.0, 1.0}));
  for (auto _ : state) benchmark::DoNotOptimize(rdm_table(gs.state));
}

}  // namespace

BENCHMARK(BM_MatvecSerial)->Arg(14)->Arg(18)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecOmp)->Arg(14)->Arg(18)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairBlockSerial)->Arg(14)->Arg(18)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairBlockOmp)->Arg(14)->Arg(18)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotSerial)->Arg(14)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotOmp)->Arg(14)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RdmTableSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RdmTableOmp)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
