// Serial reference vs OpenMP kernels of the value network.
//   bench_kernels --benchmark_filter=Dense

#include <benchmark/benchmark.h>

#include <random>

#include "mec/kernels.hpp"

using namespace mec;

namespace {

constexpr int kLocalStates = 512;  // D at M = M^loc = 7

NetParams make_net(int n) {
  std::mt19937_64 rng(1);
  auto net = NetParams::initialized(n, kLocalStates, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : net.node_values) v = u(rng);
  return net;
}

std::vector<int> make_input(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> idx(0, kLocalStates - 1);
  std::vector<int> a(n);
  for (auto& x : a) x = idx(rng);
  return a;
}

void BM_DenseSerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto net = make_net(n);
  std::mt19937_64 rng(2);
  const auto a = make_input(n, rng);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::forward_dense_serial(a, net).value);
  st.counters["neurons"] = n * kLocalStates;
}

void BM_DenseOmp(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto net = make_net(n);
  std::mt19937_64 rng(2);
  const auto a = make_input(n, rng);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::forward_dense_omp(a, net).value);
  st.counters["neurons"] = n * kLocalStates;
}

void BM_Sparse(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto net = make_net(n);
  std::mt19937_64 rng(2);
  const auto a = make_input(n, rng);
  for (auto _ : st) benchmark::DoNotOptimize(forward(a, net).value);
}

std::vector<std::vector<int>> make_batch(int n, int count) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<int>> b;
  for (int i = 0; i < count; ++i) b.push_back(make_input(n, rng));
  return b;
}

void BM_BatchSerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto net = make_net(n);
  const auto batch = make_batch(n, 256);
  std::vector<double> out(batch.size());
  for (auto _ : st) {
    kernels::batch_values_serial(batch, net, out);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(batch.size()));
}

void BM_BatchOmp(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto net = make_net(n);
  const auto batch = make_batch(n, 256);
  std::vector<double> out(batch.size());
  for (auto _ : st) {
    kernels::batch_values_omp(batch, net, out);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(batch.size()));
}

}  // namespace

BENCHMARK(BM_DenseSerial)->Arg(2)->Arg(10)->Arg(25);
BENCHMARK(BM_DenseOmp)->Arg(2)->Arg(10)->Arg(25);
BENCHMARK(BM_Sparse)->Arg(2)->Arg(10)->Arg(25);
BENCHMARK(BM_BatchSerial)->Arg(10)->Arg(25);
BENCHMARK(BM_BatchOmp)->Arg(10)->Arg(25);

BENCHMARK_MAIN();
