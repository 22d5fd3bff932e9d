// Serial reference vs OpenMP kernels, plus the per-sample vs batch
// backprop routes. Run: build/bench/bench_kernels
#include <benchmark/benchmark.h>

#include "percept/learning.hpp"
#include "percept/linalg.hpp"
#include "percept/network.hpp"
#include "percept/rng.hpp"

using namespace percept;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(r, c);
  for (double& v : m.data) v = 2.0 * rng.next_unit() - 1.0;
  return m;
}

void BM_matmul_serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void BM_matmul_parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(n, n, 1);
  const Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

// The minibatch shape that dominates training: 50 samples through a
// 784-500-10 layer pair.
void BM_forward_minibatch(benchmark::State& state) {
  const Network net = build_network(
      784, {{500, Activation::Relu}, {10, Activation::Identity}}, 3);
  const Matrix x = random_matrix(50, 784, 4);
  for (auto _ : state) benchmark::DoNotOptimize(output_activations(net, x));
}

void BM_backprop_batch(benchmark::State& state) {
  const Network net = build_network(
      784, {{500, Activation::Relu}, {10, Activation::Identity}}, 3);
  const Matrix x = random_matrix(50, 784, 4);
  Matrix y(50, 10);
  SplitMix64 rng(5);
  for (std::size_t s = 0; s < 50; ++s) y(s, rng.next_below(10)) = 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        backprop_batch(net, x, y, Loss::SoftmaxCrossEntropy));
}

void BM_backprop_per_sample(benchmark::State& state) {
  const Network net = build_network(
      784, {{500, Activation::Relu}, {10, Activation::Identity}}, 3);
  const Matrix x = random_matrix(50, 784, 4);
  Matrix y(50, 10);
  SplitMix64 rng(5);
  for (std::size_t s = 0; s < 50; ++s) y(s, rng.next_below(10)) = 1.0;
  for (auto _ : state) {
    Gradients sum = zero_gradients_like(net);
    for (std::size_t s = 0; s < 50; ++s) {
      const Gradients g = backprop(net, to_vector(x.row(s)), to_vector(y.row(s)),
                                   Loss::SoftmaxCrossEntropy)
                              .grads;
      for (std::size_t l = 0; l < net.depth(); ++l) {
        for (std::size_t i = 0; i < g.w[l].data.size(); ++i)
          sum.w[l].data[i] += g.w[l].data[i];
        for (std::size_t j = 0; j < g.b[l].size(); ++j) sum.b[l][j] += g.b[l][j];
      }
    }
    benchmark::DoNotOptimize(sum);
  }
}

}  // namespace

BENCHMARK(BM_matmul_serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_matmul_parallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_forward_minibatch)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_backprop_batch)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_backprop_per_sample)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
