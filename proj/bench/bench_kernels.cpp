/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference kernels against the OpenMP production kernels.
//
//   ./zdce_bench --benchmark_filter=Conv

#include <random>

#include <benchmark/benchmark.h>

#include "zdce/dce_net.hpp"
#include "zdce/kernels.hpp"
#include "zdce/reference.hpp"

using namespace zdce;

namespace {

Tensor random_tensor(Shape s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(s);
  for (Real& v : t.data())
    v = static_cast<Real>(u(rng));
  return t;
}

// Args: channels in/out, spatial size.
void BM_ConvReference(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Tensor x = random_tensor({1, c, s, s}, 1);
  const Tensor k = random_tensor({32, c, 3, 3}, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::conv3x3(x, k, nullptr));
  state.SetItemsProcessed(state.iterations() * 32LL * c * 9 * s * s);
}

void BM_ConvKernel(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int s = static_cast<int>(state.range(1));
  const Tensor x = random_tensor({1, c, s, s}, 1);
  const Tensor k = random_tensor({32, c, 3, 3}, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::conv3x3(x, k, nullptr));
  state.SetItemsProcessed(state.iterations() * 32LL * c * 9 * s * s);
}

void BM_ConvBackwardInputReference(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Tensor g = random_tensor({1, 32, s, s}, 1);
  const Tensor k = random_tensor({32, 32, 3, 3}, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::conv3x3_backward_input(g, k));
}

void BM_ConvBackwardInputKernel(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Tensor g = random_tensor({1, 32, s, s}, 1);
  const Tensor k = random_tensor({32, 32, 3, 3}, 2);
  Tensor gin({1, 32, s, s});
  for (auto _ : state)
    kernels::conv3x3_backward_input(g, k, gin);
  benchmark::DoNotOptimize(gin.ptr());
}

void BM_ConvBackwardWeightsReference(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Tensor x = random_tensor({1, 32, s, s}, 1);
  const Tensor g = random_tensor({1, 32, s, s}, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::conv3x3_backward_weights(x, g));
}

void BM_ConvBackwardWeightsKernel(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const Tensor x = random_tensor({1, 32, s, s}, 1);
  const Tensor g = random_tensor({1, 32, s, s}, 2);
  Tensor gk({32, 32, 3, 3});
  Tensor gb({32, 1, 1, 1});
  for (auto _ : state)
    kernels::conv3x3_backward_weights(x, g, gk, &gb);
  benchmark::DoNotOptimize(gk.ptr());
}

void BM_Forward(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const NetworkWeights w = init_weights(ArchConfig{}, 0);
  Tensor x = random_tensor({1, 3, s, s}, 3);
  for (Real& v : x.data())
    v = v * Real(0.5) + Real(0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(forward(w, x));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(mac_count(ArchConfig{}, s, s)));
}

} // namespace

BENCHMARK(BM_ConvReference)->Args({32, 64})->Args({64, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvKernel)->Args({32, 64})->Args({64, 64})->Args({64, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackwardInputReference)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackwardInputKernel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackwardWeightsReference)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackwardWeightsKernel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Forward)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
