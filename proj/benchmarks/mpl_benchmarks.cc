// Copyright 2026 The mpl-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "mpl/augment.h"
#include "mpl/ctc.h"
#include "mpl/model.h"
#include "mpl/mpl.h"

namespace mpl {
namespace {

Matrix RandomGrid(int frames, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 2.0);
  Matrix g(frames, classes);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < classes; ++k) g(t, k) = n(rng);
    const double m = g.row(t).maxCoeff();
    g.row(t).array() -= m + std::log((g.row(t).array() - m).exp().sum());
  }
  return g;
}

Matrix RandomFeatures(int frames, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(frames, dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

TokenSequence Label(int length, int vocab) {
  TokenSequence y(length);
  for (int i = 0; i < length; ++i) y[i] = i % vocab;
  return y;
}

void BM_CtcLossAndGrad(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const Matrix grid = RandomGrid(frames, 9, 1);
  const TokenSequence y = Label(frames / 4, 8);
  for (auto _ : state) benchmark::DoNotOptimize(CtcLossAndGrad(grid, y));
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_CtcLossAndGrad)->Arg(24)->Arg(96)->Arg(384);

void BM_Forward(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const ParamVector p = InitParams(Architecture{}, 1);
  const Matrix x = RandomFeatures(frames, 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Forward(p, x));
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_Forward)->Arg(24)->Arg(96);

void BM_LossAndGradient(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  const ParamVector p = InitParams(Architecture{}, 1);
  const Matrix x = RandomFeatures(frames, 16, 3);
  const TokenSequence y = Label(frames / 4, 8);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeLossAndGradient(p, x, y));
  state.SetItemsProcessed(state.iterations() * frames);
}
BENCHMARK(BM_LossAndGradient)->Arg(24)->Arg(96);

void BM_BatchGradient(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const ParamVector p = InitParams(Architecture{}, 1);
  std::vector<Matrix> xs;
  std::vector<TokenSequence> ys;
  for (int i = 0; i < 16; ++i) {
    xs.push_back(RandomFeatures(24, 16, 10 + i));
    ys.push_back(Label(6, 8));
  }
  std::vector<Example> batch;
  for (int i = 0; i < 16; ++i) batch.push_back({&xs[i], &ys[i]});
  for (auto _ : state)
    benchmark::DoNotOptimize(ComputeBatchLossAndGradient(p, batch, threads));
}
BENCHMARK(BM_BatchGradient)->Arg(1)->Arg(4);

void BM_PseudoLabel(benchmark::State& state) {
  const ParamVector p = InitParams(Architecture{}, 1);
  const Matrix x = RandomFeatures(24, 16, 4);
  for (auto _ : state) benchmark::DoNotOptimize(GeneratePseudoLabel(p, x));
}
BENCHMARK(BM_PseudoLabel);

void BM_EmaUpdate(benchmark::State& state) {
  ParamVector offline = InitParams(Architecture{}, 1);
  const ParamVector online = InitParams(Architecture{}, 2);
  for (auto _ : state) {
    EmaUpdateInPlace(offline, online, 0.995);
    benchmark::DoNotOptimize(offline.values.data());
  }
}
BENCHMARK(BM_EmaUpdate);

void BM_Augment(benchmark::State& state) {
  const Matrix x = RandomFeatures(24, 16, 5);
  const AugmentPolicy policy = AugmentPolicy::Default(16);
  std::mt19937_64 rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(ApplyAugment(x, policy, rng));
}
BENCHMARK(BM_Augment);

}  // namespace
}  // namespace mpl

BENCHMARK_MAIN();
