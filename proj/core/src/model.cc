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

#include "mpl/model.h"

#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace mpl {

namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;

struct LayerShape {
  int in;
  int out;
  std::int64_t offset;  // start of W; b follows at offset + in * out
};

std::vector<LayerShape> Layers(const Architecture& arch) {
  std::vector<LayerShape> layers;
  std::int64_t offset = 0;
  int in = arch.SplicedDim();
  for (int l = 0; l <= arch.n_hidden; ++l) {
    const int out = l < arch.n_hidden ? arch.hidden : arch.OutputDim();
    layers.push_back({in, out, offset});
    offset += static_cast<std::int64_t>(in) * out + out;
    in = out;
  }
  return layers;
}

Matrix Splice(const Matrix& features, int context) {
  const Eigen::Index T = features.rows(), D = features.cols();
  Matrix spliced = Matrix::Zero(T, (2 * context + 1) * D);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int j = -context; j <= context; ++j) {
      const Eigen::Index src = t + j;
      if (src < 0 || src >= T) continue;
      spliced.block(t, (j + context) * D, 1, D) = features.row(src);
    }
  }
  return spliced;
}

// activations[0] is the spliced input; activations[l] the output of hidden
// layer l; the last entry is the log-softmax grid.
std::vector<Matrix> RunForward(const ParamVector& params,
                               const Matrix& features) {
  const Architecture& arch = params.arch;
  if (features.cols() != arch.input_dim)
    throw InvalidArgument("feature width " + std::to_string(features.cols()) +
                          " does not match architecture D=" +
                          std::to_string(arch.input_dim));
  if (features.rows() < 1) throw InvalidArgument("empty feature matrix");
  if (params.values.size() != arch.ParamCount())
    throw InvalidArgument("parameter vector length does not match architecture");

  const std::vector<LayerShape> layers = Layers(arch);
  std::vector<Matrix> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(Splice(features, arch.context));
  for (size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& ls = layers[l];
    ConstMatrixMap w(params.values.data() + ls.offset, ls.in, ls.out);
    Eigen::Map<const Eigen::RowVectorXd> b(
        params.values.data() + ls.offset + ls.in * ls.out, ls.out);
    Matrix z = acts.back() * w;
    z.rowwise() += b;
    if (l + 1 < layers.size()) {
      acts.push_back(z.array().tanh().matrix());
    } else {
      const Eigen::VectorXd row_max = z.rowwise().maxCoeff();
      z.colwise() -= row_max;
      const Eigen::VectorXd lse = z.array().exp().rowwise().sum().log();
      z.colwise() -= lse;
      acts.push_back(std::move(z));
    }
  }
  return acts;
}

}  // namespace

std::int64_t Architecture::ParamCount() const {
  std::int64_t count = 0;
  for (const LayerShape& ls : Layers(*this))
    count += static_cast<std::int64_t>(ls.in) * ls.out + ls.out;
  return count;
}

void Architecture::Validate() const {
  if (input_dim < 1 || hidden < 1 || n_hidden < 1 || vocab_size < 1 ||
      context < 0)
    throw InvalidArgument(
        "architecture requires D, H, n_hidden, V >= 1 and context >= 0");
}

ParamVector ParamVector::Zeros(const Architecture& arch) {
  arch.Validate();
  return {arch, Vector::Zero(arch.ParamCount())};
}

void ParamVector::Validate() const {
  arch.Validate();
  if (values.size() != arch.ParamCount())
    throw InvalidArgument("parameter count " + std::to_string(values.size()) +
                          " does not match architecture (" +
                          std::to_string(arch.ParamCount()) + ")");
  if (!values.allFinite()) throw NumericalError("non-finite parameter value");
}

ParamVector InitParams(const Architecture& arch, std::uint64_t seed) {
  ParamVector params = ParamVector::Zeros(arch);
  std::mt19937_64 rng(seed);
  for (const LayerShape& ls : Layers(arch)) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(ls.in));
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ls.in) * ls.out; ++i)
      params.values[ls.offset + i] = normal(rng);
  }
  return params;
}

Matrix Forward(const ParamVector& params, const Matrix& features) {
  return RunForward(params, features).back();
}

LossAndGradient ComputeLossAndGradient(const ParamVector& params,
                                       const Matrix& features,
                                       const TokenSequence& label) {
  std::vector<Matrix> acts = RunForward(params, features);
  CtcLossResult ctc = CtcLossAndGrad(acts.back(), label);
  LossAndGradient out;
  out.status = ctc.status;
  if (!ctc.ok()) return out;
  out.loss = ctc.loss;
  out.grad = Vector::Zero(params.values.size());

  const std::vector<LayerShape> layers = Layers(params.arch);
  Matrix delta = std::move(ctc.grad);  // d loss / d pre-activation
  for (size_t l = layers.size(); l-- > 0;) {
    const LayerShape& ls = layers[l];
    const Matrix& input = acts[l];
    MatrixMap dw(out.grad.data() + ls.offset, ls.in, ls.out);
    Eigen::Map<Eigen::RowVectorXd> db(
        out.grad.data() + ls.offset + ls.in * ls.out, ls.out);
    dw.noalias() = input.transpose() * delta;
    db = delta.colwise().sum();
    if (l == 0) break;
    ConstMatrixMap w(params.values.data() + ls.offset, ls.in, ls.out);
    Matrix upstream = delta * w.transpose();
    delta = (upstream.array() * (1.0 - input.array().square())).matrix();
  }
  return out;
}

BatchLossAndGradient ComputeBatchLossAndGradient(const ParamVector& params,
                                                 std::span<const Example> batch,
                                                 int num_threads) {
  std::vector<LossAndGradient> results(batch.size());
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
      results[i] =
          ComputeLossAndGradient(params, *batch[i].features, *batch[i].label);
  };
  const size_t n = batch.size();
  const size_t threads =
      std::max<size_t>(1, std::min<size_t>(num_threads, n));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const size_t chunk = (n + threads - 1) / threads;
    for (size_t k = 0; k < threads; ++k) {
      pool.emplace_back([&, k] {
        try {
          work(k * chunk, std::min(n, (k + 1) * chunk));
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  BatchLossAndGradient total;
  total.grad = Vector::Zero(params.values.size());
  for (const LossAndGradient& r : results) {
    if (!r.ok()) {
      ++total.infeasible;
      continue;
    }
    total.loss += r.loss;
    total.grad += r.grad;
    ++total.used;
  }
  return total;
}

}  // namespace mpl
