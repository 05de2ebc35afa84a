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

#include "mpl/ctc.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mpl {

namespace {

constexpr double kGridTolerance = 1e-9;

// Blank-extended label: eps y1 eps y2 ... yL eps.
std::vector<int> ExtendLabel(const TokenSequence& label, int blank) {
  std::vector<int> ext(2 * label.size() + 1, blank);
  for (size_t l = 0; l < label.size(); ++l) ext[2 * l + 1] = label[l];
  return ext;
}

// Whether state s may be entered from s-2 (skipping the blank between two
// distinct labels).
bool CanSkip(const std::vector<int>& ext, size_t s, int blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

// alpha(t, s): log-prob of all prefixes of length t+1 ending in state s,
// including the emission at t.
Matrix ForwardVariables(const Matrix& grid, const std::vector<int>& ext,
                        int blank) {
  const Eigen::Index T = grid.rows();
  const size_t S = ext.size();
  Matrix alpha = Matrix::Constant(T, static_cast<Eigen::Index>(S), kLogZero);
  alpha(0, 0) = grid(0, blank);
  if (S > 1) alpha(0, 1) = grid(0, ext[1]);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (size_t s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, alpha(t - 1, s - 1));
      if (CanSkip(ext, s, blank)) acc = LogAdd(acc, alpha(t - 1, s - 2));
      if (acc != kLogZero) alpha(t, s) = acc + grid(t, ext[s]);
    }
  }
  return alpha;
}

// beta(t, s): log-prob of completing the path from state s at frame t,
// excluding the emission at t.
Matrix BackwardVariables(const Matrix& grid, const std::vector<int>& ext,
                         int blank) {
  const Eigen::Index T = grid.rows();
  const size_t S = ext.size();
  Matrix beta = Matrix::Constant(T, static_cast<Eigen::Index>(S), kLogZero);
  beta(T - 1, S - 1) = 0.0;
  if (S > 1) beta(T - 1, S - 2) = 0.0;
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (size_t s = 0; s < S; ++s) {
      double acc = beta(t + 1, s) + grid(t + 1, ext[s]);
      if (s + 1 < S) acc = LogAdd(acc, beta(t + 1, s + 1) + grid(t + 1, ext[s + 1]));
      if (s + 2 < S && CanSkip(ext, s + 2, blank))
        acc = LogAdd(acc, beta(t + 1, s + 2) + grid(t + 1, ext[s + 2]));
      beta(t, s) = acc;
    }
  }
  return beta;
}

double FinalLogProb(const Matrix& alpha) {
  const Eigen::Index T = alpha.rows(), S = alpha.cols();
  double p = alpha(T - 1, S - 1);
  if (S > 1) p = LogAdd(p, alpha(T - 1, S - 2));
  return p;
}

}  // namespace

double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

void ValidateGrid(const Matrix& grid) {
  if (grid.rows() < 1 || grid.cols() < 2)
    throw InvalidArgument("LogPosteriorGrid needs T >= 1 rows and V+1 >= 2 columns");
  for (Eigen::Index t = 0; t < grid.rows(); ++t) {
    double row_max = kLogZero;
    for (Eigen::Index k = 0; k < grid.cols(); ++k) {
      const double v = grid(t, k);
      if (!std::isfinite(v))
        throw InvalidArgument("LogPosteriorGrid entry (" + std::to_string(t) +
                              ", " + std::to_string(k) + ") is not finite");
      if (v > kGridTolerance)
        throw InvalidArgument("LogPosteriorGrid entry (" + std::to_string(t) +
                              ", " + std::to_string(k) + ") is positive");
      row_max = std::max(row_max, v);
    }
    const double lse =
        row_max + std::log((grid.row(t).array() - row_max).exp().sum());
    if (std::abs(lse) > kGridTolerance)
      throw InvalidArgument("LogPosteriorGrid row " + std::to_string(t) +
                            " is not normalized (log-sum-exp " +
                            std::to_string(lse) + ")");
  }
}

void ValidateLabel(const TokenSequence& label, int vocab_size) {
  for (int token : label) {
    if (token < 0 || token >= vocab_size)
      throw InvalidArgument("token " + std::to_string(token) +
                            " outside vocabulary [0, " +
                            std::to_string(vocab_size) + ")");
  }
}

int MinFramesForLabel(const TokenSequence& label) {
  int frames = static_cast<int>(label.size());
  for (size_t l = 1; l < label.size(); ++l)
    if (label[l] == label[l - 1]) ++frames;
  return frames;
}

TokenSequence CollapsePath(const std::vector<int>& path, int blank) {
  TokenSequence out;
  int prev = -1;
  for (int z : path) {
    if (z != prev && z != blank) out.push_back(z);
    prev = z;
  }
  return out;
}

double CtcLogProb(const Matrix& grid, const TokenSequence& label) {
  ValidateGrid(grid);
  const int blank = static_cast<int>(grid.cols()) - 1;
  ValidateLabel(label, blank);
  if (MinFramesForLabel(label) > grid.rows()) return kLogZero;
  return FinalLogProb(ForwardVariables(grid, ExtendLabel(label, blank), blank));
}

CtcLossResult CtcLossAndGrad(const Matrix& grid, const TokenSequence& label) {
  ValidateGrid(grid);
  const int blank = static_cast<int>(grid.cols()) - 1;
  ValidateLabel(label, blank);
  CtcLossResult result;
  if (MinFramesForLabel(label) > grid.rows()) {
    result.status = CtcStatus::kInfeasible;
    return result;
  }
  const std::vector<int> ext = ExtendLabel(label, blank);
  const Matrix alpha = ForwardVariables(grid, ext, blank);
  const Matrix beta = BackwardVariables(grid, ext, blank);
  const double log_p = FinalLogProb(alpha);
  if (!std::isfinite(log_p))
    throw NumericalError("CTC log-probability is not finite");

  result.loss = -log_p;
  // grad = softmax(logits) - occupancy; softmax(logits) == exp(grid).
  result.grad = grid.array().exp().matrix();
  const Eigen::Index T = grid.rows();
  std::vector<double> occ(grid.cols());
  for (Eigen::Index t = 0; t < T; ++t) {
    std::fill(occ.begin(), occ.end(), kLogZero);
    for (size_t s = 0; s < ext.size(); ++s)
      occ[ext[s]] = LogAdd(occ[ext[s]], alpha(t, s) + beta(t, s));
    for (Eigen::Index k = 0; k < grid.cols(); ++k)
      if (occ[k] != kLogZero) result.grad(t, k) -= std::exp(occ[k] - log_p);
  }
  if (!result.grad.allFinite())
    throw NumericalError("CTC gradient is not finite");
  return result;
}

TokenSequence BestPathDecode(const Matrix& grid) {
  ValidateGrid(grid);
  const int blank = static_cast<int>(grid.cols()) - 1;
  std::vector<int> path(grid.rows());
  for (Eigen::Index t = 0; t < grid.rows(); ++t) {
    int best = 0;
    for (int k = 1; k < grid.cols(); ++k)
      if (grid(t, k) > grid(t, best)) best = k;
    path[t] = best;
  }
  return CollapsePath(path, blank);
}

double BruteForceLogProb(const Matrix& grid, const TokenSequence& label) {
  ValidateGrid(grid);
  const int symbols = static_cast<int>(grid.cols());
  const int blank = symbols - 1;
  ValidateLabel(label, blank);
  const Eigen::Index T = grid.rows();
  std::uint64_t total = 1;
  for (Eigen::Index t = 0; t < T; ++t) {
    total *= static_cast<std::uint64_t>(symbols);
    if (total > kBruteForceMaxPaths)
      throw InvalidArgument("brute-force enumeration exceeds " +
                            std::to_string(kBruteForceMaxPaths) + " paths");
  }
  std::vector<int> path(T, 0);
  double log_sum = kLogZero;
  for (std::uint64_t n = 0; n < total; ++n) {
    std::uint64_t code = n;
    double log_path = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      path[t] = static_cast<int>(code % symbols);
      code /= symbols;
      log_path += grid(t, path[t]);
    }
    if (CollapsePath(path, blank) == label) log_sum = LogAdd(log_sum, log_path);
  }
  return log_sum;
}

}  // namespace mpl
