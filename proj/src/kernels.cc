// Copyright 2026 The AugForge Authors
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

#include "augforge/kernels.h"

#include <algorithm>
#include <cmath>

namespace augforge::kernels {
namespace {

// Block size depends only on the problem size so the reduction tree is the
// same for every thread count.
constexpr size_t kBlock = 256;

void check_problem(const LogisticProblem& p, std::span<const double> w) {
  if (p.x.size() != p.y.size()) throw Error("label count mismatch");
  if (!p.sample_weight.empty() && p.sample_weight.size() != p.x.size()) {
    throw Error("sample weight count mismatch");
  }
  for (const auto& v : p.x) {
    if (v.dim != w.size()) throw Error("feature dimension mismatch");
  }
}

// Adds the contribution of examples [lo, hi) to (loss, grad_w, grad_b).
void accumulate(const LogisticProblem& p, std::span<const double> w, double b,
                size_t lo, size_t hi, double& loss, std::vector<double>& gw,
                double& gb) {
  for (size_t i = lo; i < hi; ++i) {
    const double z = p.x[i].dot(w) + b;
    const double sw = p.sample_weight.empty() ? 1.0 : p.sample_weight[i];
    const int y = p.y[i];
    loss += sw * (y == 1 ? softplus(-z) : softplus(z));
    const double g = sw * (sigmoid(z) - static_cast<double>(y));
    for (const auto& [j, v] : p.x[i].entries) gw[j] += g * v;
    gb += g;
  }
}

LossGradient finish(const LogisticProblem& p, std::span<const double> w,
                    double loss, std::vector<double> gw, double gb) {
  const size_t n = p.x.size();
  LossGradient out;
  double reg = 0.0;
  for (double wi : w) reg += wi * wi;
  if (n > 0) {
    const double inv = 1.0 / static_cast<double>(n);
    loss *= inv;
    for (double& g : gw) g *= inv;
    gb *= inv;
  }
  for (size_t j = 0; j < w.size(); ++j) gw[j] += p.l2 * w[j];
  out.loss = loss + 0.5 * p.l2 * reg;
  out.grad_w = std::move(gw);
  out.grad_b = gb;
  return out;
}

}  // namespace

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace serial {

LossGradient logistic_loss_gradient(const LogisticProblem& p,
                                    std::span<const double> w, double b) {
  check_problem(p, w);
  double loss = 0.0;
  double gb = 0.0;
  std::vector<double> gw(w.size(), 0.0);
  accumulate(p, w, b, 0, p.x.size(), loss, gw, gb);
  return finish(p, w, loss, std::move(gw), gb);
}

std::vector<double> squared_distances(const FeatureVector& query,
                                      std::span<const FeatureVector> pool) {
  std::vector<double> out(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    out[i] = squared_distance(query, pool[i]);
  }
  return out;
}

std::vector<FeatureVector> tfidf_batch(std::span<const std::string> texts,
                                       const Vocabulary& vocab) {
  std::vector<FeatureVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(tfidf_vector(t, vocab));
  return out;
}

}  // namespace serial

namespace parallel {

LossGradient logistic_loss_gradient(const LogisticProblem& p,
                                    std::span<const double> w, double b) {
  check_problem(p, w);
  const size_t n = p.x.size();
  const size_t n_blocks = (n + kBlock - 1) / kBlock;
  if (n_blocks <= 1) return serial::logistic_loss_gradient(p, w, b);

  std::vector<double> block_loss(n_blocks, 0.0);
  std::vector<double> block_gb(n_blocks, 0.0);
  std::vector<std::vector<double>> block_gw(n_blocks);
  const auto nb = static_cast<long>(n_blocks);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nb; ++k) {
    const size_t lo = static_cast<size_t>(k) * kBlock;
    const size_t hi = std::min(n, lo + kBlock);
    block_gw[k].assign(w.size(), 0.0);
    accumulate(p, w, b, lo, hi, block_loss[k], block_gw[k], block_gb[k]);
  }

  // Ordered reduction.
  double loss = 0.0;
  double gb = 0.0;
  std::vector<double> gw(w.size(), 0.0);
  for (size_t k = 0; k < n_blocks; ++k) {
    loss += block_loss[k];
    gb += block_gb[k];
  }
  const auto dim = static_cast<long>(w.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < dim; ++j) {
    double s = 0.0;
    for (size_t k = 0; k < n_blocks; ++k) s += block_gw[k][j];
    gw[j] = s;
  }
  return finish(p, w, loss, std::move(gw), gb);
}

std::vector<double> squared_distances(const FeatureVector& query,
                                      std::span<const FeatureVector> pool) {
  std::vector<double> out(pool.size());
  const auto n = static_cast<long>(pool.size());
#pragma omp parallel for schedule(static) if (n > 512)
  for (long i = 0; i < n; ++i) out[i] = squared_distance(query, pool[i]);
  return out;
}

std::vector<FeatureVector> tfidf_batch(std::span<const std::string> texts,
                                       const Vocabulary& vocab) {
  std::vector<FeatureVector> out(texts.size());
  const auto n = static_cast<long>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) out[i] = tfidf_vector(texts[i], vocab);
  return out;
}

}  // namespace parallel
}  // namespace augforge::kernels
