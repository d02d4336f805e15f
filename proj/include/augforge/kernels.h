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

#ifndef AUGFORGE_KERNELS_H_
#define AUGFORGE_KERNELS_H_

// Data-parallel inner loops. Each kernel exists twice: a plain serial
// reference and an OpenMP version. The OpenMP versions are deterministic for
// any thread count (fixed block decomposition, ordered reduction), so results
// never depend on OMP_NUM_THREADS. Tests compare the two.

#include <span>
#include <string>
#include <vector>

#include "augforge/features.h"

namespace augforge::kernels {

struct LogisticProblem {
  std::span<const FeatureVector> x;
  std::span<const int> y;
  // Per-example weights; empty means all ones.
  std::span<const double> sample_weight;
  double l2 = 0.0;
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Mean (weighted) logistic loss over the examples plus (l2 / 2) * |w|^2, and
// its gradient. The bias is not regularized. With no examples the loss is the
// L2 term alone.
namespace serial {
LossGradient logistic_loss_gradient(const LogisticProblem& problem,
                                    std::span<const double> w, double b);
std::vector<double> squared_distances(const FeatureVector& query,
                                      std::span<const FeatureVector> pool);
std::vector<FeatureVector> tfidf_batch(std::span<const std::string> texts,
                                       const Vocabulary& vocab);
}  // namespace serial

namespace parallel {
LossGradient logistic_loss_gradient(const LogisticProblem& problem,
                                    std::span<const double> w, double b);
std::vector<double> squared_distances(const FeatureVector& query,
                                      std::span<const FeatureVector> pool);
std::vector<FeatureVector> tfidf_batch(std::span<const std::string> texts,
                                       const Vocabulary& vocab);
}  // namespace parallel

// Numerically stable log(1 + exp(z)).
double softplus(double z);
double sigmoid(double z);

}  // namespace augforge::kernels

#endif  // AUGFORGE_KERNELS_H_
