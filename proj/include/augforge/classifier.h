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

#ifndef AUGFORGE_CLASSIFIER_H_
#define AUGFORGE_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "augforge/features.h"

namespace augforge {

struct Prediction {
  int label = 0;
  // Probability of the positive class.
  double probability = 0.0;

  // Probability assigned to the predicted label.
  double confidence() const {
    return label == 1 ? probability : 1.0 - probability;
  }
};

// Binary labeler over feature vectors. Implementations must reject predict()
// before train() and return probabilities in [0, 1].
class Labeler {
 public:
  virtual ~Labeler() = default;
  virtual void train(std::span<const FeatureVector> x,
                     std::span<const int> y) = 0;
  virtual Prediction predict(const FeatureVector& x) const = 0;
  virtual bool is_trained() const = 0;
};

struct LogRegParams {
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 1e-4;
  double threshold = 0.5;
  // Inverse-frequency example weights.
  bool class_weighting = false;
};

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogRegParams params;
  uint64_t seed = 0;
  // Loss at initialization followed by the loss after every epoch.
  std::vector<double> loss_history;
  double final_loss = 0.0;
  std::string vocab_hash;
};

// Full-batch gradient descent on the L2-regularized logistic loss from a zero
// initialization. Throws when the labels contain only one class.
LogRegModel train_logreg(std::span<const FeatureVector> x,
                         std::span<const int> y, const LogRegParams& params,
                         uint64_t seed, size_t dim);

Prediction predict(const LogRegModel& model, const FeatureVector& x);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

LossAndGradient loss_and_gradient(const LogRegModel& model,
                                  std::span<const FeatureVector> x,
                                  std::span<const int> y);

// Single JSON line: sparse weights, bias, hyperparameters, seed, vocab hash.
std::string model_to_jsonl(const LogRegModel& model);
LogRegModel model_from_jsonl(const std::string& line);

class LogRegLabeler : public Labeler {
 public:
  LogRegLabeler(LogRegParams params, uint64_t seed, size_t dim)
      : params_(params), seed_(seed), dim_(dim) {}

  void train(std::span<const FeatureVector> x,
             std::span<const int> y) override;
  Prediction predict(const FeatureVector& x) const override;
  bool is_trained() const override { return trained_; }
  const LogRegModel& model() const { return model_; }

 private:
  LogRegParams params_;
  uint64_t seed_;
  size_t dim_;
  bool trained_ = false;
  LogRegModel model_;
};

// Always answers `label` with full confidence. Handy for wiring tests.
class ConstantLabeler : public Labeler {
 public:
  explicit ConstantLabeler(int label) : label_(label) {}
  void train(std::span<const FeatureVector>, std::span<const int>) override {}
  Prediction predict(const FeatureVector&) const override {
    return {label_, label_ == 1 ? 1.0 : 0.0};
  }
  bool is_trained() const override { return true; }

 private:
  int label_;
};

}  // namespace augforge

#endif  // AUGFORGE_CLASSIFIER_H_
