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

#include "augforge/classifier.h"

#include <cmath>

#include "augforge/kernels.h"
#include "json.hpp"

namespace augforge {
namespace {

std::vector<double> class_weights(std::span<const int> y) {
  size_t ones = 0;
  for (int v : y) ones += v == 1;
  const size_t zeros = y.size() - ones;
  const double n = static_cast<double>(y.size());
  const double w1 = n / (2.0 * static_cast<double>(ones));
  const double w0 = n / (2.0 * static_cast<double>(zeros));
  std::vector<double> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] == 1 ? w1 : w0;
  return out;
}

void check_params(const LogRegParams& p) {
  if (!(p.threshold > 0.0 && p.threshold < 1.0)) {
    throw Error("decision threshold must lie in (0, 1)");
  }
  if (!(p.learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (p.epochs < 0) throw Error("epochs must be non-negative");
  if (p.l2 < 0.0) throw Error("L2 strength must be non-negative");
}

}  // namespace

LogRegModel train_logreg(std::span<const FeatureVector> x,
                         std::span<const int> y, const LogRegParams& params,
                         uint64_t seed, size_t dim) {
  check_params(params);
  if (x.size() != y.size()) throw Error("label count mismatch");
  size_t ones = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error("labels must be 0 or 1");
    ones += v == 1;
  }
  if (ones == 0 || ones == y.size()) {
    throw Error("training set needs at least one example of each class");
  }

  LogRegModel m;
  m.params = params;
  m.seed = seed;
  m.weights.assign(dim, 0.0);
  std::vector<double> sw;
  if (params.class_weighting) sw = class_weights(y);
  kernels::LogisticProblem problem{x, y, sw, params.l2};

  auto lg = kernels::parallel::logistic_loss_gradient(problem, m.weights,
                                                      m.bias);
  m.loss_history.push_back(lg.loss);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (size_t j = 0; j < dim; ++j) {
      m.weights[j] -= params.learning_rate * lg.grad_w[j];
    }
    m.bias -= params.learning_rate * lg.grad_b;
    lg = kernels::parallel::logistic_loss_gradient(problem, m.weights, m.bias);
    m.loss_history.push_back(lg.loss);
  }
  m.final_loss = m.loss_history.back();
  return m;
}

Prediction predict(const LogRegModel& model, const FeatureVector& x) {
  if (x.dim != model.weights.size()) {
    throw Error("feature dimension mismatch: model has " +
                std::to_string(model.weights.size()) + ", vector has " +
                std::to_string(x.dim));
  }
  Prediction p;
  p.probability = kernels::sigmoid(x.dot(model.weights) + model.bias);
  p.label = p.probability >= model.params.threshold ? 1 : 0;
  return p;
}

LossAndGradient loss_and_gradient(const LogRegModel& model,
                                  std::span<const FeatureVector> x,
                                  std::span<const int> y) {
  std::vector<double> sw;
  if (model.params.class_weighting && !y.empty()) sw = class_weights(y);
  kernels::LogisticProblem problem{x, y, sw, model.params.l2};
  auto lg = kernels::serial::logistic_loss_gradient(problem, model.weights,
                                                    model.bias);
  return {lg.loss, std::move(lg.grad_w), lg.grad_b};
}

std::string model_to_jsonl(const LogRegModel& m) {
  nlohmann::json weights = nlohmann::json::array();
  for (size_t j = 0; j < m.weights.size(); ++j) {
    if (m.weights[j] != 0.0) weights.push_back({j, m.weights[j]});
  }
  nlohmann::json obj = {
      {"dim", m.weights.size()},
      {"weights", weights},
      {"bias", m.bias},
      {"learning_rate", m.params.learning_rate},
      {"epochs", m.params.epochs},
      {"l2", m.params.l2},
      {"threshold", m.params.threshold},
      {"class_weighting", m.params.class_weighting},
      {"seed", m.seed},
      {"final_loss", m.final_loss},
      {"vocab_hash", m.vocab_hash},
  };
  return obj.dump() + "\n";
}

LogRegModel model_from_jsonl(const std::string& line) {
  const auto obj = nlohmann::json::parse(line);
  LogRegModel m;
  m.weights.assign(obj.at("dim").get<size_t>(), 0.0);
  for (const auto& w : obj.at("weights")) {
    const auto j = w.at(0).get<size_t>();
    if (j >= m.weights.size()) throw Error("model weight index out of range");
    m.weights[j] = w.at(1).get<double>();
  }
  m.bias = obj.at("bias").get<double>();
  m.params.learning_rate = obj.at("learning_rate").get<double>();
  m.params.epochs = obj.at("epochs").get<int>();
  m.params.l2 = obj.at("l2").get<double>();
  m.params.threshold = obj.at("threshold").get<double>();
  m.params.class_weighting = obj.at("class_weighting").get<bool>();
  m.seed = obj.at("seed").get<uint64_t>();
  m.final_loss = obj.at("final_loss").get<double>();
  m.vocab_hash = obj.at("vocab_hash").get<std::string>();
  return m;
}

void LogRegLabeler::train(std::span<const FeatureVector> x,
                          std::span<const int> y) {
  model_ = train_logreg(x, y, params_, seed_, dim_);
  trained_ = true;
}

Prediction LogRegLabeler::predict(const FeatureVector& x) const {
  if (!trained_) throw Error("labeler used before training");
  return augforge::predict(model_, x);
}

}  // namespace augforge
