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

#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.h"

namespace augforge {
namespace {

struct Fixture {
  std::vector<FeatureVector> x;
  std::vector<int> y;
  std::vector<double> sw;
  std::vector<double> w;
};

Fixture make_fixture(uint64_t seed, size_t n, uint32_t dim) {
  Rng rng(seed);
  Fixture f;
  for (size_t i = 0; i < n; ++i) {
    f.x.push_back(oracle::random_sparse(rng, dim, 0.1));
    f.y.push_back(rng.bernoulli(0.3) ? 1 : 0);
    f.sw.push_back(0.5 + rng.uniform01());
  }
  for (uint32_t j = 0; j < dim; ++j) f.w.push_back(rng.uniform01() - 0.5);
  return f;
}

TEST(KernelsTest, SerialAndParallelGradientAgree) {
  const Fixture f = make_fixture(1, 3000, 200);
  for (bool weighted : {false, true}) {
    kernels::LogisticProblem p{f.x, f.y, {}, 1e-3};
    if (weighted) p.sample_weight = f.sw;
    const auto s = kernels::serial::logistic_loss_gradient(p, f.w, 0.2);
    const auto q = kernels::parallel::logistic_loss_gradient(p, f.w, 0.2);
    EXPECT_NEAR(s.loss, q.loss, 1e-12 * std::max(1.0, std::abs(s.loss)));
    EXPECT_NEAR(s.grad_b, q.grad_b, 1e-12);
    ASSERT_EQ(s.grad_w.size(), q.grad_w.size());
    for (size_t j = 0; j < s.grad_w.size(); ++j) {
      EXPECT_NEAR(s.grad_w[j], q.grad_w[j], 1e-12);
    }
  }
}

TEST(KernelsTest, ParallelGradientIsBitStableAcrossCalls) {
  const Fixture f = make_fixture(2, 2000, 64);
  kernels::LogisticProblem p{f.x, f.y, {}, 0.0};
  const auto a = kernels::parallel::logistic_loss_gradient(p, f.w, 0.0);
  const auto b = kernels::parallel::logistic_loss_gradient(p, f.w, 0.0);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grad_w, b.grad_w);
}

TEST(KernelsTest, LossMatchesDirectFormula) {
  const Fixture f = make_fixture(3, 50, 20);
  kernels::LogisticProblem p{f.x, f.y, {}, 0.01};
  const auto s = kernels::serial::logistic_loss_gradient(p, f.w, -0.3);
  EXPECT_NEAR(s.loss, oracle::logistic_loss(f.x, f.y, f.w, -0.3, 0.01), 1e-12);
}

TEST(KernelsTest, EmptyProblemIsL2Only) {
  const std::vector<double> w = {1.0, 2.0};
  kernels::LogisticProblem p{{}, {}, {}, 0.5};
  const auto s = kernels::serial::logistic_loss_gradient(p, w, 0.0);
  EXPECT_DOUBLE_EQ(s.loss, 0.25 * 5.0);
  EXPECT_DOUBLE_EQ(s.grad_w[1], 1.0);
}

TEST(KernelsTest, SquaredDistancesAgree) {
  Rng rng(4);
  std::vector<FeatureVector> pool;
  for (int i = 0; i < 500; ++i) pool.push_back(oracle::random_sparse(rng, 80, 0.2));
  const FeatureVector q = oracle::random_sparse(rng, 80, 0.2);
  const auto s = kernels::serial::squared_distances(q, pool);
  EXPECT_EQ(s, kernels::parallel::squared_distances(q, pool));
  for (size_t i = 0; i < pool.size(); ++i) {
    const auto a = oracle::dense(q);
    const auto b = oracle::dense(pool[i]);
    double d = 0;
    for (size_t j = 0; j < a.size(); ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
    EXPECT_NEAR(s[i], d, 1e-12);
  }
}

TEST(KernelsTest, TfidfBatchAgrees) {
  const std::vector<std::string> docs = {"like charges repel", "the carts move",
                                         "the carts stop", "charges repel"};
  const Vocabulary v = fit_vocabulary(docs, {1, 2, 1});
  const auto s = kernels::serial::tfidf_batch(docs, v);
  EXPECT_EQ(s, kernels::parallel::tfidf_batch(docs, v));
  for (size_t i = 0; i < docs.size(); ++i) {
    EXPECT_EQ(s[i], tfidf_vector(docs[i], v));
  }
}

TEST(KernelsTest, StableScalarFunctions) {
  EXPECT_DOUBLE_EQ(kernels::sigmoid(0.0), 0.5);
  EXPECT_NEAR(kernels::softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(kernels::softplus(1000.0)));
  EXPECT_NEAR(kernels::softplus(-800.0), 0.0, 1e-300);
}

}  // namespace
}  // namespace augforge
