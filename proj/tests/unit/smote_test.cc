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

#include "augforge/smote.h"

#include <gtest/gtest.h>

#include <map>

#include "support/oracles.h"

namespace augforge {
namespace {

FeatureVector fv2(double a, double b) {
  std::vector<std::pair<uint32_t, double>> es;
  if (a != 0) es.emplace_back(0, a);
  if (b != 0) es.emplace_back(1, b);
  return make_feature_vector(std::move(es), 2);
}

TEST(NeighborsTest, OrderAndTies) {
  const std::vector<FeatureVector> pool = {fv2(1, 0), fv2(0, 3), fv2(2, 2)};
  EXPECT_EQ(nearest_neighbors(fv2(0, 0), pool, 2),
            (std::vector<size_t>{0, 2}));
  EXPECT_EQ(nearest_neighbors(fv2(0, 0), pool, 3).size(), 3u);
  const std::vector<FeatureVector> tie = {fv2(0, 1), fv2(1, 0), fv2(0, 1)};
  EXPECT_EQ(nearest_neighbors(fv2(0, 0), tie, 2), (std::vector<size_t>{0, 1}));
  EXPECT_EQ(nearest_neighbors(fv2(0, 1), tie, 1, 0), (std::vector<size_t>{2}));
}

TEST(InterpolateTest, Endpoints) {
  EXPECT_EQ(interpolate(fv2(1, 2), fv2(3, 6), 0.5).vector, fv2(2, 4));
  EXPECT_EQ(interpolate(fv2(1, 2), fv2(3, 6), 0.0).vector, fv2(1, 2));
  EXPECT_EQ(interpolate(fv2(1, 2), fv2(3, 6), 1.0).vector, fv2(3, 6));
  EXPECT_THROW(interpolate(fv2(1, 2), fv2(3, 6), 1.5), Error);
}

struct Pool {
  std::vector<FeatureVector> x;
  std::vector<std::string> ids;
  std::vector<int> y;
};

Pool make_pool(uint64_t seed, size_t n_major, size_t n_minor) {
  Rng rng(seed);
  Pool p;
  for (size_t i = 0; i < n_major + n_minor; ++i) {
    p.x.push_back(oracle::random_sparse(rng, 40, 0.2));
    p.ids.push_back("r" + std::to_string(i));
    p.y.push_back(i >= n_major ? 1 : 0);
  }
  return p;
}

TEST(SmoteTest, DeficitArithmetic) {
  EXPECT_EQ(smote_deficit(1409, 57, 1.0), 1352u);
  EXPECT_EQ(smote_deficit(10, 10, 1.0), 0u);
  EXPECT_EQ(smote_deficit(100, 10, 2.0), 40u);
}

TEST(SmoteTest, BalancesAndKeepsSegmentInvariant) {
  const Pool p = make_pool(1, 300, 12);
  const SmoteResult r = smote_balance(p.x, p.ids, p.y, 5, {5, 1.0, 3});
  EXPECT_EQ(r.synthetic.size(), 288u);
  EXPECT_LE(r.final_ratio(), 1.0 + 1.0 / 12);
  std::map<std::string, size_t> by_id;
  for (size_t i = 0; i < p.ids.size(); ++i) by_id[p.ids[i]] = i;
  for (const auto& s : r.synthetic) {
    const auto a = oracle::dense(p.x[by_id.at(s.seed_id)]);
    const auto b = oracle::dense(p.x[by_id.at(s.neighbor_id)]);
    EXPECT_EQ(p.y[by_id.at(s.neighbor_id)], 1);
    const auto v = oracle::dense(s.vector);
    for (size_t j = 0; j < v.size(); ++j) {
      EXPECT_NEAR(v[j], a[j] + s.u * (b[j] - a[j]), 1e-12);
    }
  }
}

TEST(SmoteTest, DeterministicAndRoundTrips) {
  const Pool p = make_pool(2, 100, 8);
  const SmoteResult a = smote_balance(p.x, p.ids, p.y, 3, {5, 1.0, 7});
  const SmoteResult b = smote_balance(p.x, p.ids, p.y, 3, {5, 1.0, 7});
  EXPECT_EQ(smote_to_jsonl(a), smote_to_jsonl(b));
  EXPECT_EQ(smote_to_jsonl(smote_from_jsonl(smote_to_jsonl(a))),
            smote_to_jsonl(a));
}

TEST(SmoteTest, SmallPoolClampsK) {
  const Pool p = make_pool(3, 50, 3);
  const SmoteResult r = smote_balance(p.x, p.ids, p.y, 1, {5, 1.0, 1});
  EXPECT_EQ(r.k_used, 2u);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(SmoteTest, InfeasiblePoolThrows) {
  const Pool p = make_pool(4, 100, 1);
  EXPECT_THROW(smote_balance(p.x, p.ids, p.y, 1, {}), Error);
}

TEST(SmoteTest, BalancedPoolAddsNothing) {
  const Pool p = make_pool(5, 10, 10);
  EXPECT_TRUE(smote_balance(p.x, p.ids, p.y, 1, {}).synthetic.empty());
}

}  // namespace
}  // namespace augforge
