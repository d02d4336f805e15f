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

#ifndef AUGFORGE_SMOTE_H_
#define AUGFORGE_SMOTE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augforge/features.h"

namespace augforge {

struct SmoteParams {
  size_t k = 5;
  double target_ratio = 1.0;
  uint64_t seed = 0;
};

struct SyntheticVector {
  FeatureVector vector;
  std::string seed_id;
  std::string neighbor_id;
  double u = 0.0;
};

// Indices of the k pool entries closest to `point` by euclidean distance,
// nearest first, ties by ascending index. `exclude` removes the point's own
// pool slot from consideration.
std::vector<size_t> nearest_neighbors(const FeatureVector& point,
                                      std::span<const FeatureVector> pool,
                                      size_t k,
                                      std::optional<size_t> exclude = {});

// seed + u * (neighbor - seed), componentwise, for u in [0, 1].
SyntheticVector interpolate(const FeatureVector& seed_vec,
                            const FeatureVector& neighbor_vec, double u);

struct SmoteResult {
  int category_id = 0;
  int minority_label = 1;
  size_t n_majority = 0;
  size_t n_minority = 0;  // before oversampling
  size_t k_used = 0;
  std::vector<SyntheticVector> synthetic;
  std::vector<std::string> warnings;

  double final_ratio() const;
};

// Number of extra minority samples needed so that
// n_majority / (n_minority + m) <= target_ratio, minimal m.
size_t smote_deficit(size_t n_majority, size_t n_minority,
                     double target_ratio);

// Oversamples the minority class of one category until the ratio reaches
// target_ratio. `vectors`, `ids` and `labels` are parallel arrays over the
// training set. The random stream is derived from (params.seed, category), so
// categories can be balanced concurrently without changing the output.
SmoteResult smote_balance(std::span<const FeatureVector> vectors,
                          std::span<const std::string> ids,
                          std::span<const int> labels, int category_id,
                          const SmoteParams& params);

// Audit records, one JSON object per synthetic vector.
std::string smote_to_jsonl(const SmoteResult& result);
SmoteResult smote_from_jsonl(const std::string& content);

}  // namespace augforge

#endif  // AUGFORGE_SMOTE_H_
