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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "augforge/kernels.h"
#include "json.hpp"

namespace augforge {

std::vector<size_t> nearest_neighbors(const FeatureVector& point,
                                      std::span<const FeatureVector> pool,
                                      size_t k,
                                      std::optional<size_t> exclude) {
  const size_t available = pool.size() - (exclude && *exclude < pool.size());
  if (k > available) {
    throw Error("nearest_neighbors: pool of " + std::to_string(available) +
                " is smaller than k = " + std::to_string(k));
  }
  const std::vector<double> d2 =
      kernels::parallel::squared_distances(point, pool);
  std::vector<size_t> order;
  order.reserve(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    if (exclude && *exclude == i) continue;
    order.push_back(i);
  }
  auto closer = [&](size_t a, size_t b) {
    return d2[a] != d2[b] ? d2[a] < d2[b] : a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
  order.resize(k);
  return order;
}

SyntheticVector interpolate(const FeatureVector& s, const FeatureVector& nb,
                            double u) {
  if (s.dim != nb.dim) throw Error("interpolate: dimension mismatch");
  if (!(u >= 0.0 && u <= 1.0)) throw Error("interpolate: u outside [0, 1]");
  SyntheticVector out;
  out.u = u;
  out.vector.dim = s.dim;
  size_t i = 0;
  size_t j = 0;
  auto emit = [&](uint32_t idx, double a, double b) {
    const double v = a + u * (b - a);
    if (v != 0.0) out.vector.entries.emplace_back(idx, v);
  };
  while (i < s.entries.size() || j < nb.entries.size()) {
    if (j == nb.entries.size() ||
        (i < s.entries.size() && s.entries[i].first < nb.entries[j].first)) {
      emit(s.entries[i].first, s.entries[i].second, 0.0);
      ++i;
    } else if (i == s.entries.size() ||
               nb.entries[j].first < s.entries[i].first) {
      emit(nb.entries[j].first, 0.0, nb.entries[j].second);
      ++j;
    } else {
      emit(s.entries[i].first, s.entries[i].second, nb.entries[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

double SmoteResult::final_ratio() const {
  const size_t m = n_minority + synthetic.size();
  return m == 0 ? std::numeric_limits<double>::infinity()
                : static_cast<double>(n_majority) / static_cast<double>(m);
}

size_t smote_deficit(size_t n_majority, size_t n_minority,
                     double target_ratio) {
  if (!(target_ratio >= 1.0)) throw Error("target_ratio must be >= 1");
  auto meets = [&](size_t m) {
    return m > 0 && static_cast<double>(n_majority) / static_cast<double>(m) <=
                        target_ratio;
  };
  auto need = static_cast<size_t>(
      std::ceil(static_cast<double>(n_majority) / target_ratio));
  while (!meets(need)) ++need;
  while (need > 1 && meets(need - 1)) --need;
  return need > n_minority ? need - n_minority : 0;
}

SmoteResult smote_balance(std::span<const FeatureVector> vectors,
                          std::span<const std::string> ids,
                          std::span<const int> labels, int category_id,
                          const SmoteParams& params) {
  if (vectors.size() != labels.size() || ids.size() != labels.size()) {
    throw Error("smote: vectors, ids and labels differ in length");
  }
  if (params.k < 1) throw Error("smote: k must be >= 1");
  SmoteResult result;
  result.category_id = category_id;
  size_t ones = 0;
  for (int v : labels) ones += v == 1;
  const size_t zeros = labels.size() - ones;
  result.minority_label = ones <= zeros ? 1 : 0;
  result.n_minority = std::min(ones, zeros);
  result.n_majority = std::max(ones, zeros);

  std::vector<size_t> minority;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == result.minority_label) minority.push_back(i);
  }
  const size_t deficit =
      smote_deficit(result.n_majority, result.n_minority, params.target_ratio);
  if (deficit == 0) return result;
  if (minority.size() < 2) {
    throw Error("smote: category " + std::to_string(category_id) +
                " has a minority pool of " + std::to_string(minority.size()) +
                "; at least 2 are needed to find a neighbor");
  }
  size_t k = params.k;
  if (k > minority.size() - 1) {
    k = minority.size() - 1;
    result.warnings.push_back("smote: category " + std::to_string(category_id) +
                              ": k clamped to " + std::to_string(k));
    log_warning(result.warnings.back());
  }
  result.k_used = k;

  std::vector<FeatureVector> pool;
  pool.reserve(minority.size());
  for (size_t i : minority) pool.push_back(vectors[i]);
  std::vector<std::vector<size_t>> neighbors(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    neighbors[i] = nearest_neighbors(pool[i], pool, k, i);
  }

  Rng rng(derive_seed(params.seed, "smote",
                      static_cast<uint64_t>(category_id)));
  result.synthetic.reserve(deficit);
  for (size_t n = 0; n < deficit; ++n) {
    const size_t s = rng.below(pool.size());
    const size_t nb = neighbors[s][rng.below(k)];
    const double u = rng.uniform01();
    SyntheticVector sv = interpolate(pool[s], pool[nb], u);
    sv.seed_id = ids[minority[s]];
    sv.neighbor_id = ids[minority[nb]];
    result.synthetic.push_back(std::move(sv));
  }
  return result;
}

std::string smote_to_jsonl(const SmoteResult& r) {
  std::string out;
  for (const auto& sv : r.synthetic) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [i, v] : sv.vector.entries) entries.push_back({i, v});
    nlohmann::json obj = {{"category", r.category_id},
                          {"label", r.minority_label},
                          {"n_majority", r.n_majority},
                          {"n_minority", r.n_minority},
                          {"seed_id", sv.seed_id},
                          {"neighbor_id", sv.neighbor_id},
                          {"u", sv.u},
                          {"dim", sv.vector.dim},
                          {"vector", entries}};
    out += obj.dump() + "\n";
  }
  return out;
}

SmoteResult smote_from_jsonl(const std::string& content) {
  SmoteResult r;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto obj = nlohmann::json::parse(line);
    r.category_id = obj.at("category").get<int>();
    r.minority_label = obj.at("label").get<int>();
    r.n_majority = obj.at("n_majority").get<size_t>();
    r.n_minority = obj.at("n_minority").get<size_t>();
    SyntheticVector sv;
    sv.seed_id = obj.at("seed_id").get<std::string>();
    sv.neighbor_id = obj.at("neighbor_id").get<std::string>();
    sv.u = obj.at("u").get<double>();
    sv.vector.dim = obj.at("dim").get<uint32_t>();
    for (const auto& e : obj.at("vector")) {
      sv.vector.entries.emplace_back(e.at(0).get<uint32_t>(),
                                     e.at(1).get<double>());
    }
    r.synthetic.push_back(std::move(sv));
  }
  return r;
}

}  // namespace augforge
