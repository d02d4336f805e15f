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

#ifndef AUGFORGE_FEATURES_H_
#define AUGFORGE_FEATURES_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "augforge/common.h"

namespace augforge {

// Lowercased alphanumeric runs; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

// Sparse vector with entries sorted by index and no explicit zeros.
struct FeatureVector {
  std::vector<std::pair<uint32_t, double>> entries;
  uint32_t dim = 0;

  double dot(std::span<const double> dense) const;
  double squared_norm() const;
  double norm() const;
  bool operator==(const FeatureVector& other) const = default;
};

// Builds a FeatureVector from (index, value) pairs in any order. Throws when
// an index is out of range or a value is not finite.
FeatureVector make_feature_vector(std::vector<std::pair<uint32_t, double>> es,
                                  uint32_t dim);

double squared_distance(const FeatureVector& a, const FeatureVector& b);

struct VocabularyParams {
  int min_ngram = 1;
  int max_ngram = 2;
  size_t min_df = 2;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  // Terms sorted lexicographically; bigrams are joined with '_'.
  static Vocabulary fit(std::span<const std::string> documents,
                        const VocabularyParams& params);

  size_t size() const { return terms_.size(); }
  size_t document_count() const { return n_docs_; }
  const VocabularyParams& params() const { return params_; }
  const std::vector<std::string>& terms() const { return terms_; }
  // -1 when absent.
  int64_t index_of(const std::string& term) const;
  size_t df(size_t index) const { return df_[index]; }
  double idf(size_t index) const;

  // Terms (unigrams and n-grams per params) of one document, repeated per
  // occurrence.
  std::vector<std::string> document_terms(std::string_view text) const;

  // JSONL sidecar: a header object then one {term, index, df} per line.
  std::string to_jsonl() const;
  static Vocabulary from_jsonl(const std::string& content);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);
  // Content hash of the sidecar form.
  std::string hash() const;

 private:
  void rebuild_index();

  VocabularyParams params_;
  size_t n_docs_ = 0;
  std::vector<std::string> terms_;
  std::vector<size_t> df_;
  std::unordered_map<std::string, uint32_t> index_;
};

// Convenience wrapper over Vocabulary::fit. Throws on an empty corpus.
Vocabulary fit_vocabulary(std::span<const std::string> documents,
                          const VocabularyParams& params = {});

// Raw count x (ln(N/df) + 1), L2-normalized. Out-of-vocabulary terms are
// ignored; a document with no known terms maps to the zero vector.
FeatureVector tfidf_vector(std::string_view text, const Vocabulary& vocab);

}  // namespace augforge

#endif  // AUGFORGE_FEATURES_H_
