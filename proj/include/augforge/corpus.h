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

#ifndef AUGFORGE_CORPUS_H_
#define AUGFORGE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "augforge/common.h"

namespace augforge {

enum class Origin { kHuman, kSmote, kLlm, kEase, kAlp };

std::string to_string(Origin origin);
Origin origin_from_string(const std::string& name);

enum class CategoryGroup { kScientificIdea, kInaccurateIdea };

std::string to_string(CategoryGroup group);

struct Category {
  int id = 0;
  std::string description;
  CategoryGroup group = CategoryGroup::kScientificIdea;
};

// Ordered list of rubric categories. The default schema has the eleven
// analytic-rubric categories, 1-6 scientific ideas and 7-11 inaccurate ideas.
class CategorySchema {
 public:
  CategorySchema() = default;
  explicit CategorySchema(std::vector<Category> categories);

  static CategorySchema default_schema();
  // Schema for an arbitrary id list; descriptions and groups come from the
  // default schema when the id is known there.
  static CategorySchema for_ids(const std::vector<int>& ids);

  const std::vector<Category>& categories() const { return categories_; }
  std::vector<int> ids() const;
  bool contains(int id) const;
  const Category& at(int id) const;
  size_t size() const { return categories_.size(); }

  bool operator==(const CategorySchema& other) const;

 private:
  std::vector<Category> categories_;
};

struct LabeledResponse {
  std::string id;
  std::string text;
  std::map<int, int> labels;  // category id -> 0/1
  Origin origin = Origin::kHuman;
  std::vector<std::string> parent_ids;
  // Set on synthetic responses: the category whose minority class the sample
  // was generated for. Per-category training only sees synthetic samples
  // aimed at that category.
  std::optional<int> target_category;

  bool operator==(const LabeledResponse& other) const = default;
};

// Throws Error describing the first violated invariant.
void validate_response(const LabeledResponse& response,
                       const CategorySchema& schema);

struct Corpus {
  CategorySchema schema;
  std::vector<LabeledResponse> responses;

  size_t size() const { return responses.size(); }
  bool operator==(const Corpus& other) const = default;
};

enum class DatasetFormat { kCsv, kJsonl };

DatasetFormat format_from_string(const std::string& name);
DatasetFormat format_from_path(const std::filesystem::path& path);

// Loads a corpus. CSV needs a header `id,text,cat<N>...`; JSONL needs one
// object per line with id, text and labels. Every row of a CSV, and every
// JSONL row without an explicit origin, is a human response.
Corpus load_dataset(const std::filesystem::path& path, DatasetFormat format);
void write_dataset(const Corpus& corpus, const std::filesystem::path& path,
                   DatasetFormat format);

// In-memory variants used by the file functions and by tests.
Corpus parse_csv_dataset(const std::string& content,
                         const std::string& source_name = "<csv>");
Corpus parse_jsonl_dataset(const std::string& content,
                           const std::string& source_name = "<jsonl>");
std::string render_csv_dataset(const Corpus& corpus);
std::string render_jsonl_dataset(const Corpus& corpus);

struct ImbalanceProfile {
  int category_id = 0;
  size_t n_majority = 0;
  size_t n_minority = 0;
  int minority_label = 1;
  // n_majority / n_minority; +inf when the minority is empty.
  double ratio = 0.0;
};

// Profile from raw label tallies. The minority label is the rarer one; on a
// tie it is 1.
ImbalanceProfile profile_counts(int category_id, size_t n_label0,
                                size_t n_label1);
ImbalanceProfile profile(const Corpus& corpus, int category_id);
std::vector<ImbalanceProfile> profile_all(const Corpus& corpus);

struct SplitSpec {
  double train_fraction = 0.8;
  uint64_t seed = 0;
  bool stratified = false;
  // Category whose label defines the strata when stratified.
  int stratify_category = 0;
};

// Uniform random partition with |train| = floor(train_fraction * N). Parts
// keep the corpus order of their members.
std::pair<Corpus, Corpus> split(const Corpus& corpus, const SplitSpec& spec);

// Synthetic stand-in corpus. Each category gets exactly `positives` responses
// labeled 1; positives carry a category signal sentence with probability
// signal_prob, drawn signal_count times. Negatives carry the signal with
// probability decoy_rate.
struct BenchmarkCategorySpec {
  int id = 0;
  size_t positives = 0;
  double signal_prob = 0.95;
  double decoy_rate = 0.0;
  size_t signal_count = 1;
  // Optional custom keywords. Empty means the built-in cart-item sentence
  // templates for this category id.
  std::vector<std::string> keywords;
};

struct BenchmarkSpec {
  size_t total = 0;
  uint64_t seed = 0;
  double because_join_prob = 0.25;
  std::vector<BenchmarkCategorySpec> categories;
};

// Counts mirroring the rubric imbalance of the cart item at N = 1,466.
BenchmarkSpec default_benchmark_spec(uint64_t seed = 20240101);

Corpus generate_benchmark_corpus(const BenchmarkSpec& spec);

// Sentence templates behind the generator, as bracketed trees where a leaf
// may list alternatives separated by '|'. Key 0 holds filler sentences.
const std::map<int, std::vector<std::string>>& benchmark_templates();

}  // namespace augforge

#endif  // AUGFORGE_CORPUS_H_
