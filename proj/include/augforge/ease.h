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

#ifndef AUGFORGE_EASE_H_
#define AUGFORGE_EASE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "augforge/classifier.h"
#include "augforge/corpus.h"
#include "augforge/features.h"

namespace augforge {

struct Fragment {
  std::string text;
  std::string source_id;
  // Byte span [begin, end) within the source text.
  size_t begin = 0;
  size_t end = 0;
  size_t token_count = 0;
};

// Sentences split on . ! ?, then clauses split on " because ", " so " and
// " which " when both sides keep at least `min_clause_tokens` tokens. The
// connective itself belongs to neither side.
std::vector<Fragment> extract(const LabeledResponse& response,
                              size_t min_clause_tokens = 2);

struct SiftParams {
  size_t min_tokens = 5;
  double min_confidence = 0.8;
  bool dedup = true;
};

void validate(const SiftParams& params);

enum class Rejection { kTooShort, kWrongLabel, kLowConfidence, kDuplicate };

std::string to_string(Rejection r);

struct EaseCandidate {
  Fragment fragment;
  int acquired_label = 0;
  double confidence = 0.0;
  bool accepted = false;
  std::optional<Rejection> rejection;
};

// Labels one fragment with a labeler trained for the target category.
std::pair<int, double> acquire(const Fragment& fragment,
                               const Vocabulary& vocab, const Labeler& labeler);

// Marks candidates accepted or rejected in order and returns the indices of
// accepted ones. Checks run in the order too_short, wrong_label,
// low_confidence, duplicate. Duplicates are byte-equal to a text in
// `originals` or to an earlier acceptance. Evaluation stops once `limit`
// candidates are accepted; later candidates are left untouched.
std::vector<size_t> sift(std::vector<EaseCandidate>& candidates,
                         const SiftParams& params, int target_label,
                         const std::unordered_set<std::string>& originals,
                         size_t limit = SIZE_MAX);

// Appends accepted candidates as responses with origin ease. The target
// category gets the minority label; every other category gets 0.
Corpus employ(const Corpus& train,
              const std::vector<const EaseCandidate*>& accepted,
              int category_id, int minority_label);

struct EaseResult {
  Corpus corpus;
  size_t added = 0;
  double final_ratio = 0.0;
  std::vector<EaseCandidate> audit;
  std::vector<std::string> warnings;
};

// Full extract, acquire, sift, employ pass for one category. Fragments from
// minority-label responses are considered first, then the rest; each group
// is shuffled with the seed. Accepting stops once the ratio is at most
// target_ratio.
EaseResult ease_run(const Corpus& train, int category_id,
                    const Labeler& labeler, const Vocabulary& vocab,
                    const SiftParams& params, double target_ratio,
                    uint64_t seed);

std::string ease_audit_to_jsonl(const std::vector<EaseCandidate>& audit);

}  // namespace augforge

#endif  // AUGFORGE_EASE_H_
