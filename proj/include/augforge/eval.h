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

#ifndef AUGFORGE_EVAL_H_
#define AUGFORGE_EVAL_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "augforge/corpus.h"

namespace augforge {

struct ConfusionCounts {
  size_t tp = 0;
  size_t fp = 0;
  size_t tn = 0;
  size_t fn = 0;

  size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Positive class is 1.
ConfusionCounts confusion(std::span<const int> predictions,
                          std::span<const int> gold);

// Percentages in [0, 100] at full precision; zero denominators give 0.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Metrics metrics(const ConfusionCounts& counts);

// Strategy tags in report column order.
inline const std::vector<std::string>& strategy_order() {
  static const std::vector<std::string> kOrder = {"baseline", "ft",  "smote",
                                                  "llm",      "ease", "alp"};
  return kOrder;
}

enum class Averaging { kMacro, kMicro };

struct MetricsReport {
  std::string strategy;
  std::map<int, ConfusionCounts> counts;  // per category
  // Ids of the test responses the counts were computed on.
  std::vector<std::string> test_ids;

  Metrics category(int id) const { return metrics(counts.at(id)); }
  // Mean over the listed categories: unweighted mean of per-category metrics
  // (macro) or metrics of pooled counts (micro).
  Metrics group(const std::vector<int>& ids, Averaging averaging) const;
};

struct ReportOptions {
  std::vector<int> categories;  // empty = union over reports
  Averaging averaging = Averaging::kMacro;
  double masking_accuracy = 90.0;
  double masking_f1 = 50.0;
};

struct ComparisonReport {
  std::string text;
  // strategy,category,accuracy,precision,recall,f1
  std::string csv;
  // (strategy, category) pairs with accuracy >= 90 but F1 <= 50.
  std::vector<std::pair<std::string, int>> masked;
  // Strategies lacking a requested category.
  std::vector<std::string> incomplete;
};

// Per-category tables plus scientific-idea (1-6) and inaccurate-idea (7-11)
// group means. Strategies appear in strategy_order(); unknown tags follow in
// input order. Throws when the reports were computed on different test sets.
ComparisonReport compare_report(const std::vector<MetricsReport>& reports,
                                const CategorySchema& schema,
                                const ReportOptions& options = {});

}  // namespace augforge

#endif  // AUGFORGE_EVAL_H_
