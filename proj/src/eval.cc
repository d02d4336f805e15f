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

#include "augforge/eval.h"

#include <algorithm>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

namespace augforge {

ConfusionCounts confusion(std::span<const int> predictions,
                          std::span<const int> gold) {
  if (predictions.size() != gold.size()) {
    throw Error("confusion: " + std::to_string(predictions.size()) +
                " predictions for " + std::to_string(gold.size()) + " labels");
  }
  ConfusionCounts c;
  for (size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool g = gold[i] == 1;
    if (p && g) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error("metrics: empty confusion counts");
  auto ratio = [](size_t num, size_t den) {
    return den == 0 ? 0.0
                    : static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics m;
  m.accuracy = 100.0 * ratio(c.tp + c.tn, c.total());
  m.precision = 100.0 * ratio(c.tp, c.tp + c.fp);
  m.recall = 100.0 * ratio(c.tp, c.tp + c.fn);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

Metrics MetricsReport::group(const std::vector<int>& ids,
                             Averaging averaging) const {
  Metrics out;
  std::vector<int> present;
  for (int id : ids) {
    if (counts.count(id)) present.push_back(id);
  }
  if (present.empty()) return out;
  if (averaging == Averaging::kMicro) {
    ConfusionCounts pooled;
    for (int id : present) {
      const auto& c = counts.at(id);
      pooled.tp += c.tp;
      pooled.fp += c.fp;
      pooled.tn += c.tn;
      pooled.fn += c.fn;
    }
    return metrics(pooled);
  }
  for (int id : present) {
    const Metrics m = category(id);
    out.accuracy += m.accuracy;
    out.precision += m.precision;
    out.recall += m.recall;
    out.f1 += m.f1;
  }
  const double n = static_cast<double>(present.size());
  out.accuracy /= n;
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  return out;
}

ComparisonReport compare_report(const std::vector<MetricsReport>& reports,
                                const CategorySchema& schema,
                                const ReportOptions& options) {
  if (reports.empty()) throw Error("compare_report: no reports");
  for (const auto& r : reports) {
    std::vector<std::string> a = r.test_ids;
    std::vector<std::string> b = reports.front().test_ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw Error("compare_report: strategy '" + r.strategy +
                  "' was evaluated on a different test split than '" +
                  reports.front().strategy + "'");
    }
  }

  std::vector<const MetricsReport*> ordered;
  for (const auto& tag : strategy_order()) {
    for (const auto& r : reports) {
      if (r.strategy == tag) ordered.push_back(&r);
    }
  }
  for (const auto& r : reports) {
    if (std::find(strategy_order().begin(), strategy_order().end(),
                  r.strategy) == strategy_order().end()) {
      ordered.push_back(&r);
    }
  }

  std::vector<int> cats = options.categories;
  if (cats.empty()) {
    std::set<int> all;
    for (const auto& r : reports) {
      for (const auto& [id, _] : r.counts) all.insert(id);
    }
    cats.assign(all.begin(), all.end());
  }

  ComparisonReport out;
  for (const auto* r : ordered) {
    for (int id : cats) {
      if (!r->counts.count(id)) {
        out.incomplete.push_back(r->strategy);
        break;
      }
    }
  }

  std::vector<int> scientific;
  std::vector<int> inaccurate;
  for (int id : cats) {
    const bool sci = schema.contains(id)
                         ? schema.at(id).group == CategoryGroup::kScientificIdea
                         : id <= 6;
    (sci ? scientific : inaccurate).push_back(id);
  }

  struct Row {
    std::string label;
    std::vector<std::optional<Metrics>> cells;  // one per strategy
  };
  std::vector<Row> rows;
  for (int id : cats) {
    Row row{std::to_string(id), {}};
    for (const auto* r : ordered) {
      if (r->counts.count(id)) {
        const Metrics m = r->category(id);
        row.cells.push_back(m);
        if (m.accuracy >= options.masking_accuracy &&
            m.f1 <= options.masking_f1) {
          out.masked.emplace_back(r->strategy, id);
        }
      } else {
        row.cells.push_back(std::nullopt);
      }
    }
    rows.push_back(std::move(row));
  }
  auto add_group = [&](const std::string& label, const std::vector<int>& ids) {
    if (ids.empty()) return;
    Row row{label, {}};
    for (const auto* r : ordered) {
      row.cells.push_back(r->group(ids, options.averaging));
    }
    rows.push_back(std::move(row));
  };
  add_group("scientific_ideas", scientific);
  add_group("inaccurate_ideas", inaccurate);

  std::ostringstream csv;
  csv << "strategy,category,accuracy,precision,recall,f1\n";
  for (size_t s = 0; s < ordered.size(); ++s) {
    for (const auto& row : rows) {
      if (!row.cells[s]) continue;
      const Metrics& m = *row.cells[s];
      csv << ordered[s]->strategy << "," << row.label << ","
          << format_fixed(m.accuracy, 2) << "," << format_fixed(m.precision, 2)
          << "," << format_fixed(m.recall, 2) << "," << format_fixed(m.f1, 2)
          << "\n";
    }
  }
  out.csv = csv.str();

  std::ostringstream text;
  const char* kMetricNames[] = {"accuracy", "precision", "recall", "f1"};
  for (int k = 0; k < 4; ++k) {
    text << kMetricNames[k] << " (%)\n";
    text << std::left << std::setw(18) << "category";
    for (const auto* r : ordered) text << std::right << std::setw(10) << r->strategy;
    text << "\n";
    for (const auto& row : rows) {
      text << std::left << std::setw(18) << row.label;
      for (const auto& cell : row.cells) {
        std::string v = "-";
        if (cell) {
          const double x = k == 0   ? cell->accuracy
                           : k == 1 ? cell->precision
                           : k == 2 ? cell->recall
                                    : cell->f1;
          v = format_fixed(x, 2);
        }
        text << std::right << std::setw(10) << v;
      }
      text << "\n";
    }
    text << "\n";
  }
  if (!out.masked.empty()) {
    text << "accuracy masks poor minority detection (accuracy >= "
         << format_fixed(options.masking_accuracy, 0)
         << ", F1 <= " << format_fixed(options.masking_f1, 0) << "):\n";
    for (const auto& [strategy, id] : out.masked) {
      text << "  " << strategy << " category " << id << "\n";
    }
  }
  out.text = text.str();
  return out;
}

}  // namespace augforge
