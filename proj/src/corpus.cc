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

#include "augforge/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace augforge {
namespace {

using nlohmann::json;

const std::vector<Category>& default_categories() {
  static const std::vector<Category> kCategories = {
      {1, "Predicts the direction of cart motion (carts move apart).",
       CategoryGroup::kScientificIdea},
      {2, "Justifies motion with like charges repelling.",
       CategoryGroup::kScientificIdea},
      {3, "Predicts when or whether the carts stop or slow down.",
       CategoryGroup::kScientificIdea},
      {4, "Uses Coulombic reasoning with distance to explain stopping.",
       CategoryGroup::kScientificIdea},
      {5, "Explains stopping with energy ideas only.",
       CategoryGroup::kScientificIdea},
      {6, "Integrates energy and Coulomb's law to explain motion and stopping.",
       CategoryGroup::kScientificIdea},
      {7, "Labels the interaction as magnetic.",
       CategoryGroup::kInaccurateIdea},
      {8, "Vague or conflated charge, force or field terminology.",
       CategoryGroup::kInaccurateIdea},
      {9, "Incorrect interpretation of Coulomb's law.",
       CategoryGroup::kInaccurateIdea},
      {10, "Uses energy inaccurately or unproductively.",
       CategoryGroup::kInaccurateIdea},
      {11, "Notes potential energy changes without a force-based reason.",
       CategoryGroup::kInaccurateIdea},
  };
  return kCategories;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << data;
  if (!out) throw Error("write failed for " + path.string());
}

// One parsed CSV record with the physical line it started on.
struct CsvRecord {
  size_t line = 0;
  std::vector<std::string> fields;
};

// RFC-4180: quoted fields may contain commas, CR/LF and doubled quotes.
std::vector<CsvRecord> parse_csv_records(const std::string& content,
                                         const std::string& source) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  size_t line = 1;
  current.line = 1;
  bool record_has_content = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
    record_has_content = false;
  };

  for (size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error(source + ":" + std::to_string(line) +
                      ": malformed row: stray quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        record_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        if (field_was_quoted) {
          throw Error(source + ":" + std::to_string(line) +
                      ": malformed row: text after closing quote");
        }
        record_has_content = true;
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(source + ":" + std::to_string(current.line) +
                ": malformed row: unterminated quoted field");
  }
  if (record_has_content || !field.empty()) end_record();
  return records;
}

std::string csv_escape(const std::string& s) {
  const bool needs_quotes =
      s.find_first_of(",\"\r\n") != std::string::npos || s.empty() ||
      s.front() == ' ' || s.back() == ' ';
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

int parse_label(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw Error(where + ": missing label value");
  if (v == "0") return 0;
  if (v == "1") return 1;
  throw Error(where + ": unknown label value '" + v + "' (expected 0 or 1)");
}

void check_duplicate(std::set<std::string>& seen, const std::string& id,
                     const std::string& where) {
  if (!seen.insert(id).second) {
    throw Error(where + ": duplicate id '" + id + "'");
  }
}

}  // namespace

std::string to_string(Origin origin) {
  switch (origin) {
    case Origin::kHuman:
      return "human";
    case Origin::kSmote:
      return "smote";
    case Origin::kLlm:
      return "llm";
    case Origin::kEase:
      return "ease";
    case Origin::kAlp:
      return "alp";
  }
  return "human";
}

Origin origin_from_string(const std::string& name) {
  if (name == "human") return Origin::kHuman;
  if (name == "smote") return Origin::kSmote;
  if (name == "llm") return Origin::kLlm;
  if (name == "ease") return Origin::kEase;
  if (name == "alp") return Origin::kAlp;
  throw Error("unknown origin '" + name + "'");
}

std::string to_string(CategoryGroup group) {
  return group == CategoryGroup::kScientificIdea ? "scientific_idea"
                                                 : "inaccurate_idea";
}

CategorySchema::CategorySchema(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  std::set<int> seen;
  for (const auto& c : categories_) {
    if (!seen.insert(c.id).second) {
      throw Error("duplicate category id " + std::to_string(c.id));
    }
  }
}

CategorySchema CategorySchema::default_schema() {
  return CategorySchema(default_categories());
}

CategorySchema CategorySchema::for_ids(const std::vector<int>& ids) {
  std::vector<Category> out;
  for (int id : ids) {
    auto it = std::find_if(default_categories().begin(),
                           default_categories().end(),
                           [id](const Category& c) { return c.id == id; });
    if (it != default_categories().end()) {
      out.push_back(*it);
    } else {
      out.push_back({id, "category " + std::to_string(id),
                     CategoryGroup::kScientificIdea});
    }
  }
  return CategorySchema(std::move(out));
}

std::vector<int> CategorySchema::ids() const {
  std::vector<int> out;
  for (const auto& c : categories_) out.push_back(c.id);
  return out;
}

bool CategorySchema::contains(int id) const {
  return std::any_of(categories_.begin(), categories_.end(),
                     [id](const Category& c) { return c.id == id; });
}

const Category& CategorySchema::at(int id) const {
  for (const auto& c : categories_) {
    if (c.id == id) return c;
  }
  throw Error("unknown category " + std::to_string(id));
}

bool CategorySchema::operator==(const CategorySchema& other) const {
  if (categories_.size() != other.categories_.size()) return false;
  for (size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].id != other.categories_[i].id ||
        categories_[i].group != other.categories_[i].group) {
      return false;
    }
  }
  return true;
}

void validate_response(const LabeledResponse& r, const CategorySchema& schema) {
  if (r.id.empty()) throw Error("response with empty id");
  if (trim(r.text).empty()) {
    throw Error("response " + r.id + ": text is empty");
  }
  for (const auto& [cat, label] : r.labels) {
    if (!schema.contains(cat)) {
      throw Error("response " + r.id + ": category " + std::to_string(cat) +
                  " is not in the schema");
    }
    if (label != 0 && label != 1) {
      throw Error("response " + r.id + ": label must be 0 or 1");
    }
  }
  const bool human = r.origin == Origin::kHuman;
  if (human != r.parent_ids.empty()) {
    throw Error("response " + r.id +
                ": human responses have no parents and synthetic ones do");
  }
}

DatasetFormat format_from_string(const std::string& name) {
  if (name == "csv") return DatasetFormat::kCsv;
  if (name == "jsonl") return DatasetFormat::kJsonl;
  throw Error("unknown dataset format '" + name + "'");
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DatasetFormat::kCsv
                                    : DatasetFormat::kJsonl;
}

Corpus parse_csv_dataset(const std::string& content,
                         const std::string& source) {
  std::vector<CsvRecord> records = parse_csv_records(content, source);
  if (records.empty()) throw Error(source + ": empty file, no header");
  const CsvRecord& header = records.front();
  if (header.fields.size() < 3 || trim(header.fields[0]) != "id" ||
      trim(header.fields[1]) != "text") {
    throw Error(source +
                ":1: header must be id,text followed by category columns");
  }
  std::vector<int> ids;
  for (size_t c = 2; c < header.fields.size(); ++c) {
    const std::string name = trim(header.fields[c]);
    if (name.rfind("cat", 0) != 0 || name.size() == 3) {
      throw Error(source + ":1: bad category column '" + name + "'");
    }
    try {
      size_t pos = 0;
      ids.push_back(std::stoi(name.substr(3), &pos));
      if (pos != name.size() - 3) throw std::invalid_argument(name);
    } catch (const std::exception&) {
      throw Error(source + ":1: bad category column '" + name + "'");
    }
  }
  Corpus corpus;
  corpus.schema = CategorySchema::for_ids(ids);
  std::set<std::string> seen;
  for (size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    const std::string where = source + ":" + std::to_string(rec.line);
    if (rec.fields.size() != header.fields.size()) {
      throw Error(where + ": malformed row: expected " +
                  std::to_string(header.fields.size()) + " fields, got " +
                  std::to_string(rec.fields.size()));
    }
    LabeledResponse resp;
    resp.id = trim(rec.fields[0]);
    resp.text = rec.fields[1];
    for (size_t c = 0; c < ids.size(); ++c) {
      resp.labels[ids[c]] = parse_label(
          rec.fields[c + 2], where + ": column " + trim(header.fields[c + 2]));
    }
    check_duplicate(seen, resp.id, where);
    try {
      validate_response(resp, corpus.schema);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    corpus.responses.push_back(std::move(resp));
  }
  return corpus;
}

Corpus parse_jsonl_dataset(const std::string& content,
                           const std::string& source) {
  Corpus corpus;
  std::vector<int> schema_ids;
  std::set<std::string> seen;
  std::istringstream in(content);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where + ": malformed row: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") ||
        !obj.contains("labels") || !obj["labels"].is_object()) {
      throw Error(where + ": malformed row: need id, text and labels");
    }
    LabeledResponse resp;
    try {
      resp.id = obj["id"].is_string() ? obj["id"].get<std::string>()
                                      : obj["id"].dump();
      resp.text = obj["text"].get<std::string>();
      for (const auto& [key, value] : obj["labels"].items()) {
        int cat = 0;
        try {
          cat = std::stoi(key);
        } catch (const std::exception&) {
          throw Error("bad category key '" + key + "'");
        }
        const std::string raw =
            value.is_string() ? value.get<std::string>() : value.dump();
        resp.labels[cat] = parse_label(raw, "category " + key);
      }
      if (obj.contains("origin")) {
        resp.origin = origin_from_string(obj["origin"].get<std::string>());
      }
      if (obj.contains("parent_ids")) {
        resp.parent_ids = obj["parent_ids"].get<std::vector<std::string>>();
      }
      if (obj.contains("target_category") &&
          !obj["target_category"].is_null()) {
        resp.target_category = obj["target_category"].get<int>();
      }
    } catch (const json::exception& e) {
      throw Error(where + ": malformed row: " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    if (schema_ids.empty()) {
      for (const auto& [cat, _] : resp.labels) schema_ids.push_back(cat);
      corpus.schema = CategorySchema::for_ids(schema_ids);
    }
    for (int cat : schema_ids) {
      if (!resp.labels.count(cat)) {
        throw Error(where + ": missing label for category " +
                    std::to_string(cat));
      }
    }
    check_duplicate(seen, resp.id, where);
    try {
      validate_response(resp, corpus.schema);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    corpus.responses.push_back(std::move(resp));
  }
  if (corpus.responses.empty()) throw Error(source + ": no rows");
  return corpus;
}

Corpus load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  const std::string content = read_file(path);
  return format == DatasetFormat::kCsv
             ? parse_csv_dataset(content, path.string())
             : parse_jsonl_dataset(content, path.string());
}

std::string render_csv_dataset(const Corpus& corpus) {
  std::string out = "id,text";
  for (int id : corpus.schema.ids()) out += ",cat" + std::to_string(id);
  out += "\n";
  for (const auto& r : corpus.responses) {
    out += csv_escape(r.id) + "," + csv_escape(r.text);
    for (int id : corpus.schema.ids()) {
      auto it = r.labels.find(id);
      out += ",";
      out += (it != r.labels.end() && it->second == 1) ? "1" : "0";
    }
    out += "\n";
  }
  return out;
}

std::string render_jsonl_dataset(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.responses) {
    json obj;
    obj["id"] = r.id;
    obj["text"] = r.text;
    json labels = json::object();
    for (const auto& [cat, label] : r.labels) {
      labels[std::to_string(cat)] = label;
    }
    obj["labels"] = labels;
    obj["origin"] = to_string(r.origin);
    obj["parent_ids"] = r.parent_ids;
    if (r.target_category) obj["target_category"] = *r.target_category;
    out += obj.dump() + "\n";
  }
  return out;
}

void write_dataset(const Corpus& corpus, const std::filesystem::path& path,
                   DatasetFormat format) {
  write_file(path, format == DatasetFormat::kCsv
                       ? render_csv_dataset(corpus)
                       : render_jsonl_dataset(corpus));
}

ImbalanceProfile profile_counts(int category_id, size_t n_label0,
                                size_t n_label1) {
  ImbalanceProfile p;
  p.category_id = category_id;
  if (n_label1 <= n_label0) {
    p.minority_label = 1;
    p.n_minority = n_label1;
    p.n_majority = n_label0;
  } else {
    p.minority_label = 0;
    p.n_minority = n_label0;
    p.n_majority = n_label1;
  }
  p.ratio = p.n_minority == 0
                ? std::numeric_limits<double>::infinity()
                : static_cast<double>(p.n_majority) /
                      static_cast<double>(p.n_minority);
  return p;
}

ImbalanceProfile profile(const Corpus& corpus, int category_id) {
  if (!corpus.schema.contains(category_id)) {
    throw Error("unknown category " + std::to_string(category_id));
  }
  size_t ones = 0;
  size_t zeros = 0;
  for (const auto& r : corpus.responses) {
    auto it = r.labels.find(category_id);
    if (it == r.labels.end()) continue;
    (it->second == 1 ? ones : zeros)++;
  }
  return profile_counts(category_id, zeros, ones);
}

std::vector<ImbalanceProfile> profile_all(const Corpus& corpus) {
  std::vector<ImbalanceProfile> out;
  for (int id : corpus.schema.ids()) out.push_back(profile(corpus, id));
  return out;
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error("train_fraction must lie in (0, 1)");
  }
  if (corpus.responses.empty()) throw Error("cannot split an empty corpus");
  const size_t n = corpus.responses.size();
  const auto n_train =
      static_cast<size_t>(std::floor(spec.train_fraction * n));
  Rng rng(derive_seed(spec.seed, "split"));

  std::vector<char> in_train(n, 0);
  if (!spec.stratified) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (size_t i = 0; i < n_train; ++i) in_train[order[i]] = 1;
  } else {
    if (!corpus.schema.contains(spec.stratify_category)) {
      throw Error("stratify_category " +
                  std::to_string(spec.stratify_category) +
                  " is not in the schema");
    }
    std::vector<size_t> strata[2];
    for (size_t i = 0; i < n; ++i) {
      const auto& labels = corpus.responses[i].labels;
      auto it = labels.find(spec.stratify_category);
      strata[(it != labels.end() && it->second == 1) ? 1 : 0].push_back(i);
    }
    std::vector<size_t> leftover;
    size_t taken = 0;
    for (auto& stratum : strata) {
      rng.shuffle(stratum);
      const auto k =
          static_cast<size_t>(std::floor(spec.train_fraction * stratum.size()));
      for (size_t i = 0; i < stratum.size(); ++i) {
        if (i < k) {
          in_train[stratum[i]] = 1;
          ++taken;
        } else {
          leftover.push_back(stratum[i]);
        }
      }
    }
    std::sort(leftover.begin(), leftover.end());
    rng.shuffle(leftover);
    for (size_t i = 0; taken < n_train && i < leftover.size(); ++i, ++taken) {
      in_train[leftover[i]] = 1;
    }
  }

  Corpus train{corpus.schema, {}};
  Corpus test{corpus.schema, {}};
  for (size_t i = 0; i < n; ++i) {
    (in_train[i] ? train : test).responses.push_back(corpus.responses[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace augforge
