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

#include "augforge/features.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "augforge/hash.h"
#include "json.hpp"

namespace augforge {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; keep them inside
    // tokens so non-ASCII words are not shredded.
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double FeatureVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += v * dense[i];
  return s;
}

double FeatureVector::squared_norm() const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += v * v;
  return s;
}

double FeatureVector::norm() const { return std::sqrt(squared_norm()); }

FeatureVector make_feature_vector(std::vector<std::pair<uint32_t, double>> es,
                                  uint32_t dim) {
  std::sort(es.begin(), es.end());
  FeatureVector out;
  out.dim = dim;
  for (const auto& [i, v] : es) {
    if (i >= dim) throw Error("feature index out of range");
    if (!std::isfinite(v)) throw Error("feature weight is not finite");
    if (!out.entries.empty() && out.entries.back().first == i) {
      out.entries.back().second += v;
    } else {
      out.entries.emplace_back(i, v);
    }
  }
  std::erase_if(out.entries, [](const auto& e) { return e.second == 0.0; });
  return out;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  size_t i = 0;
  size_t j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j == b.entries.size() ||
        (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      s += a.entries[i].second * a.entries[i].second;
      ++i;
    } else if (i == a.entries.size() ||
               b.entries[j].first < a.entries[i].first) {
      s += b.entries[j].second * b.entries[j].second;
      ++j;
    } else {
      const double d = a.entries[i].second - b.entries[j].second;
      s += d * d;
      ++i;
      ++j;
    }
  }
  return s;
}

std::vector<std::string> Vocabulary::document_terms(
    std::string_view text) const {
  const std::vector<std::string> tokens = tokenize(text);
  std::vector<std::string> terms;
  for (int n = params_.min_ngram; n <= params_.max_ngram; ++n) {
    if (n < 1) continue;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string t = tokens[i];
      for (int k = 1; k < n; ++k) t += "_" + tokens[i + k];
      terms.push_back(std::move(t));
    }
  }
  return terms;
}

Vocabulary Vocabulary::fit(std::span<const std::string> documents,
                           const VocabularyParams& params) {
  if (documents.empty()) throw Error("cannot fit a vocabulary on no documents");
  if (params.min_ngram < 1 || params.max_ngram < params.min_ngram) {
    throw Error("invalid n-gram range");
  }
  Vocabulary v;
  v.params_ = params;
  v.n_docs_ = documents.size();
  std::map<std::string, size_t> df;
  for (const auto& doc : documents) {
    std::vector<std::string> terms = v.document_terms(doc);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms) ++df[t];
  }
  for (const auto& [term, count] : df) {
    if (count >= params.min_df) {
      v.terms_.push_back(term);
      v.df_.push_back(count);
    }
  }
  v.rebuild_index();
  return v;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  for (size_t i = 0; i < terms_.size(); ++i) {
    index_.emplace(terms_[i], static_cast<uint32_t>(i));
  }
}

int64_t Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<int64_t>(it->second);
}

double Vocabulary::idf(size_t index) const {
  return std::log(static_cast<double>(n_docs_) /
                  static_cast<double>(df_[index])) +
         1.0;
}

std::string Vocabulary::to_jsonl() const {
  nlohmann::json header = {{"documents", n_docs_},
                           {"min_ngram", params_.min_ngram},
                           {"max_ngram", params_.max_ngram},
                           {"min_df", params_.min_df}};
  std::string out = header.dump() + "\n";
  for (size_t i = 0; i < terms_.size(); ++i) {
    nlohmann::json row = {{"term", terms_[i]}, {"index", i}, {"df", df_[i]}};
    out += row.dump() + "\n";
  }
  return out;
}

Vocabulary Vocabulary::from_jsonl(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  Vocabulary v;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto obj = nlohmann::json::parse(line);
    if (!have_header) {
      v.n_docs_ = obj.at("documents").get<size_t>();
      v.params_.min_ngram = obj.at("min_ngram").get<int>();
      v.params_.max_ngram = obj.at("max_ngram").get<int>();
      v.params_.min_df = obj.at("min_df").get<size_t>();
      have_header = true;
      continue;
    }
    if (obj.at("index").get<size_t>() != v.terms_.size()) {
      throw Error("vocabulary sidecar: indices must be contiguous");
    }
    v.terms_.push_back(obj.at("term").get<std::string>());
    v.df_.push_back(obj.at("df").get<size_t>());
  }
  if (!have_header) throw Error("vocabulary sidecar: missing header");
  v.rebuild_index();
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_jsonl();
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

std::string Vocabulary::hash() const { return sha256_hex(to_jsonl()); }

Vocabulary fit_vocabulary(std::span<const std::string> documents,
                          const VocabularyParams& params) {
  return Vocabulary::fit(documents, params);
}

FeatureVector tfidf_vector(std::string_view text, const Vocabulary& vocab) {
  std::map<uint32_t, double> counts;
  for (const auto& term : vocab.document_terms(text)) {
    const int64_t idx = vocab.index_of(term);
    if (idx >= 0) counts[static_cast<uint32_t>(idx)] += 1.0;
  }
  FeatureVector out;
  out.dim = static_cast<uint32_t>(vocab.size());
  double norm2 = 0.0;
  for (const auto& [idx, tf] : counts) {
    const double w = tf * vocab.idf(idx);
    out.entries.emplace_back(idx, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : out.entries) e.second *= inv;
  }
  return out;
}

}  // namespace augforge
