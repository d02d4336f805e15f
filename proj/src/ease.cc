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

#include "augforge/ease.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

#include "augforge/smote.h"
#include "json.hpp"

namespace augforge {
namespace {

constexpr std::string_view kConnectives[] = {" because ", " so ", " which "};

size_t token_count(std::string_view s) { return tokenize(s).size(); }

void push_trimmed(const std::string& text, size_t b, size_t e,
                  const std::string& source_id, std::vector<Fragment>& out) {
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (b == e) return;
  Fragment f;
  f.text = text.substr(b, e - b);
  f.source_id = source_id;
  f.begin = b;
  f.end = e;
  f.token_count = token_count(f.text);
  if (f.token_count > 0) out.push_back(std::move(f));
}

void split_clauses(const std::string& text, const std::string& lower, size_t b,
                   size_t e, size_t min_tokens, const std::string& source_id,
                   std::vector<Fragment>& out) {
  while (true) {
    size_t cut = std::string::npos;
    size_t cut_len = 0;
    for (std::string_view conn : kConnectives) {
      for (size_t p = lower.find(conn, b); p != std::string::npos && p < e;
           p = lower.find(conn, p + 1)) {
        if (p + conn.size() > e) break;
        const std::string_view left(text.data() + b, p - b);
        const std::string_view right(text.data() + p + conn.size(),
                                     e - p - conn.size());
        if (token_count(left) >= min_tokens &&
            token_count(right) >= min_tokens) {
          if (p < cut) {
            cut = p;
            cut_len = conn.size();
          }
          break;
        }
      }
    }
    if (cut == std::string::npos) break;
    push_trimmed(text, b, cut, source_id, out);
    b = cut + cut_len;
  }
  push_trimmed(text, b, e, source_id, out);
}

}  // namespace

std::vector<Fragment> extract(const LabeledResponse& response,
                              size_t min_clause_tokens) {
  const std::string& text = response.text;
  std::string lower = text;
  for (char& c : lower) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::vector<Fragment> out;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.' || text[i] == '!' ||
        text[i] == '?') {
      if (i > start) {
        split_clauses(text, lower, start, i, min_clause_tokens, response.id,
                      out);
      }
      start = i + 1;
    }
  }
  return out;
}

void validate(const SiftParams& p) {
  if (p.min_tokens < 1) throw Error("sift: min_tokens must be >= 1");
  if (!(p.min_confidence >= 0.0 && p.min_confidence <= 1.0)) {
    throw Error("sift: min_confidence must lie in [0, 1]");
  }
}

std::string to_string(Rejection r) {
  switch (r) {
    case Rejection::kTooShort:
      return "too_short";
    case Rejection::kWrongLabel:
      return "wrong_label";
    case Rejection::kLowConfidence:
      return "low_confidence";
    case Rejection::kDuplicate:
      return "duplicate";
  }
  return "";
}

std::pair<int, double> acquire(const Fragment& fragment,
                               const Vocabulary& vocab,
                               const Labeler& labeler) {
  if (!labeler.is_trained()) throw Error("acquire: labeler is not trained");
  const Prediction p = labeler.predict(tfidf_vector(fragment.text, vocab));
  return {p.label, p.confidence()};
}

std::vector<size_t> sift(std::vector<EaseCandidate>& candidates,
                         const SiftParams& params, int target_label,
                         const std::unordered_set<std::string>& originals,
                         size_t limit) {
  validate(params);
  std::vector<size_t> accepted;
  std::unordered_set<std::string> taken;
  for (size_t i = 0; i < candidates.size() && accepted.size() < limit; ++i) {
    EaseCandidate& c = candidates[i];
    c.accepted = false;
    c.rejection.reset();
    if (c.fragment.token_count < params.min_tokens) {
      c.rejection = Rejection::kTooShort;
    } else if (c.acquired_label != target_label) {
      c.rejection = Rejection::kWrongLabel;
    } else if (c.confidence < params.min_confidence) {
      c.rejection = Rejection::kLowConfidence;
    } else if (params.dedup && (originals.count(c.fragment.text) ||
                                taken.count(c.fragment.text))) {
      c.rejection = Rejection::kDuplicate;
    } else {
      c.accepted = true;
      taken.insert(c.fragment.text);
      accepted.push_back(i);
    }
  }
  return accepted;
}

Corpus employ(const Corpus& train,
              const std::vector<const EaseCandidate*>& accepted,
              int category_id, int minority_label) {
  Corpus out = train;
  const std::vector<int> ids = train.schema.ids();
  size_t n = 0;
  for (const EaseCandidate* c : accepted) {
    if (c->acquired_label != minority_label) {
      throw Error("employ: candidate does not carry the minority label");
    }
    LabeledResponse r;
    r.id = "ease-c" + std::to_string(category_id) + "-" + std::to_string(++n);
    r.text = c->fragment.text;
    for (int id : ids) r.labels[id] = 0;
    r.labels[category_id] = minority_label;
    r.origin = Origin::kEase;
    r.parent_ids = {c->fragment.source_id};
    r.target_category = category_id;
    out.responses.push_back(std::move(r));
  }
  return out;
}

EaseResult ease_run(const Corpus& train, int category_id,
                    const Labeler& labeler, const Vocabulary& vocab,
                    const SiftParams& params, double target_ratio,
                    uint64_t seed) {
  validate(params);
  if (!(target_ratio >= 1.0)) throw Error("ease: target_ratio must be >= 1");
  const ImbalanceProfile prof = profile(train, category_id);
  if (prof.n_minority == 0) {
    throw Error("ease: category " + std::to_string(category_id) +
                " has no minority responses");
  }
  EaseResult result;
  const size_t needed =
      smote_deficit(prof.n_majority, prof.n_minority, target_ratio);
  if (needed == 0) {
    result.corpus = train;
    result.final_ratio = prof.ratio;
    return result;
  }

  std::vector<size_t> minority;
  std::vector<size_t> rest;
  for (size_t i = 0; i < train.responses.size(); ++i) {
    (train.responses[i].labels.at(category_id) == prof.minority_label
         ? minority
         : rest)
        .push_back(i);
  }
  Rng rng(derive_seed(seed, "ease", static_cast<uint64_t>(category_id)));
  rng.shuffle(minority);
  rng.shuffle(rest);

  std::vector<EaseCandidate> candidates;
  for (const auto* group : {&minority, &rest}) {
    for (size_t i : *group) {
      for (auto& f : extract(train.responses[i])) {
        EaseCandidate c;
        c.fragment = std::move(f);
        candidates.push_back(std::move(c));
      }
    }
  }
  if (!labeler.is_trained()) throw Error("acquire: labeler is not trained");
  const auto n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    auto& c = candidates[static_cast<size_t>(i)];
    std::tie(c.acquired_label, c.confidence) =
        acquire(c.fragment, vocab, labeler);
  }

  std::unordered_set<std::string> originals;
  for (const auto& r : train.responses) originals.insert(r.text);
  const auto accepted_idx =
      sift(candidates, params, prof.minority_label, originals, needed);
  std::vector<const EaseCandidate*> accepted;
  for (size_t i : accepted_idx) accepted.push_back(&candidates[i]);
  result.corpus = employ(train, accepted, category_id, prof.minority_label);
  result.added = accepted.size();
  result.final_ratio = static_cast<double>(prof.n_majority) /
                       static_cast<double>(prof.n_minority + result.added);

  // Candidates past the stopping point were never sifted; they stay out of
  // the audit.
  size_t evaluated = candidates.size();
  if (!accepted_idx.empty() && accepted.size() == needed) {
    evaluated = accepted_idx.back() + 1;
  }
  candidates.resize(evaluated);
  result.audit = std::move(candidates);
  if (result.added < needed) {
    result.warnings.push_back(
        "ease: category " + std::to_string(category_id) + ": accepted " +
        std::to_string(result.added) + " of " + std::to_string(needed) +
        " fragments needed for ratio " + format_fixed(target_ratio, 2) +
        "; final ratio " + format_fixed(result.final_ratio, 2));
    log_warning(result.warnings.back());
  }
  return result;
}

std::string ease_audit_to_jsonl(const std::vector<EaseCandidate>& audit) {
  std::string out;
  for (const auto& c : audit) {
    nlohmann::json obj = {
        {"source_id", c.fragment.source_id},
        {"text", c.fragment.text},
        {"begin", c.fragment.begin},
        {"end", c.fragment.end},
        {"tokens", c.fragment.token_count},
        {"label", c.acquired_label},
        {"confidence", c.confidence},
        {"accepted", c.accepted},
        {"reason", c.rejection ? nlohmann::json(to_string(*c.rejection))
                               : nlohmann::json(nullptr)},
    };
    out += obj.dump() + "\n";
  }
  return out;
}

}  // namespace augforge
