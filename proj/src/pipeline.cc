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

#include "augforge/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "augforge/alp/grammar.h"
#include "augforge/alp/parse.h"
#include "augforge/hash.h"

namespace augforge {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_interrupt{false};

const std::vector<std::string>& known_strategies() {
  static const std::vector<std::string> kNames = {"baseline", "smote", "llm",
                                                  "ease", "alp"};
  return kNames;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw Error("config: unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: bad value for '") + key + "': " +
                e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::map<int, size_t> int_map(const json& j, const char* key) {
  std::map<int, size_t> out;
  if (!j.contains(key)) return out;
  for (const auto& [k, v] : j.at(key).items()) {
    out[std::stoi(k)] = v.get<size_t>();
  }
  return out;
}

json int_map_json(const std::map<int, size_t>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

LogRegParams parse_logreg(const json& j, const std::string& where) {
  LogRegParams p;
  if (j.is_null()) return p;
  check_keys(j, where,
             {"learning_rate", "epochs", "l2", "threshold", "class_weighting"});
  p.learning_rate = get_or(j, "learning_rate", p.learning_rate);
  p.epochs = get_or(j, "epochs", p.epochs);
  p.l2 = get_or(j, "l2", p.l2);
  p.threshold = get_or(j, "threshold", p.threshold);
  p.class_weighting = get_or(j, "class_weighting", p.class_weighting);
  if (p.learning_rate <= 0 || p.epochs < 0 || p.l2 < 0 || p.threshold <= 0 ||
      p.threshold >= 1) {
    throw Error("config: " + where + " has out-of-range values");
  }
  return p;
}

json logreg_json(const LogRegParams& p) {
  return {{"learning_rate", p.learning_rate},
          {"epochs", p.epochs},
          {"l2", p.l2},
          {"threshold", p.threshold},
          {"class_weighting", p.class_weighting}};
}

}  // namespace

BenchmarkSpec benchmark_spec_from_json(const json& j) {
  check_keys(j, "benchmark",
             {"default", "total", "seed", "because_join_prob", "categories"});
  BenchmarkSpec spec = default_benchmark_spec(
      get_or<uint64_t>(j, "seed", default_benchmark_spec().seed));
  if (get_or(j, "default", false) && !j.contains("categories")) return spec;
  spec.total = get_or(j, "total", spec.total);
  spec.because_join_prob = get_or(j, "because_join_prob", spec.because_join_prob);
  if (j.contains("categories")) {
    spec.categories.clear();
    for (const auto& c : j.at("categories")) {
      check_keys(c, "benchmark category",
                 {"id", "positives", "signal_prob", "decoy_rate",
                  "signal_count", "keywords"});
      BenchmarkCategorySpec cs;
      cs.id = c.at("id").get<int>();
      cs.positives = c.at("positives").get<size_t>();
      cs.signal_prob = get_or(c, "signal_prob", cs.signal_prob);
      cs.decoy_rate = get_or(c, "decoy_rate", cs.decoy_rate);
      cs.signal_count = get_or(c, "signal_count", cs.signal_count);
      cs.keywords = get_or(c, "keywords", cs.keywords);
      spec.categories.push_back(cs);
    }
  }
  return spec;
}

json benchmark_spec_to_json(const BenchmarkSpec& spec) {
  json cats = json::array();
  for (const auto& c : spec.categories) {
    cats.push_back({{"id", c.id},
                    {"positives", c.positives},
                    {"signal_prob", c.signal_prob},
                    {"decoy_rate", c.decoy_rate},
                    {"signal_count", c.signal_count},
                    {"keywords", c.keywords}});
  }
  return {{"total", spec.total},
          {"seed", spec.seed},
          {"because_join_prob", spec.because_join_prob},
          {"categories", cats}};
}

bool is_known_strategy(const std::string& name) {
  const auto& k = known_strategies();
  return std::find(k.begin(), k.end(), name) != k.end();
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"dataset", "benchmark", "split", "seed", "output_dir",
              "features", "classifier", "strategies", "augment_categories",
              "ratio_threshold", "smote", "ease", "alp", "llm", "report"});
  RunConfig c;
  c.seed = get_or<uint64_t>(j, "seed", 0);
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    check_keys(d, "dataset", {"path", "format"});
    c.dataset = resolve(base_dir, get_or<std::string>(d, "path", ""));
    c.format = d.contains("format")
                   ? format_from_string(d.at("format").get<std::string>())
                   : format_from_path(c.dataset);
  }
  if (j.contains("benchmark")) c.benchmark = benchmark_spec_from_json(j.at("benchmark"));
  if (c.dataset.empty() && !c.benchmark) {
    throw Error("config: either dataset.path or benchmark is required");
  }
  if (!c.dataset.empty() && !c.benchmark && !fs::exists(c.dataset)) {
    throw Error("config: dataset " + c.dataset.string() + " does not exist");
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    check_keys(s, "split", {"train_fraction", "stratified", "stratify_category"});
    c.split.train_fraction = get_or(s, "train_fraction", 0.8);
    c.split.stratified = get_or(s, "stratified", false);
    c.split.stratify_category = get_or(s, "stratify_category", 0);
    if (!(c.split.train_fraction > 0 && c.split.train_fraction < 1)) {
      throw Error("config: split.train_fraction must lie in (0, 1)");
    }
  }
  c.split.seed = c.seed;
  c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "out"));
  if (j.contains("features")) {
    const json& f = j.at("features");
    check_keys(f, "features", {"min_ngram", "max_ngram", "min_df"});
    c.features.min_ngram = get_or(f, "min_ngram", c.features.min_ngram);
    c.features.max_ngram = get_or(f, "max_ngram", c.features.max_ngram);
    c.features.min_df = get_or(f, "min_df", c.features.min_df);
  }
  c.classifier = parse_logreg(j.value("classifier", json()), "classifier");
  if (j.contains("strategies")) {
    c.strategies = j.at("strategies").get<std::vector<std::string>>();
  }
  for (const auto& s : c.strategies) {
    if (!is_known_strategy(s)) {
      throw Error("config: unknown strategy '" + s +
                  "' (expected baseline, smote, llm, ease, alp)");
    }
  }
  c.augment_categories =
      get_or(j, "augment_categories", std::vector<int>{});
  c.ratio_threshold = get_or(j, "ratio_threshold", c.ratio_threshold);

  if (j.contains("smote")) {
    const json& s = j.at("smote");
    check_keys(s, "smote", {"k", "target_ratio"});
    c.smote.k = get_or(s, "k", c.smote.k);
    c.smote.target_ratio = get_or(s, "target_ratio", c.smote.target_ratio);
  }
  c.smote.seed = c.seed;

  if (j.contains("ease")) {
    const json& e = j.at("ease");
    check_keys(e, "ease",
               {"min_tokens", "min_confidence", "dedup", "target_ratio",
                "min_clause_tokens", "labeler"});
    c.ease.sift.min_tokens = get_or(e, "min_tokens", c.ease.sift.min_tokens);
    c.ease.sift.min_confidence =
        get_or(e, "min_confidence", c.ease.sift.min_confidence);
    c.ease.sift.dedup = get_or(e, "dedup", c.ease.sift.dedup);
    c.ease.target_ratio = get_or(e, "target_ratio", c.ease.target_ratio);
    c.ease.min_clause_tokens =
        get_or(e, "min_clause_tokens", c.ease.min_clause_tokens);
    c.ease.labeler = e.contains("labeler")
                         ? parse_logreg(e.at("labeler"), "ease.labeler")
                         : c.classifier;
    validate(c.ease.sift);
  } else {
    c.ease.labeler = c.classifier;
  }

  if (j.contains("alp")) {
    const json& a = j.at("alp");
    check_keys(a, "alp",
               {"treebank", "lexicon", "antonyms", "subtree_prob_threshold",
                "max_swaps", "synonym_rate", "synonyms_after_swap",
                "n_target", "target_ratio"});
    c.alp.treebank = resolve(base_dir, get_or<std::string>(a, "treebank", ""));
    c.alp.lexicon = resolve(base_dir, get_or<std::string>(a, "lexicon", ""));
    c.alp.antonyms = resolve(base_dir, get_or<std::string>(a, "antonyms", ""));
    auto& p = c.alp.params;
    p.subtree_prob_threshold =
        get_or(a, "subtree_prob_threshold", p.subtree_prob_threshold);
    p.max_swaps = get_or(a, "max_swaps", p.max_swaps);
    p.synonym_rate = get_or(a, "synonym_rate", p.synonym_rate);
    p.synonyms_after_swap =
        get_or(a, "synonyms_after_swap", p.synonyms_after_swap);
    c.alp.n_target = int_map(a, "n_target");
    c.alp.target_ratio = get_or(a, "target_ratio", c.alp.target_ratio);
    alp::validate(p);
  }
  c.alp.params.seed = c.seed;
  const bool wants_alp = std::find(c.strategies.begin(), c.strategies.end(),
                                   "alp") != c.strategies.end();
  if (wants_alp) {
    for (const fs::path* p : {&c.alp.treebank, &c.alp.lexicon}) {
      if (p->empty() || !fs::exists(*p)) {
        throw Error("config: alp resource " +
                    (p->empty() ? std::string("(unset)") : p->string()) +
                    " does not exist");
      }
    }
    if (!c.alp.antonyms.empty() && !fs::exists(c.alp.antonyms)) {
      throw Error("config: alp antonym list " + c.alp.antonyms.string() +
                  " does not exist");
    }
  }

  if (j.contains("llm")) {
    const json& l = j.at("llm");
    check_keys(l, "llm",
               {"mode", "endpoint", "model", "api_key_env", "temperature",
                "max_retries", "timeout_seconds", "requests_per_minute",
                "backoff_initial_seconds", "planner", "targets",
                "ratio_threshold", "item_stem", "exemplars_per_prompt",
                "answers_per_call", "max_calls", "min_tokens"});
    c.llm.mode = llm_mode_from_string(get_or<std::string>(l, "mode", "stub"));
    auto& cl = c.llm.client;
    cl.endpoint = get_or(l, "endpoint", cl.endpoint);
    cl.model = get_or(l, "model", cl.model);
    cl.api_key_env = get_or(l, "api_key_env", cl.api_key_env);
    cl.temperature = get_or(l, "temperature", cl.temperature);
    cl.max_retries = get_or(l, "max_retries", cl.max_retries);
    cl.timeout_seconds = get_or(l, "timeout_seconds", cl.timeout_seconds);
    cl.requests_per_minute =
        get_or(l, "requests_per_minute", cl.requests_per_minute);
    cl.backoff_initial_seconds =
        get_or(l, "backoff_initial_seconds", cl.backoff_initial_seconds);
    validate(cl);
    c.llm.planner = get_or<std::string>(l, "planner", c.llm.planner);
    if (c.llm.planner != "explicit" && c.llm.planner != "threshold") {
      throw Error("config: llm.planner must be explicit or threshold");
    }
    c.llm.targets = int_map(l, "targets");
    c.llm.ratio_threshold = get_or(l, "ratio_threshold", c.llm.ratio_threshold);
    auto& r = c.llm.run;
    r.item_stem = get_or(l, "item_stem", r.item_stem);
    r.exemplars_per_prompt =
        get_or(l, "exemplars_per_prompt", r.exemplars_per_prompt);
    r.answers_per_call = get_or(l, "answers_per_call", r.answers_per_call);
    r.max_calls = get_or(l, "max_calls", r.max_calls);
    r.min_tokens = get_or(l, "min_tokens", r.min_tokens);
  }
  c.llm.run.seed = c.seed;

  if (j.contains("report")) {
    const json& r = j.at("report");
    check_keys(r, "report", {"averaging"});
    const std::string avg = get_or<std::string>(r, "averaging", "macro");
    if (avg == "macro") {
      c.averaging = Averaging::kMacro;
    } else if (avg == "micro") {
      c.averaging = Averaging::kMicro;
    } else {
      throw Error("config: report.averaging must be macro or micro");
    }
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return parse_run_config(j, fs::absolute(path).parent_path());
}

json RunConfig::to_json() const {
  json j;
  if (!dataset.empty()) {
    j["dataset"] = {{"path", fs::absolute(dataset).lexically_normal().generic_string()},
                    {"format", format == DatasetFormat::kCsv ? "csv" : "jsonl"}};
  }
  if (benchmark) j["benchmark"] = benchmark_spec_to_json(*benchmark);
  j["split"] = {{"train_fraction", split.train_fraction},
                {"stratified", split.stratified},
                {"stratify_category", split.stratify_category}};
  j["seed"] = seed;
  j["features"] = {{"min_ngram", features.min_ngram},
                   {"max_ngram", features.max_ngram},
                   {"min_df", features.min_df}};
  j["classifier"] = logreg_json(classifier);
  j["strategies"] = strategies;
  j["augment_categories"] = augment_categories;
  j["ratio_threshold"] = ratio_threshold;
  j["smote"] = {{"k", smote.k}, {"target_ratio", smote.target_ratio}};
  j["ease"] = {{"min_tokens", ease.sift.min_tokens},
               {"min_confidence", ease.sift.min_confidence},
               {"dedup", ease.sift.dedup},
               {"target_ratio", ease.target_ratio},
               {"min_clause_tokens", ease.min_clause_tokens},
               {"labeler", logreg_json(ease.labeler)}};
  j["alp"] = {
      {"treebank", alp.treebank.empty() ? "" : sha256_file(alp.treebank)},
      {"lexicon", alp.lexicon.empty() ? "" : sha256_file(alp.lexicon)},
      {"antonyms", alp.antonyms.empty() ? "" : sha256_file(alp.antonyms)},
      {"subtree_prob_threshold", alp.params.subtree_prob_threshold},
      {"max_swaps", alp.params.max_swaps},
      {"synonym_rate", alp.params.synonym_rate},
      {"synonyms_after_swap", alp.params.synonyms_after_swap},
      {"n_target", int_map_json(alp.n_target)},
      {"target_ratio", alp.target_ratio}};
  const char* modes[] = {"stub", "live", "dry_run"};
  j["llm"] = {{"mode", modes[static_cast<int>(llm.mode)]},
              {"endpoint", llm.client.endpoint},
              {"model", llm.client.model},
              {"api_key_env", llm.client.api_key_env},
              {"temperature", llm.client.temperature},
              {"max_retries", llm.client.max_retries},
              {"planner", llm.planner},
              {"targets", int_map_json(llm.targets)},
              {"ratio_threshold", llm.ratio_threshold},
              {"item_stem", llm.run.item_stem},
              {"exemplars_per_prompt", llm.run.exemplars_per_prompt},
              {"answers_per_call", llm.run.answers_per_call},
              {"max_calls", llm.run.max_calls},
              {"min_tokens", llm.run.min_tokens}};
  j["report"] = {{"averaging",
                  averaging == Averaging::kMacro ? "macro" : "micro"}};
  return j;
}

std::string RunConfig::hash() const { return sha256_hex(to_json().dump()); }

std::vector<ImbalanceProfile> sorted_profiles(const Corpus& corpus) {
  auto rows = profile_all(corpus);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ImbalanceProfile& a, const ImbalanceProfile& b) {
                     return a.ratio > b.ratio;
                   });
  return rows;
}

std::string render_imbalance_text(const std::vector<ImbalanceProfile>& rows,
                                  double threshold) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "category" << std::right
      << std::setw(10) << "majority" << std::setw(10) << "minority"
      << std::setw(8) << "label" << std::setw(10) << "ratio"
      << "  flag\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(10) << r.category_id << std::right
        << std::setw(10) << r.n_majority << std::setw(10) << r.n_minority
        << std::setw(8) << r.minority_label << std::setw(10)
        << format_fixed(r.ratio, 2) << "  "
        << (r.ratio > threshold ? "augment" : "") << "\n";
  }
  return out.str();
}

std::string render_imbalance_csv(const std::vector<ImbalanceProfile>& rows,
                                 double threshold) {
  std::string out = "category,n_majority,n_minority,minority_label,ratio,flagged\n";
  for (const auto& r : rows) {
    out += std::to_string(r.category_id) + "," + std::to_string(r.n_majority) +
           "," + std::to_string(r.n_minority) + "," +
           std::to_string(r.minority_label) + "," + format_fixed(r.ratio, 4) +
           "," + (r.ratio > threshold ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<int> flagged_categories(const Corpus& corpus, double threshold) {
  std::vector<int> out;
  for (const auto& p : profile_all(corpus)) {
    if (p.ratio > threshold) out.push_back(p.category_id);
  }
  return out;
}

json Manifest::to_json() const {
  json stages_json = json::array();
  for (const auto& s : stages) {
    stages_json.push_back({{"name", s.name},
                           {"status", s.status},
                           {"params_hash", s.params_hash},
                           {"inputs", s.inputs},
                           {"outputs", s.outputs},
                           {"started_at", s.started_at},
                           {"finished_at", s.finished_at}});
  }
  json j = {{"tool_version", tool_version},
            {"config_hash", config_hash},
            {"seed", seed},
            {"status", status},
            {"started_at", started_at},
            {"finished_at", finished_at},
            {"stages", stages_json},
            {"incomplete_stages", incomplete_stages},
            {"warnings", warnings},
            {"digest", digest()}};
  if (!error.empty()) j["error"] = error;
  return j;
}

Manifest Manifest::from_json(const json& j) {
  Manifest m;
  m.tool_version = j.value("tool_version", "");
  m.config_hash = j.value("config_hash", "");
  m.seed = j.value("seed", uint64_t{0});
  m.status = j.value("status", "");
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  for (const auto& s : j.value("stages", json::array())) {
    StageRecord r;
    r.name = s.at("name").get<std::string>();
    r.status = s.value("status", "");
    r.params_hash = s.value("params_hash", "");
    r.inputs = s.value("inputs", std::map<std::string, std::string>{});
    r.outputs = s.value("outputs", std::map<std::string, std::string>{});
    r.started_at = s.value("started_at", "");
    r.finished_at = s.value("finished_at", "");
    m.stages.push_back(std::move(r));
  }
  m.incomplete_stages =
      j.value("incomplete_stages", std::vector<std::string>{});
  m.warnings = j.value("warnings", std::vector<std::string>{});
  m.error = j.value("error", "");
  return m;
}

const StageRecord* Manifest::find(const std::string& name) const {
  for (const auto& s : stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string Manifest::digest() const {
  std::string acc = config_hash + "\n";
  for (const auto& s : stages) {
    acc += s.name + "|" + s.params_hash + "\n";
    for (const auto& [k, v] : s.inputs) acc += "<" + k + "=" + v + "\n";
    for (const auto& [k, v] : s.outputs) acc += ">" + k + "=" + v + "\n";
  }
  return sha256_hex(acc);
}

Manifest load_manifest(const fs::path& path) {
  try {
    return Manifest::from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void request_interrupt() { g_interrupt.store(true); }
bool interrupt_requested() { return g_interrupt.load(); }
void clear_interrupt() { g_interrupt.store(false); }

Pipeline::Pipeline(RunConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  fs::create_directories(config_.output_dir);
  const fs::path mpath = out("manifest.json");
  const std::string config_hash = config_.hash();
  if (fs::exists(mpath)) {
    Manifest old = load_manifest(mpath);
    // Earlier stage records let unchanged stages be skipped.
    manifest_.stages = std::move(old.stages);
  }
  manifest_.config_hash = config_hash;
  manifest_.seed = config_.seed;
  manifest_.status = "running";
  manifest_.started_at = now_iso();
  write_text("config.json", config_.to_json().dump(2) + "\n");
}

fs::path Pipeline::out(const std::string& rel) const {
  return config_.output_dir / rel;
}

std::string Pipeline::write_text(const std::string& rel,
                                 const std::string& content) {
  const fs::path p = out(rel);
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << content;
  }
  fs::rename(tmp, p);
  return rel;
}

std::map<std::string, std::string> Pipeline::hash_files(
    const std::vector<std::string>& rels) const {
  std::map<std::string, std::string> out;
  for (const auto& r : rels) out[r] = sha256_file(this->out(r));
  return out;
}

bool Pipeline::can_skip(const std::string& name,
                        const std::string& params_hash,
                        const std::map<std::string, std::string>& inputs) const {
  const StageRecord* rec = manifest_.find(name);
  if (!rec || rec->params_hash != params_hash || rec->inputs != inputs) {
    return false;
  }
  for (const auto& [rel, hash] : rec->outputs) {
    if (!fs::exists(out(rel)) || sha256_file(out(rel)) != hash) return false;
  }
  return true;
}

void Pipeline::record(StageRecord rec) {
  done_.insert(rec.name);
  auto it = std::find_if(manifest_.stages.begin(), manifest_.stages.end(),
                         [&](const StageRecord& s) { return s.name == rec.name; });
  if (it == manifest_.stages.end()) {
    manifest_.stages.push_back(std::move(rec));
  } else {
    *it = std::move(rec);
  }
  write_manifest();
}

void Pipeline::write_manifest() const {
  const fs::path p = out("manifest.json");
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp);
    f << manifest_.to_json().dump(2) << "\n";
  }
  fs::rename(tmp, p);
}

void Pipeline::check_interrupt(const std::string& stage, bool stage_done) {
  if (!interrupt_requested()) return;
  if (!stage_done) manifest_.incomplete_stages.push_back(stage);
  throw Interrupted(stage_done ? "interrupted after " + stage
                               : "interrupted during " + stage);
}

void Pipeline::finish(const std::string& status, const std::string& error) {
  manifest_.status = status;
  manifest_.error = error;
  manifest_.finished_at = now_iso();
  write_manifest();
}

Corpus Pipeline::load_source() {
  if (config_.benchmark &&
      (config_.dataset.empty() || !fs::exists(config_.dataset))) {
    Corpus c = generate_benchmark_corpus(*config_.benchmark);
    if (!config_.dataset.empty()) {
      fs::create_directories(config_.dataset.parent_path());
      write_dataset(c, config_.dataset, config_.format);
    }
    return c;
  }
  return load_dataset(config_.dataset, config_.format);
}

std::vector<ImbalanceProfile> Pipeline::analyze() {
  StageRecord rec;
  rec.name = "analyze";
  rec.started_at = now_iso();
  const Corpus corpus = load_source();
  const auto rows = sorted_profiles(corpus);
  std::vector<std::string> outputs = {
      write_text("analyze/imbalance.txt",
                 render_imbalance_text(rows, config_.ratio_threshold)),
      write_text("analyze/imbalance.csv",
                 render_imbalance_csv(rows, config_.ratio_threshold))};
  rec.status = "done";
  rec.params_hash = sha256_hex(std::to_string(config_.ratio_threshold));
  rec.inputs["dataset"] = sha256_hex(render_jsonl_dataset(corpus));
  rec.outputs = hash_files(outputs);
  rec.finished_at = now_iso();
  record(std::move(rec));
  if (options_.after_stage) options_.after_stage("analyze");
  check_interrupt("analyze", true);
  return rows;
}

void Pipeline::prepare() {
  const std::string name = "split";
  const Corpus corpus = load_source();
  const std::string params =
      sha256_hex(json({{"split", config_.to_json()["split"]},
                       {"seed", config_.seed},
                       {"features", config_.to_json()["features"]}})
                     .dump());
  const std::map<std::string, std::string> inputs = {
      {"dataset", sha256_hex(render_jsonl_dataset(corpus))}};
  // Same config and dataset but different bytes on disk means the split was
  // edited after the fact; regenerating would hide that.
  if (const StageRecord* prev = manifest_.find(name);
      prev && prev->params_hash == params && prev->inputs == inputs) {
    for (const auto& [rel, hash] : prev->outputs) {
      if (fs::exists(out(rel)) && sha256_file(out(rel)) != hash) {
        throw Error(rel + " does not match the manifest hash (split was "
                          "modified); remove it to regenerate the split");
      }
    }
  }
  if (can_skip(name, params, inputs)) {
    for (auto& s : manifest_.stages) {
      if (s.name == name) s.status = "skipped";
    }
    done_.insert(name);
    load_split();
    return;
  }
  StageRecord rec;
  rec.name = name;
  rec.started_at = now_iso();
  SplitSpec spec = config_.split;
  spec.seed = config_.seed;
  auto [train, test] = split(corpus, spec);
  std::vector<std::string> texts;
  for (const auto& r : train.responses) texts.push_back(r.text);
  Vocabulary vocab = fit_vocabulary(texts, config_.features);
  std::vector<std::string> outputs = {
      write_text("split/train.jsonl", render_jsonl_dataset(train)),
      write_text("split/test.jsonl", render_jsonl_dataset(test)),
      write_text("features/vocab.jsonl", vocab.to_jsonl())};
  rec.status = "done";
  rec.params_hash = params;
  rec.inputs = inputs;
  rec.outputs = hash_files(outputs);
  rec.finished_at = now_iso();
  record(std::move(rec));
  train_ = std::move(train);
  test_ = std::move(test);
  vocab_ = std::move(vocab);
  split_loaded_ = true;
  if (options_.after_stage) options_.after_stage(name);
  check_interrupt(name, true);
}

void Pipeline::load_split() {
  train_ = load_dataset(out("split/train.jsonl"), DatasetFormat::kJsonl);
  test_ = load_dataset(out("split/test.jsonl"), DatasetFormat::kJsonl);
  vocab_ = Vocabulary::load(out("features/vocab.jsonl"));
  split_loaded_ = true;
}

const Corpus& Pipeline::train() {
  if (!split_loaded_) prepare();
  return train_;
}

const Corpus& Pipeline::test() {
  if (!split_loaded_) prepare();
  return test_;
}

const Vocabulary& Pipeline::vocabulary() {
  if (!split_loaded_) prepare();
  return vocab_;
}

std::vector<int> Pipeline::augment_categories() {
  if (!config_.augment_categories.empty()) {
    for (int id : config_.augment_categories) {
      if (!train().schema.contains(id)) {
        throw Error("config: augment category " + std::to_string(id) +
                    " is not in the schema");
      }
    }
    return config_.augment_categories;
  }
  return flagged_categories(train(), config_.ratio_threshold);
}

void Pipeline::augment(const std::string& strategy) {
  if (!is_known_strategy(strategy)) {
    throw Error("unknown strategy '" + strategy +
                "' (expected baseline, smote, llm, ease, alp)");
  }
  if (strategy == "baseline") return;
  const std::string name = "augment:" + strategy;
  train();
  json cfg = config_.to_json();
  json params_j = {{"seed", config_.seed},
                   {"categories", augment_categories()},
                   {"section", cfg[strategy]}};
  if (strategy == "ease") params_j["features"] = cfg["features"];
  const std::string params = sha256_hex(params_j.dump());
  const auto inputs =
      hash_files({"split/train.jsonl", "features/vocab.jsonl"});
  if (can_skip(name, params, inputs)) {
    for (auto& s : manifest_.stages) {
      if (s.name == name) s.status = "skipped";
    }
    done_.insert(name);
    write_manifest();
    return;
  }
  StageRecord rec;
  rec.name = name;
  rec.started_at = now_iso();
  std::vector<std::string> outputs;
  try {
    if (strategy == "smote") augment_smote(outputs);
    if (strategy == "ease") augment_ease(outputs);
    if (strategy == "alp") augment_alp(outputs);
    if (strategy == "llm") augment_llm(outputs);
  } catch (const Interrupted&) {
    throw;
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  }
  rec.status = "done";
  rec.params_hash = params;
  rec.inputs = inputs;
  rec.outputs = hash_files(outputs);
  rec.finished_at = now_iso();
  record(std::move(rec));
  if (options_.after_stage) options_.after_stage(name);
  check_interrupt(name, true);
}

void Pipeline::augment_smote(std::vector<std::string>& outputs) {
  std::vector<FeatureVector> x;
  std::vector<std::string> ids;
  for (const auto& r : train_.responses) {
    x.push_back(tfidf_vector(r.text, vocab_));
    ids.push_back(r.id);
  }
  json summary = json::array();
  for (int cat : augment_categories()) {
    check_interrupt("augment:smote");
    std::vector<int> y;
    for (const auto& r : train_.responses) y.push_back(r.labels.at(cat));
    SmoteParams p = config_.smote;
    p.seed = config_.seed;
    const SmoteResult res = smote_balance(x, ids, y, cat, p);
    for (const auto& w : res.warnings) manifest_.warnings.push_back(w);
    outputs.push_back(write_text(
        "augment/smote/c" + std::to_string(cat) + ".jsonl",
        smote_to_jsonl(res)));
    summary.push_back({{"category", cat},
                       {"n_majority", res.n_majority},
                       {"n_minority", res.n_minority},
                       {"added", res.synthetic.size()},
                       {"k", res.k_used},
                       {"final_ratio", res.final_ratio()}});
  }
  outputs.push_back(
      write_text("augment/smote/summary.json", summary.dump(2) + "\n"));
}

void Pipeline::augment_ease(std::vector<std::string>& outputs) {
  std::vector<FeatureVector> x;
  for (const auto& r : train_.responses) x.push_back(tfidf_vector(r.text, vocab_));
  Corpus merged = train_;
  std::string audit;
  json summary = json::array();
  for (int cat : augment_categories()) {
    check_interrupt("augment:ease");
    std::vector<int> y;
    for (const auto& r : train_.responses) y.push_back(r.labels.at(cat));
    LogRegLabeler labeler(config_.ease.labeler,
                          derive_seed(config_.seed, "ease.labeler",
                                      static_cast<uint64_t>(cat)),
                          vocab_.size());
    labeler.train(x, y);
    EaseResult res = ease_run(train_, cat, labeler, vocab_, config_.ease.sift,
                              config_.ease.target_ratio, config_.seed);
    for (const auto& w : res.warnings) manifest_.warnings.push_back(w);
    for (size_t i = train_.responses.size(); i < res.corpus.responses.size();
         ++i) {
      merged.responses.push_back(std::move(res.corpus.responses[i]));
    }
    audit += ease_audit_to_jsonl(res.audit);
    summary.push_back({{"category", cat},
                       {"added", res.added},
                       {"final_ratio", res.final_ratio}});
  }
  outputs.push_back(
      write_text("augment/ease/train.jsonl", render_jsonl_dataset(merged)));
  outputs.push_back(write_text("augment/ease/audit.jsonl", audit));
  outputs.push_back(
      write_text("augment/ease/summary.json", summary.dump(2) + "\n"));
}

void Pipeline::augment_alp(std::vector<std::string>& outputs) {
  const auto treebank = alp::read_treebank(read_file(config_.alp.treebank));
  const alp::Grammar grammar = alp::induce_pcfg(treebank);
  alp::validate_grammar(grammar, 1e-9);
  const alp::SynonymLexicon lexicon =
      alp::SynonymLexicon::load(config_.alp.lexicon);
  if (!config_.alp.antonyms.empty()) {
    const auto bad = alp::audit_lexicon(
        lexicon, alp::read_word_pairs(read_file(config_.alp.antonyms)));
    if (!bad.empty()) {
      throw Error("lexicon lists antonyms as synonyms: " + bad.front().first +
                  " / " + bad.front().second);
    }
  }
  const alp::HeadRules heads = alp::HeadRules::defaults();
  Corpus merged = train_;
  std::string audit;
  json summary = json::array();
  for (int cat : augment_categories()) {
    check_interrupt("augment:alp");
    const ImbalanceProfile prof = profile(train_, cat);
    size_t n_target = 0;
    auto it = config_.alp.n_target.find(cat);
    if (it != config_.alp.n_target.end()) {
      n_target = it->second;
    } else {
      n_target = smote_deficit(prof.n_majority, prof.n_minority,
                               config_.alp.target_ratio);
    }
    alp::AlpParams p = config_.alp.params;
    p.seed = config_.seed;
    alp::AlpResult res;
    try {
      res = alp::alp_augment(train_, cat, grammar, heads, lexicon, p, n_target);
    } catch (const Error& e) {
      throw Error("category " + std::to_string(cat) + ": " + e.what());
    }
    for (const auto& w : res.warnings) manifest_.warnings.push_back(w);
    for (size_t i = train_.responses.size(); i < res.corpus.responses.size();
         ++i) {
      merged.responses.push_back(std::move(res.corpus.responses[i]));
    }
    audit += alp::alp_audit_to_jsonl(res.audit);
    summary.push_back(
        {{"category", cat},
         {"requested", n_target},
         {"added", res.added},
         {"parsed_sentences", res.parsed_sentences},
         {"skipped_sentences", res.skipped_sentences},
         {"final_ratio", static_cast<double>(prof.n_majority) /
                             static_cast<double>(prof.n_minority + res.added)}});
  }
  outputs.push_back(
      write_text("augment/alp/train.jsonl", render_jsonl_dataset(merged)));
  outputs.push_back(write_text("augment/alp/audit.jsonl", audit));
  outputs.push_back(
      write_text("augment/alp/summary.json", summary.dump(2) + "\n"));
}

void Pipeline::augment_llm(std::vector<std::string>& outputs) {
  const bool dry_run = config_.llm.mode == LlmMode::kDryRun;
  std::unique_ptr<CompletionBackend> owned;
  CompletionBackend* backend = options_.llm_backend;
  if (!backend && !dry_run) {
    if (config_.llm.mode == LlmMode::kLive) {
      owned = std::make_unique<HttpChatBackend>(
          config_.llm.client,
          std::make_shared<RateLimiter>(config_.llm.client.requests_per_minute));
    } else {
      owned = std::make_unique<StubBackend>(derive_seed(config_.seed, "llm.stub"));
    }
    backend = owned.get();
  }
  Corpus merged = train_;
  std::string audit;
  json summary = json::array();
  for (int cat : augment_categories()) {
    check_interrupt("augment:llm");
    const ImbalanceProfile prof = profile(train_, cat);
    size_t target = target_for_threshold(prof.n_majority,
                                         config_.llm.ratio_threshold);
    if (config_.llm.planner == "explicit") {
      auto it = config_.llm.targets.find(cat);
      if (it != config_.llm.targets.end()) target = it->second;
    }
    target = std::max(target, prof.n_minority);
    const AugmentationPlan plan =
        plan_generation(prof.n_majority, prof.n_minority, target, cat);
    LlmRunParams run = config_.llm.run;
    run.seed = config_.seed;
    LlmResult res = llm_augment(train_, plan, backend, run, dry_run);
    for (const auto& w : res.warnings) manifest_.warnings.push_back(w);
    for (size_t i = train_.responses.size(); i < res.corpus.responses.size();
         ++i) {
      merged.responses.push_back(std::move(res.corpus.responses[i]));
    }
    audit += llm_audit_to_jsonl(res.calls);
    summary.push_back({{"category", cat},
                       {"n_majority", plan.n_majority},
                       {"n_minority", plan.n_minority},
                       {"target_minority", plan.target_minority},
                       {"n_to_generate", plan.n_to_generate},
                       {"planned_ratio", plan.display_ratio()},
                       {"ingested", res.added},
                       {"calls", res.calls.size()},
                       {"dry_run", dry_run}});
  }
  if (!dry_run) {
    outputs.push_back(
        write_text("augment/llm/train.jsonl", render_jsonl_dataset(merged)));
  }
  outputs.push_back(write_text("augment/llm/audit.jsonl", audit));
  outputs.push_back(
      write_text("augment/llm/summary.json", summary.dump(2) + "\n"));
}

MetricsReport Pipeline::evaluate_strategy(const std::string& strategy) {
  // Human training data plus, per category, the synthetic records aimed at it.
  Corpus corpus = train_;
  std::map<int, std::vector<FeatureVector>> smote_vectors;
  std::map<int, int> smote_labels;
  if (strategy != "baseline") {
    const StageRecord* rec = manifest_.find("augment:" + strategy);
    if (!rec) {
      throw Error("evaluate: no augmented corpus for '" + strategy +
                  "'; run augment --strategy " + strategy + " first");
    }
    const auto current =
        hash_files({"split/train.jsonl", "features/vocab.jsonl"});
    if (rec->inputs != current) {
      throw Error("evaluate: '" + strategy +
                  "' was augmented from a different split; re-run augment");
    }
    for (const auto& [rel, hash] : rec->outputs) {
      if (!fs::exists(out(rel)) || sha256_file(out(rel)) != hash) {
        throw Error("evaluate: artifact " + rel + " is missing or modified");
      }
    }
    if (strategy == "smote") {
      for (const auto& [rel, hash] : rec->outputs) {
        if (rel.rfind("augment/smote/c", 0) != 0) continue;
        const SmoteResult res = smote_from_jsonl(read_file(out(rel)));
        for (const auto& sv : res.synthetic) {
          smote_vectors[res.category_id].push_back(sv.vector);
        }
        smote_labels[res.category_id] = res.minority_label;
      }
    } else {
      if (!rec->outputs.count("augment/" + strategy + "/train.jsonl")) {
        throw Error("evaluate: '" + strategy +
                    "' has no augmented corpus (dry run?)");
      }
      corpus = load_dataset(out("augment/" + strategy + "/train.jsonl"),
                            DatasetFormat::kJsonl);
    }
  }

  std::set<std::string> test_ids;
  for (const auto& r : test_.responses) test_ids.insert(r.id);
  for (const auto& r : corpus.responses) {
    if (test_ids.count(r.id)) {
      throw Error("evaluate: test response " + r.id +
                  " appears in the training corpus of '" + strategy + "'");
    }
  }

  std::vector<FeatureVector> x_all;
  for (const auto& r : corpus.responses) x_all.push_back(tfidf_vector(r.text, vocab_));
  std::vector<FeatureVector> x_test;
  for (const auto& r : test_.responses) x_test.push_back(tfidf_vector(r.text, vocab_));

  const std::vector<int> cats = train_.schema.ids();
  std::vector<ConfusionCounts> counts(cats.size());
  std::vector<std::string> models(cats.size());
  const auto n_cats = static_cast<long>(cats.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long ci = 0; ci < n_cats; ++ci) {
    const int cat = cats[static_cast<size_t>(ci)];
    std::vector<FeatureVector> x;
    std::vector<int> y;
    for (size_t i = 0; i < corpus.responses.size(); ++i) {
      const auto& r = corpus.responses[i];
      if (r.origin != Origin::kHuman && r.target_category != cat) continue;
      x.push_back(x_all[i]);
      y.push_back(r.labels.at(cat));
    }
    auto sv = smote_vectors.find(cat);
    if (sv != smote_vectors.end()) {
      for (const auto& v : sv->second) {
        x.push_back(v);
        y.push_back(smote_labels[cat]);
      }
    }
    LogRegLabeler labeler(config_.classifier,
                          derive_seed(config_.seed, "classifier",
                                      static_cast<uint64_t>(cat)),
                          vocab_.size());
    labeler.train(x, y);
    std::vector<int> pred;
    std::vector<int> gold;
    for (size_t i = 0; i < x_test.size(); ++i) {
      pred.push_back(labeler.predict(x_test[i]).label);
      gold.push_back(test_.responses[i].labels.at(cat));
    }
    counts[static_cast<size_t>(ci)] = confusion(pred, gold);
    LogRegModel m = labeler.model();
    m.vocab_hash = vocab_.hash();
    models[static_cast<size_t>(ci)] = model_to_jsonl(m);
  }

  MetricsReport report;
  report.strategy = strategy;
  for (const auto& r : test_.responses) report.test_ids.push_back(r.id);
  std::string model_lines;
  for (size_t ci = 0; ci < cats.size(); ++ci) {
    report.counts[cats[ci]] = counts[ci];
    json line = json::parse(models[ci]);
    line["category"] = cats[ci];
    model_lines += line.dump() + "\n";
  }
  write_text("evaluate/models/" + strategy + ".jsonl", model_lines);
  return report;
}

EvaluationOutput Pipeline::evaluate(const std::vector<std::string>& strategies) {
  if (strategies.empty()) throw Error("evaluate: no strategies requested");
  for (const auto& s : strategies) {
    if (!is_known_strategy(s)) {
      throw Error("unknown strategy '" + s +
                  "' (expected baseline, smote, llm, ease, alp)");
    }
  }
  train();
  const StageRecord* split_rec = manifest_.find("split");
  if (!split_rec) throw Error("evaluate: no split recorded in the manifest");
  for (const auto& rel : {"split/test.jsonl", "split/train.jsonl"}) {
    auto it = split_rec->outputs.find(rel);
    if (it == split_rec->outputs.end() || !fs::exists(out(rel)) ||
        sha256_file(out(rel)) != it->second) {
      throw Error(std::string("evaluate: ") + rel +
                  " does not match the manifest hash (split was modified)");
    }
  }

  StageRecord rec;
  rec.name = "evaluate";
  rec.started_at = now_iso();
  rec.params_hash = sha256_hex(json({{"classifier", config_.to_json()["classifier"]},
                                     {"strategies", strategies},
                                     {"seed", config_.seed}})
                                   .dump());
  rec.inputs = hash_files({"split/train.jsonl", "split/test.jsonl",
                           "features/vocab.jsonl"});
  EvaluationOutput result;
  std::vector<std::string> outputs;
  json metrics_json = json::array();
  for (const auto& s : strategy_order()) {
    if (std::find(strategies.begin(), strategies.end(), s) == strategies.end()) {
      continue;
    }
    check_interrupt("evaluate", true);
    if (s != "baseline") {
      const StageRecord* aug = manifest_.find("augment:" + s);
      if (aug) {
        for (const auto& [rel, hash] : aug->outputs) rec.inputs[rel] = hash;
      }
    }
    result.reports.push_back(evaluate_strategy(s));
    outputs.push_back("evaluate/models/" + s + ".jsonl");
    for (const auto& [cat, c] : result.reports.back().counts) {
      const Metrics m = metrics(c);
      metrics_json.push_back({{"strategy", s},
                              {"category", cat},
                              {"tp", c.tp},
                              {"fp", c.fp},
                              {"tn", c.tn},
                              {"fn", c.fn},
                              {"accuracy", m.accuracy},
                              {"precision", m.precision},
                              {"recall", m.recall},
                              {"f1", m.f1}});
    }
  }
  ReportOptions opts;
  opts.categories = train_.schema.ids();
  opts.averaging = config_.averaging;
  result.comparison = compare_report(result.reports, train_.schema, opts);
  std::string metrics_lines;
  for (const auto& m : metrics_json) metrics_lines += m.dump() + "\n";
  outputs.push_back(write_text("evaluate/metrics.jsonl", metrics_lines));
  outputs.push_back(write_text("report/comparison.txt", result.comparison.text));
  outputs.push_back(write_text("report/comparison.csv", result.comparison.csv));
  for (const auto& [s, cat] : result.comparison.masked) {
    manifest_.warnings.push_back("accuracy masks weak F1 for " + s +
                                 " category " + std::to_string(cat));
  }
  rec.status = "done";
  rec.outputs = hash_files(outputs);
  rec.finished_at = now_iso();
  record(std::move(rec));
  if (options_.after_stage) options_.after_stage("evaluate");
  check_interrupt("evaluate", true);
  return result;
}

EvaluationOutput Pipeline::run_all() {
  std::string stage = "analyze";
  try {
    analyze();
    stage = "split";
    prepare();
    for (const auto& s : config_.strategies) {
      stage = "augment:" + s;
      augment(s);
    }
    stage = "evaluate";
    std::vector<std::string> strategies = config_.strategies;
    if (config_.llm.mode == LlmMode::kDryRun) {
      std::erase(strategies, std::string("llm"));
    }
    if (std::find(strategies.begin(), strategies.end(), "baseline") ==
        strategies.end()) {
      strategies.insert(strategies.begin(), "baseline");
    }
    EvaluationOutput out = evaluate(strategies);
    return out;
  } catch (const Interrupted&) {
    // Everything planned but not finished in this run stays incomplete.
    std::vector<std::string> planned = {"analyze", "split"};
    for (const auto& s : config_.strategies) {
      if (s != "baseline") planned.push_back("augment:" + s);
    }
    planned.push_back("evaluate");
    for (const auto& p : planned) {
      if (!done_.count(p) &&
          std::find(manifest_.incomplete_stages.begin(),
                    manifest_.incomplete_stages.end(),
                    p) == manifest_.incomplete_stages.end()) {
        manifest_.incomplete_stages.push_back(p);
      }
    }
    throw;
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.rfind(stage, 0) == 0) throw;
    throw Error(stage + ": " + msg);
  }
}

}  // namespace augforge
