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

// Command-line front end.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "augforge/corpus.h"
#include "augforge/pipeline.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitError = 1;
constexpr int kExitIncompleteReport = 3;
constexpr int kExitInterrupted = 130;

extern "C" void on_sigint(int) {
  augforge::request_interrupt();
  std::signal(SIGINT, SIG_DFL);
}

struct GlobalFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  bool dry_run = false;
  bool quiet = false;
};

augforge::RunConfig load_config(const GlobalFlags& g) {
  if (g.config.empty()) throw augforge::Error("--config is required");
  std::ifstream in(g.config);
  if (!in) throw augforge::Error("cannot read " + g.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw augforge::Error(g.config + ": " + e.what());
  }
  if (g.seed) j["seed"] = *g.seed;
  if (!g.out.empty()) j["output_dir"] = fs::absolute(g.out).string();
  if (g.dry_run) {
    if (!j.contains("llm")) j["llm"] = json::object();
    j["llm"]["mode"] = "dry_run";
  }
  return augforge::parse_run_config(j,
                                    fs::absolute(g.config).parent_path());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = augforge::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int report_exit(const augforge::EvaluationOutput& ev) {
  std::cout << ev.comparison.text;
  for (const auto& s : ev.comparison.incomplete) {
    std::cerr << "error: strategy '" << s << "' is missing categories\n";
  }
  return ev.comparison.incomplete.empty() ? 0 : kExitIncompleteReport;
}

// Runs `body` against a pipeline and settles the manifest status.
template <typename F>
int with_pipeline(const GlobalFlags& g, F body) {
  augforge::Pipeline pipeline(load_config(g));
  try {
    const int code = body(pipeline);
    pipeline.finish("complete");
    return code;
  } catch (const augforge::Interrupted& e) {
    pipeline.finish("incomplete", e.what());
    std::cerr << "interrupted: " << e.what() << "\n";
    return kExitInterrupted;
  } catch (const std::exception& e) {
    pipeline.finish("failed", e.what());
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-imbalance analysis and text augmentation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Global seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory or file");
  app.add_flag("--dry-run", g.dry_run,
               "Emit llm prompts without calling the endpoint");
  app.add_flag("--quiet", g.quiet, "Suppress warnings on stderr");
  app.set_version_flag("--version", augforge::kToolVersion);

  auto* analyze = app.add_subcommand("analyze", "Per-category imbalance table");
  auto* augment = app.add_subcommand("augment", "Augment the train split");
  std::string strategy;
  augment->add_option("--strategy", strategy, "smote, llm, ease or alp")
      ->required();
  auto* evaluate =
      app.add_subcommand("evaluate", "Train, evaluate and compare strategies");
  std::string strategies = "baseline";
  evaluate->add_option("--strategies", strategies,
                       "Comma-separated strategy list");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
  auto* gen = app.add_subcommand("gen-benchmark",
                                 "Write the synthetic benchmark corpus");
  std::string spec_path;
  gen->add_option("--spec", spec_path, "Benchmark spec (JSON)");

  CLI11_PARSE(app, argc, argv);
  augforge::set_quiet(g.quiet);
  std::signal(SIGINT, on_sigint);

  try {
    if (*gen) {
      augforge::BenchmarkSpec spec = augforge::default_benchmark_spec();
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw augforge::Error("cannot read " + spec_path);
        spec = augforge::benchmark_spec_from_json(json::parse(in));
      }
      if (g.seed) spec.seed = *g.seed;
      const fs::path out = g.out.empty() ? fs::path("benchmark.csv") : fs::path(g.out);
      const augforge::Corpus corpus = augforge::generate_benchmark_corpus(spec);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      augforge::write_dataset(corpus, out, augforge::format_from_path(out));
      std::cout << "wrote " << corpus.responses.size() << " responses to "
                << out.string() << "\n";
      return 0;
    }
    if (*analyze) {
      return with_pipeline(g, [&](augforge::Pipeline& p) {
        const auto rows = p.analyze();
        std::cout << augforge::render_imbalance_text(
            rows, p.config().ratio_threshold);
        return 0;
      });
    }
    if (*augment) {
      if (!augforge::is_known_strategy(strategy) || strategy == "baseline") {
        throw augforge::Error("unknown augmentation strategy '" + strategy +
                              "' (expected smote, llm, ease, alp)");
      }
      return with_pipeline(g, [&](augforge::Pipeline& p) {
        p.prepare();
        p.augment(strategy);
        std::cout << "augmented train split with " << strategy << " in "
                  << p.config().output_dir.string() << "/augment/" << strategy
                  << "\n";
        return 0;
      });
    }
    if (*evaluate) {
      return with_pipeline(g, [&](augforge::Pipeline& p) {
        return report_exit(p.evaluate(split_list(strategies)));
      });
    }
    if (*pipeline) {
      return with_pipeline(g, [&](augforge::Pipeline& p) {
        return report_exit(p.run_all());
      });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
