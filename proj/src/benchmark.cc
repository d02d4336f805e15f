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

// Synthetic cart-item corpus generator.

#include <algorithm>
#include <cctype>

#include "augforge/corpus.h"

namespace augforge {
namespace {

// Leaves of a bracketed template, each as its list of alternatives.
std::vector<std::vector<std::string>> template_leaves(const std::string& tree) {
  std::vector<std::string> atoms;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) atoms.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : tree) {
    if (c == '(' || c == ')') {
      flush();
      atoms.emplace_back(1, c);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  std::vector<std::vector<std::string>> leaves;
  for (size_t i = 2; i + 1 < atoms.size(); ++i) {
    const bool is_atom = atoms[i] != "(" && atoms[i] != ")";
    const bool prev_is_tag = atoms[i - 1] != "(" && atoms[i - 1] != ")";
    if (is_atom && prev_is_tag && atoms[i - 2] == "(" && atoms[i + 1] == ")") {
      std::vector<std::string> alts;
      size_t start = 0;
      const std::string& a = atoms[i];
      while (true) {
        size_t bar = a.find('|', start);
        alts.push_back(a.substr(start, bar - start));
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
      leaves.push_back(std::move(alts));
    }
  }
  return leaves;
}

std::string sample_sentence(const std::string& tmpl, Rng& rng) {
  std::string out;
  for (const auto& alts : template_leaves(tmpl)) {
    if (!out.empty()) out.push_back(' ');
    out += alts[rng.below(alts.size())];
  }
  return out;
}

std::string keyword_sentence(const std::vector<std::string>& keywords,
                             Rng& rng) {
  const std::string& a = keywords[rng.below(keywords.size())];
  const std::string& b = keywords[rng.below(keywords.size())];
  return "the answer talks about " + a + " and " + b;
}

std::string capitalize(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

}  // namespace

const std::map<int, std::vector<std::string>>& benchmark_templates() {
  static const std::map<int, std::vector<std::string>> kTemplates = {
      {0,
       {
           "(S (NP (DT the) (NNS carts|cars|trolleys|wagons)) (VP (VBP are) "
           "(ADJP (JJ "
           "metal|heavy|small|light|red|blue|plastic|wooden|identical|tiny))))",
           "(S (NP (DT the) (NNS wedges|blocks|clamps|stoppers)) (VP (VBP are) "
           "(VP (VBN removed|pulled|taken|released|lifted))))",
           "(S (NP (DT the) (NN track|table|floor|ramp|surface|bench)) (VP "
           "(VBZ is) (ADJP (JJ flat|smooth|level|long|clean|wide))))",
           "(S (NP (DT the) (NNS carts|cars|trolleys)) (VP (VBP "
           "sit|rest|wait|stay) (PP (IN on|near) (NP (DT the) (NN "
           "track|table|floor|ramp)))))",
           "(S (NP (DT this) (NN question|problem|experiment|item)) (VP (VBZ "
           "is) (ADJP (JJ hard|tricky|interesting|confusing|fun|simple))))",
           "(S (NP (DT the) (NN teacher|class|student|group)) (VP (VBD "
           "showed|explained|described|tested|discussed) (NP (DT the) (NN "
           "demo|setup|experiment|video|lab))))",
           "(S (NP (PRP we|i)) (VP (VBD "
           "watched|saw|recorded|measured|observed) (NP (DT the) (NN "
           "video|demo|motion|setup|race))))",
           "(S (NP (PRP i)) (VP (VBP think|guess|believe|remember) (NP (DT "
           "this|that) (NN part|answer|idea|step))))",
       }},
      {1,
       {
           "(S (NP (DT the) (NNS carts|cars|trolleys)) (VP (VBP "
           "move|roll|slide|drift|zoom) (ADVP (RB away|apart)) (PP (IN from) "
           "(NP (DT each) (NN other)))))",
           "(S (NP (DT the) (JJ two|twin|charged) (NNS carts|cars|trolleys)) "
           "(VP (VBP separate|spread|split|diverge) (ADVP (RB "
           "quickly|slowly|outward|suddenly|gradually))))",
           "(S (NP (DT each) (NN cart|car|trolley)) (VP (VBZ "
           "goes|moves|rolls|travels|drifts) (ADVP (RB "
           "backward|outward|away|sideways)) (PP (IN along|across) (NP (DT "
           "the) (NN track|table|floor)))))",
       }},
      {2,
       {
           "(S (NP (JJ like|same|similar) (NNS charges)) (VP (VBP repel|push) "
           "(NP (DT each) (NN other)) (ADVP (RB strongly|always|apart|away))))",
           "(S (NP (DT both|the|these) (NNS carts|cars|trolleys)) (VP (VBP "
           "are) (ADJP (RB negatively|positively|equally) (JJ charged))))",
           "(S (NP (DT the) (JJ negative|positive|identical|matching) (NNS "
           "charges)) (VP (VBP repel|push) (NP (DT the) (NNS "
           "carts|cars|trolleys))))",
       }},
      {3,
       {
           "(S (NP (DT the) (NNS carts|cars|trolleys)) (VP (MD "
           "will|would|should) (VP (VB stop|slow|halt|rest) (ADVP (RB "
           "eventually|later|soon|finally|gradually)))))",
           "(S (NP (PRP they)) (VP (MD will|would) (VP (VB stop|halt|slow) (PP "
           "(IN after) (NP (DT a) (NN while|bit|moment|second))))))",
       }},
      {4,
       {
           "(S (NP (DT the) (NN force|push|repulsion)) (VP (VBZ "
           "weakens|decreases|fades|drops|shrinks) (PP (IN with) (NP (JJ "
           "more|greater|increasing) (NN distance|separation)))))",
           "(S (NP (DT the) (JJ electric|electrical|electrostatic) (NN "
           "force|field)) (VP (VBZ gets|becomes) (ADJP (JJR weaker|smaller)) "
           "(ADVP (RB farther|apart|later))))",
       }},
      {5,
       {
           "(S (NP (JJ potential|stored|electric) (NN energy)) (VP (VBZ "
           "converts|changes|transforms|turns|goes) (PP (IN into|to) (NP (JJ "
           "kinetic|motion|moving) (NN energy)))))",
           "(S (NP (DT the) (NN energy)) (VP (VBZ "
           "spreads|dissipates|transfers|escapes|flows) (PP (IN to|into) (NP "
           "(DT the) (NN air|track|floor|environment)))))",
           "(S (NP (DT the) (NN system)) (VP (VBZ reaches|approaches|finds) "
           "(NP (DT a) (JJ minimum|lowest|lower|stable) (NN energy|state))))",
       }},
      {6,
       {
           "(S (NP (DT the) (JJ repulsive|electric|pushing) (NN force)) (VP "
           "(VBZ lowers|reduces|decreases|changes) (NP (DT the) (JJ "
           "potential|stored) (NN energy))))",
           "(S (NP (JJ coulomb|electric|repulsive) (NN force|interaction)) (VP "
           "(VBZ stores|builds|creates|holds) (NP (JJ potential|electric) (NN "
           "energy))))",
           "(S (NP (JJ strong|close|big) (NN repulsion)) (VP (VBZ means) (NP "
           "(JJ high|large|more) (JJ potential|stored) (NN energy))))",
       }},
      {7,
       {
           "(S (NP (DT the) (NNS magnets|poles)) (VP (VBP push|move|repel) (NP "
           "(DT the) (NNS carts|cars|trolleys))))",
           "(S (NP (DT the) (JJ magnetic) (NN field|force|pull)) (VP (VBZ "
           "pushes|moves|drives) (NP (PRP them))))",
           "(S (NP (DT the) (NNS carts|cars|trolleys)) (VP (VBP "
           "act|behave|work) (PP (IN like) (NP (JJ strong|small|big) (NNS "
           "magnets)))))",
       }},
      {8,
       {
           "(S (NP (DT the) (NNS charges)) (VP (VBP are) (ADJP (RB "
           "almost|completely|mostly) (JJ "
           "weak|tired|used|drained|empty|gone))))",
           "(S (NP (DT the) (NN field|charge)) (VP (VBZ runs|wears) (ADVP (RB "
           "out|down))))",
           "(S (NP (DT the) (NN charge|battery)) (VP (VBZ "
           "pushes|powers|drives) (NP (DT the) (NN field|cart|car))))",
           "(S (NP (DT the) (NNS charges)) (VP (VBP get|become) (ADJP (JJ "
           "drained|tired|used|exhausted))))",
       }},
      {9,
       {
           "(S (NP (JJ like|same|similar) (NNS charges)) (VP (VBP "
           "attract|pull) (NP (DT each) (NN other)) (ADVP (RB "
           "together|closer|strongly))))",
           "(S (NP (DT the) (NN force|repulsion|push)) (VP (VBZ "
           "increases|grows|rises) (PP (IN with) (NP (JJ more|greater) (NN "
           "distance|separation)))))",
           "(S (NP (JJ opposite|different|unlike) (NNS charges)) (VP (VBP "
           "repel|push) (NP (DT each) (NN other))))",
       }},
      {10,
       {
           "(S (NP (DT the) (NN energy)) (VP (VBZ runs|wears) (ADVP (RB "
           "out|down))))",
           "(S (NP (DT the) (NN energy|power)) (VP (VBZ pushes|drives|powers) "
           "(NP (DT the) (NNS carts|cars|trolleys))))",
           "(S (NP (DT the) (NN energy|fuel|power)) (VP (VBZ is) (VP (VBN "
           "used|burned|spent) (PRT (RP up)))))",
       }},
      {11,
       {
           "(S (NP (JJ potential|stored) (NN energy)) (VP (VBZ is) (ADJP (JJ "
           "high|highest|greatest|largest)) (PP (IN at) (NP (DT the) (NN "
           "start|beginning)))))",
           "(S (NP (DT the) (JJ potential|stored) (NN energy)) (VP (VBZ "
           "drops|decreases|falls|shrinks) (ADVP (RB "
           "later|afterward|quickly|steadily))))",
       }},
  };
  return kTemplates;
}

BenchmarkSpec default_benchmark_spec(uint64_t seed) {
  BenchmarkSpec spec;
  spec.total = 1466;
  spec.seed = seed;
  // Categories 5, 6, 7 and 9 use the documented raw counts; the rest are
  // derived from the rubric's imbalance ratios at N = 1,466.
  const std::pair<int, size_t> kPositives[] = {
      {1, 215}, {2, 701}, {3, 641}, {4, 538},  {5, 57},  {6, 19},
      {7, 68},  {8, 112}, {9, 59},  {10, 302}, {11, 147},
  };
  for (const auto& [id, positives] : kPositives) {
    BenchmarkCategorySpec c;
    c.id = id;
    c.positives = positives;
    c.signal_count = 2;
    spec.categories.push_back(c);
  }
  return spec;
}

Corpus generate_benchmark_corpus(const BenchmarkSpec& spec) {
  if (spec.total == 0) throw Error("benchmark spec: total must be positive");
  if (spec.categories.empty()) {
    throw Error("benchmark spec: at least one category is required");
  }
  for (const auto& c : spec.categories) {
    if (c.positives > spec.total) {
      throw Error("benchmark spec: category " + std::to_string(c.id) +
                  " has more positives than responses");
    }
    if (c.signal_prob < 0 || c.signal_prob > 1 || c.decoy_rate < 0 ||
        c.decoy_rate > 1) {
      throw Error("benchmark spec: probabilities must lie in [0, 1]");
    }
    if (c.signal_count < 1) {
      throw Error("benchmark spec: signal_count must be >= 1");
    }
    if (c.keywords.empty() && !benchmark_templates().count(c.id)) {
      throw Error("benchmark spec: category " + std::to_string(c.id) +
                  " needs keywords (no built-in templates)");
    }
  }
  std::vector<int> ids;
  for (const auto& c : spec.categories) ids.push_back(c.id);

  Corpus corpus;
  corpus.schema = CategorySchema::for_ids(ids);
  const size_t n = spec.total;

  Rng label_rng(derive_seed(spec.seed, "benchmark.labels"));
  std::vector<std::vector<char>> positive(spec.categories.size(),
                                          std::vector<char>(n, 0));
  for (size_t ci = 0; ci < spec.categories.size(); ++ci) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    label_rng.shuffle(order);
    for (size_t k = 0; k < spec.categories[ci].positives; ++k) {
      positive[ci][order[k]] = 1;
    }
  }

  Rng text_rng(derive_seed(spec.seed, "benchmark.text"));
  const auto& templates = benchmark_templates();
  const auto& fillers = templates.at(0);
  const int width = static_cast<int>(std::to_string(n).size());
  for (size_t i = 0; i < n; ++i) {
    LabeledResponse r;
    std::string num = std::to_string(i + 1);
    r.id = "R" + std::string(std::max(0, width - static_cast<int>(num.size())),
                             '0') +
           num;
    std::vector<std::string> sentences;
    for (size_t ci = 0; ci < spec.categories.size(); ++ci) {
      const auto& c = spec.categories[ci];
      const bool pos = positive[ci][i] != 0;
      r.labels[c.id] = pos ? 1 : 0;
      const double p = pos ? c.signal_prob : c.decoy_rate;
      const size_t draws = pos ? c.signal_count : 1;
      for (size_t d = 0; d < draws; ++d) {
        if (!text_rng.bernoulli(p)) continue;
        if (!c.keywords.empty()) {
          sentences.push_back(keyword_sentence(c.keywords, text_rng));
        } else {
          const auto& family = templates.at(c.id);
          sentences.push_back(
              sample_sentence(family[text_rng.below(family.size())], text_rng));
        }
      }
    }
    const size_t n_fill = 1 + text_rng.below(2);
    for (size_t f = 0; f < n_fill; ++f) {
      sentences.push_back(
          sample_sentence(fillers[text_rng.below(fillers.size())], text_rng));
    }
    text_rng.shuffle(sentences);

    std::string text;
    for (size_t s = 0; s < sentences.size(); ++s) {
      if (s > 0 && text_rng.bernoulli(spec.because_join_prob)) {
        text += " because " + sentences[s];
        continue;
      }
      if (!text.empty()) text += ". ";
      text += capitalize(sentences[s]);
    }
    r.text = text + ".";
    corpus.responses.push_back(std::move(r));
  }
  return corpus;
}

}  // namespace augforge
