#include "rubric/sampler.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "rubric/error.hpp"

namespace rubric {

namespace {

int draw_rule(const RubricGrammar& g, int nonterminal, Rng& rng) {
  const auto& cum = g.cumulative(nonterminal);
  const auto& rules = g.rules_for(nonterminal);
  const double u = uniform01(rng);
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  // Rounding can leave the last cumulative value a hair below 1.
  const std::size_t k = it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
  return rules[k];
}

struct Expander {
  const RubricGrammar& g;
  Rng& rng;
  Derivation derivation;
  std::vector<std::string> tokens;
  double logprob = 0.0;

  int expand(int nonterminal) {
    const int rule = draw_rule(g, nonterminal, rng);
    const int index = static_cast<int>(derivation.nodes.size());
    derivation.nodes.push_back(DerivationNode{rule, tokens.size(), 0, {}});
    logprob += g.rule_logprob(rule);
    for (const auto& item : g.rule(rule).rhs) {
      if (item.is_nonterminal()) {
        const int child = expand(item.index);
        derivation.nodes[index].children.push_back(child);
      } else {
        const auto& run = g.terminal_runs()[item.index];
        tokens.insert(tokens.end(), run.begin(), run.end());
      }
    }
    derivation.nodes[index].end = tokens.size();
    return index;
  }
};

void expand_text(const RubricGrammar& g, int nonterminal, Rng& rng, std::string& out) {
  const int rule = draw_rule(g, nonterminal, rng);
  for (const auto& item : g.rule(rule).rhs) {
    if (item.is_nonterminal()) {
      expand_text(g, item.index, rng, out);
    } else {
      if (!out.empty()) out.push_back(' ');
      out += g.terminal_text(item.index);
    }
  }
}

}  // namespace

SynExample sample(const RubricGrammar& grammar, Rng& rng) {
  Expander ex{grammar, rng, {}, {}, 0.0};
  ex.expand(grammar.start());
  SynExample out;
  out.program = Program::from_tokens(std::move(ex.tokens));
  out.labels = derivation_labels(grammar, ex.derivation);
  out.mask = derivation_mask(grammar, ex.derivation);
  out.logprob = ex.logprob;
  out.derivation = std::move(ex.derivation);
  return out;
}

SynExample sample(const RubricGrammar& grammar, std::uint64_t seed) {
  Rng rng(seed);
  return sample(grammar, rng);
}

std::string sample_text(const RubricGrammar& grammar, Rng& rng) {
  std::string out;
  expand_text(grammar, grammar.start(), rng, out);
  return out;
}

std::vector<SynExample> sample_corpus(const RubricGrammar& grammar, std::size_t n,
                                      bool unique_only, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample_corpus needs n >= 1");
  Rng rng(seed);
  std::vector<SynExample> corpus;
  std::unordered_set<std::string> seen;
  corpus.reserve(unique_only ? std::min<std::size_t>(n, 1 << 16) : n);
  for (std::size_t i = 0; i < n; ++i) {
    SynExample ex = sample(grammar, rng);
    if (unique_only && !seen.insert(render(ex.program)).second) continue;
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

std::vector<SupportEntry> enumerate_support(const RubricGrammar& grammar,
                                            std::size_t max_items) {
  using Dist = std::unordered_map<std::string, double>;
  const std::size_t n = grammar.num_nonterminals();

  std::vector<bool> reachable(n, false);
  std::vector<int> todo{grammar.start()};
  reachable[grammar.start()] = true;
  while (!todo.empty()) {
    const int v = todo.back();
    todo.pop_back();
    for (int r : grammar.rules_for(v)) {
      for (const auto& item : grammar.rule(r).rhs) {
        if (item.is_nonterminal() && !reachable[item.index]) {
          reachable[item.index] = true;
          todo.push_back(item.index);
        }
      }
    }
  }

  auto too_large = [&](std::size_t size) {
    if (size > max_items) {
      throw Error(ErrorCode::kSupportTooLarge,
                  "support exceeds " + std::to_string(max_items) + " programs");
    }
  };
  auto join = [](const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + " " + b;
  };

  std::vector<Dist> dist(n);
  for (int nt : grammar.bottom_up_order()) {
    if (!reachable[nt]) continue;
    Dist total;
    for (int r : grammar.rules_for(nt)) {
      Dist partial{{std::string(), grammar.rule(r).prob}};
      for (const auto& item : grammar.rule(r).rhs) {
        if (!item.is_nonterminal()) {
          Dist next;
          for (auto& [text, p] : partial) next[join(text, grammar.terminal_text(item.index))] += p;
          partial = std::move(next);
          continue;
        }
        const Dist& child = dist[item.index];
        too_large(partial.size() * child.size());
        Dist next;
        for (const auto& [a, pa] : partial) {
          for (const auto& [b, pb] : child) next[join(a, b)] += pa * pb;
        }
        partial = std::move(next);
      }
      for (auto& [text, p] : partial) total[text] += p;
      too_large(total.size());
    }
    dist[nt] = std::move(total);
  }

  std::vector<std::pair<std::string, double>> flat(dist[grammar.start()].begin(),
                                                   dist[grammar.start()].end());
  std::sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<SupportEntry> out;
  out.reserve(flat.size());
  for (auto& [text, p] : flat) {
    std::vector<std::string> toks;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t sp = text.find(' ', pos);
      if (sp == std::string::npos) sp = text.size();
      toks.push_back(text.substr(pos, sp - pos));
      pos = sp + 1;
    }
    out.push_back(SupportEntry{Program::from_tokens(std::move(toks)), p});
  }
  return out;
}

}  // namespace rubric
