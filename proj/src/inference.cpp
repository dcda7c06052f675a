#include "rubric/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <unordered_set>

namespace rubric {

namespace {

constexpr std::size_t kLenCap = std::numeric_limits<std::size_t>::max() / 4;

std::size_t sat_add(std::size_t a, std::size_t b) { return std::min(kLenCap, a + b); }

struct StackCell {
  int sym;   // < num_nonterminals: nonterminal, else terminal run + offset
  int rest;  // index of the cell below; 0 is the empty stack
  double h;
  std::size_t min_len;
  std::size_t max_len;
};

struct SearchNode {
  int stack;
  std::uint32_t pos;
  double g;
  double f;
  int parent;
  int rule;
};

}  // namespace

HeuristicTable build_heuristic(const RubricGrammar& grammar) {
  HeuristicTable table;
  table.bounds_.assign(grammar.num_nonterminals(), -std::numeric_limits<double>::infinity());
  for (int nt : grammar.bottom_up_order()) {
    double best = -std::numeric_limits<double>::infinity();
    for (int r : grammar.rules_for(nt)) {
      double v = grammar.rule_logprob(r);
      for (const auto& item : grammar.rule(r).rhs) {
        if (item.is_nonterminal()) v += table.bounds_[item.index];
      }
      best = std::max(best, v);
    }
    table.bounds_[nt] = best;
  }
  return table;
}

ViterbiParser::ViterbiParser(const RubricGrammar& grammar)
    : grammar_(grammar), heuristic_(build_heuristic(grammar)) {
  for (const auto& run : grammar.terminal_runs()) {
    std::vector<int> ids;
    for (const auto& tok : run) {
      auto [it, inserted] = vocab_.emplace(tok, static_cast<int>(vocab_.size()));
      ids.push_back(it->second);
    }
    runs_.push_back(std::move(ids));
  }

  const std::size_t n = grammar.num_nonterminals();
  min_len_.assign(n, kLenCap);
  max_len_.assign(n, 0);
  first_.assign(n, std::vector<bool>(vocab_.size(), false));
  for (int nt : grammar.bottom_up_order()) {
    for (int r : grammar.rules_for(nt)) {
      const auto& rhs = grammar.rule(r).rhs;
      std::size_t lo = 0, hi = 0;
      for (const auto& item : rhs) {
        if (item.is_nonterminal()) {
          lo = sat_add(lo, min_len_[item.index]);
          hi = sat_add(hi, max_len_[item.index]);
        } else {
          lo = sat_add(lo, runs_[item.index].size());
          hi = sat_add(hi, runs_[item.index].size());
        }
      }
      min_len_[nt] = std::min(min_len_[nt], lo);
      max_len_[nt] = std::max(max_len_[nt], hi);
      // Every symbol derives at least one token, so only the first item matters.
      const auto& head = rhs.front();
      if (head.is_nonterminal()) {
        for (std::size_t t = 0; t < vocab_.size(); ++t) {
          if (first_[head.index][t]) first_[nt][t] = true;
        }
      } else {
        first_[nt][runs_[head.index].front()] = true;
      }
    }
  }
}

std::optional<ParseResult> ViterbiParser::parse(const Program& program,
                                                const ParseOptions& opts,
                                                ParseStats* stats) const {
  ParseStats local_stats;
  ParseStats& st = stats ? *stats : local_stats;
  st = ParseStats{};

  std::vector<int> input;
  input.reserve(program.size());
  for (const auto& tok : program.tokens()) {
    auto it = vocab_.find(tok.text);
    if (it == vocab_.end()) return std::nullopt;
    input.push_back(it->second);
  }
  const std::size_t n = input.size();
  const int num_nt = static_cast<int>(grammar_.num_nonterminals());
  const bool use_h = opts.mode == SearchMode::kAStar;

  std::vector<StackCell> cells{StackCell{-1, 0, 0.0, 0, 0}};
  std::unordered_map<std::uint64_t, int> cell_index;
  auto push_sym = [&](int sym, int rest) {
    const std::uint64_t key = (static_cast<std::uint64_t>(rest) << 24) |
                              static_cast<std::uint64_t>(sym);
    auto it = cell_index.find(key);
    if (it != cell_index.end()) return it->second;
    const StackCell& below = cells[rest];
    StackCell c{sym, rest, below.h, below.min_len, below.max_len};
    if (sym < num_nt) {
      if (use_h) c.h += heuristic_.bound(sym);
      c.min_len = sat_add(c.min_len, min_len_[sym]);
      c.max_len = sat_add(c.max_len, max_len_[sym]);
    } else {
      const std::size_t len = runs_[sym - num_nt].size();
      c.min_len = sat_add(c.min_len, len);
      c.max_len = sat_add(c.max_len, len);
    }
    const int id = static_cast<int>(cells.size());
    cells.push_back(c);
    cell_index.emplace(key, id);
    return id;
  };

  std::vector<SearchNode> nodes;
  auto rule_seq = [&nodes](int idx) {
    std::vector<int> seq;
    for (; idx >= 0; idx = nodes[idx].parent) {
      if (nodes[idx].rule >= 0) seq.push_back(nodes[idx].rule);
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };
  // Returns true when a should be popped after b.
  auto later = [&](int a, int b) {
    const auto& na = nodes[a];
    const auto& nb = nodes[b];
    if (na.f != nb.f) return na.f < nb.f;
    if (na.g != nb.g) return na.g < nb.g;
    const auto sa = rule_seq(a);
    const auto sb = rule_seq(b);
    return std::lexicographical_compare(sb.begin(), sb.end(), sa.begin(), sa.end());
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> open(later);

  // Scans terminal runs off the top of the stack and checks feasibility.
  auto settle = [&](int stack, std::size_t pos) -> std::optional<std::pair<int, std::size_t>> {
    while (stack != 0 && cells[stack].sym >= num_nt) {
      const auto& run = runs_[cells[stack].sym - num_nt];
      if (pos + run.size() > n) return std::nullopt;
      for (std::size_t k = 0; k < run.size(); ++k) {
        if (input[pos + k] != run[k]) return std::nullopt;
      }
      pos += run.size();
      stack = cells[stack].rest;
    }
    if (stack == 0) {
      if (pos != n) return std::nullopt;
      return std::make_pair(stack, pos);
    }
    const auto& top = cells[stack];
    const std::size_t remaining = n - pos;
    if (remaining < top.min_len || remaining > top.max_len) return std::nullopt;
    if (!first_[top.sym][input[pos]]) return std::nullopt;
    return std::make_pair(stack, pos);
  };

  auto add_node = [&](int stack, std::size_t pos, double g, int parent, int rule) {
    const double f = g + cells[stack].h;
    nodes.push_back(SearchNode{stack, static_cast<std::uint32_t>(pos), g, f, parent, rule});
    open.push(static_cast<int>(nodes.size()) - 1);
    ++st.pushed;
  };

  if (n == 0) return std::nullopt;
  if (auto s = settle(push_sym(grammar_.start(), 0), 0)) {
    add_node(s->first, s->second, 0.0, -1, -1);
  }

  std::unordered_set<std::uint64_t> closed;
  int best_goal = -1;
  while (!open.empty()) {
    const int idx = open.top();
    if (best_goal >= 0 && use_h) {
      const double g_best = nodes[best_goal].g;
      // Keep draining near-ties so floating rounding in f cannot hide a
      // better or lexicographically smaller goal.
      if (nodes[idx].f < g_best - 1e-12 * (1.0 + std::abs(g_best))) break;
    }
    open.pop();
    const SearchNode node = nodes[idx];

    if (node.stack == 0) {
      if (best_goal < 0 || later(best_goal, idx)) best_goal = idx;
      continue;
    }
    const std::uint64_t key = static_cast<std::uint64_t>(node.stack) * (n + 1) + node.pos;
    if (!closed.insert(key).second) continue;
    ++st.expanded;

    const StackCell top = cells[node.stack];
    for (int r : grammar_.rules_for(top.sym)) {
      const auto& rhs = grammar_.rule(r).rhs;
      int stack = top.rest;
      for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) {
        stack = push_sym(it->is_nonterminal() ? it->index : num_nt + it->index, stack);
      }
      if (auto s = settle(stack, node.pos)) {
        add_node(s->first, s->second, node.g + grammar_.rule_logprob(r), idx, r);
      }
    }
  }
  if (best_goal < 0) return std::nullopt;

  if (opts.check_admissibility) {
    const double g_goal = nodes[best_goal].g;
    for (int i = best_goal; i >= 0; i = nodes[i].parent) {
      const double completion = g_goal - nodes[i].g;
      const double bound = use_h ? cells[nodes[i].stack].h : 0.0;
      if (use_h && bound < completion - 1e-12) ++st.admissibility_violations;
    }
  }

  // Replay the leftmost rule sequence into a preorder tree with spans.
  const auto seq = rule_seq(best_goal);
  ParseResult result;
  std::size_t next = 0;
  std::size_t pos = 0;
  auto build = [&](auto&& self) -> int {
    const int rule = seq[next++];
    const int index = static_cast<int>(result.derivation.nodes.size());
    result.derivation.nodes.push_back(DerivationNode{rule, pos, 0, {}});
    for (const auto& item : grammar_.rule(rule).rhs) {
      if (item.is_nonterminal()) {
        const int child = self(self);
        result.derivation.nodes[index].children.push_back(child);
      } else {
        pos += runs_[item.index].size();
      }
    }
    result.derivation.nodes[index].end = pos;
    return index;
  };
  build(build);
  result.logprob = nodes[best_goal].g;
  result.labels = derivation_labels(grammar_, result.derivation);
  result.mask = derivation_mask(grammar_, result.derivation);
  return result;
}

std::optional<ParseResult> viterbi_parse(const RubricGrammar& grammar, const Program& program) {
  return ViterbiParser(grammar).parse(program);
}

std::optional<HighlightMask> highlight(const RubricGrammar& grammar, const Program& program) {
  auto r = viterbi_parse(grammar, program);
  if (!r) return std::nullopt;
  return std::move(r->mask);
}

std::optional<LabelVector> predict_labels_grammar(const RubricGrammar& grammar,
                                                  const Program& program) {
  auto r = viterbi_parse(grammar, program);
  if (!r) return std::nullopt;
  return std::move(r->labels);
}

std::string annotate(const RubricGrammar& grammar, const Program& program,
                     const HighlightMask& mask) {
  std::string out;
  auto emit = [&out](const std::string& s) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  };
  for (std::size_t i = 0; i < program.size(); ++i) {
    for (const auto& span : mask.spans) {
      if (span.token_start == i) emit("[" + grammar.schema()[span.label].name + ":");
    }
    emit(program[i].text);
    for (auto it = mask.spans.rbegin(); it != mask.spans.rend(); ++it) {
      if (it->token_end == i + 1) emit("]");
    }
  }
  return out;
}

}  // namespace rubric
