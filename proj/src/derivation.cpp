#include "rubric/derivation.hpp"

#include "rubric/error.hpp"

namespace rubric {

std::vector<int> Derivation::rule_sequence() const {
  std::vector<int> seq;
  seq.reserve(nodes.size());
  for (const auto& n : nodes) seq.push_back(n.rule);
  return seq;
}

namespace {

[[noreturn]] void foreign(const std::string& why) {
  throw Error(ErrorCode::kForeignDerivation, "derivation does not fit grammar: " + why);
}

// Walks the tree checking structure and spans; returns the end position.
std::size_t check_node(const RubricGrammar& g, const Derivation& d, int index,
                       int expected_lhs, std::size_t begin, int& next) {
  if (index != next) foreign("nodes are not stored in preorder");
  if (static_cast<std::size_t>(index) >= d.nodes.size()) {
    foreign("child index out of range");
  }
  ++next;
  const auto& node = d.nodes[index];
  if (node.rule < 0 || static_cast<std::size_t>(node.rule) >= g.rules().size()) {
    foreign("rule index out of range");
  }
  const auto& rule = g.rule(node.rule);
  if (rule.lhs != expected_lhs) foreign("rule lhs does not match parent item");
  if (node.begin != begin) foreign("span does not start where expected");

  std::size_t pos = begin;
  std::size_t child = 0;
  for (const auto& item : rule.rhs) {
    if (item.is_nonterminal()) {
      if (child >= node.children.size()) foreign("missing child");
      pos = check_node(g, d, node.children[child++], item.index, pos, next);
    } else {
      pos += g.terminal_runs()[item.index].size();
    }
  }
  if (child != node.children.size()) foreign("extra children");
  if (node.end != pos) foreign("span does not end where expected");
  return pos;
}

void validate(const RubricGrammar& g, const Derivation& d) {
  if (d.nodes.empty()) foreign("empty derivation");
  int next = 0;
  check_node(g, d, 0, g.start(), 0, next);
  if (static_cast<std::size_t>(next) != d.nodes.size()) foreign("unreachable node");
}

void emit(const RubricGrammar& g, const Derivation& d, int index,
          std::vector<std::string>& out) {
  const auto& node = d.nodes[index];
  std::size_t child = 0;
  for (const auto& item : g.rule(node.rule).rhs) {
    if (item.is_nonterminal()) {
      emit(g, d, node.children[child++], out);
    } else {
      const auto& run = g.terminal_runs()[item.index];
      out.insert(out.end(), run.begin(), run.end());
    }
  }
}

}  // namespace

double derivation_logprob(const RubricGrammar& grammar, const Derivation& d) {
  validate(grammar, d);
  double lp = 0.0;
  for (const auto& node : d.nodes) lp += grammar.rule_logprob(node.rule);
  return lp;
}

Program derivation_yield(const RubricGrammar& grammar, const Derivation& d) {
  validate(grammar, d);
  std::vector<std::string> tokens;
  emit(grammar, d, 0, tokens);
  return Program::from_tokens(std::move(tokens));
}

LabelVector derivation_labels(const RubricGrammar& grammar, const Derivation& d) {
  LabelVector labels(grammar.schema().size());
  for (const auto& node : d.nodes) {
    if (auto l = grammar.rule(node.rule).label) labels.set(*l, 1.0);
  }
  return labels;
}

HighlightMask derivation_mask(const RubricGrammar& grammar, const Derivation& d) {
  HighlightMask mask;
  for (const auto& node : d.nodes) {
    if (auto l = grammar.rule(node.rule).label) {
      mask.spans.push_back(HighlightSpan{node.begin, node.end, *l});
    }
  }
  return mask;
}

}  // namespace rubric
