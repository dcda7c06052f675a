#pragma once

#include <cstddef>
#include <vector>

#include "rubric/grammar.hpp"
#include "rubric/labels.hpp"
#include "rubric/program.hpp"

namespace rubric {

// One rule application. [begin, end) is the token span of its subtree's yield
// and children are node indices, one per nonterminal item of the rule's rhs.
struct DerivationNode {
  int rule = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<int> children;

  bool operator==(const DerivationNode&) const = default;
};

// Derivation tree stored in preorder (node 0 is the root). Preorder is also
// the order a leftmost derivation applies the rules.
struct Derivation {
  std::vector<DerivationNode> nodes;

  std::vector<int> rule_sequence() const;
  bool operator==(const Derivation&) const = default;
};

struct HighlightSpan {
  std::size_t token_start = 0;
  std::size_t token_end = 0;  // exclusive
  int label = 0;

  bool operator==(const HighlightSpan&) const = default;
};

// One span per labeled rule application, in preorder. Spans of nested labeled
// rules nest; no two spans partially overlap.
struct HighlightMask {
  std::vector<HighlightSpan> spans;

  bool operator==(const HighlightMask&) const = default;
};

// Sum of rule log-probabilities in preorder. Throws Error{kForeignDerivation}
// when the tree does not fit the grammar.
double derivation_logprob(const RubricGrammar& grammar, const Derivation& d);

// Token yield of a (validated) derivation.
Program derivation_yield(const RubricGrammar& grammar, const Derivation& d);

LabelVector derivation_labels(const RubricGrammar& grammar, const Derivation& d);
HighlightMask derivation_mask(const RubricGrammar& grammar, const Derivation& d);

}  // namespace rubric
