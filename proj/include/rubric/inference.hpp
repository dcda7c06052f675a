#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rubric/derivation.hpp"
#include "rubric/grammar.hpp"
#include "rubric/program.hpp"

namespace rubric {

// Per-nonterminal upper bound on the log-probability of any completion,
// bound(X) = max over rules of (rule logprob + sum of child bounds).
class HeuristicTable {
 public:
  double bound(int nonterminal) const { return bounds_.at(static_cast<std::size_t>(nonterminal)); }
  const std::vector<double>& bounds() const noexcept { return bounds_; }

 private:
  friend HeuristicTable build_heuristic(const RubricGrammar& grammar);
  std::vector<double> bounds_;
};

HeuristicTable build_heuristic(const RubricGrammar& grammar);

struct ParseResult {
  Derivation derivation;
  double logprob = 0.0;
  LabelVector labels;
  HighlightMask mask;
};

enum class SearchMode {
  kAStar,       // best-first with the admissible bound, stops at the first goal
  kExhaustive,  // uniform-cost search over every reachable state
};

struct ParseOptions {
  SearchMode mode = SearchMode::kAStar;
  // Verifies bound >= achieved completion logprob along the returned path.
  bool check_admissibility = false;
};

struct ParseStats {
  std::size_t expanded = 0;
  std::size_t pushed = 0;
  std::size_t admissibility_violations = 0;
};

// Max-probability parser over a fixed grammar. Search state is the matched
// token prefix length plus the stack of pending symbols; identical states are
// expanded once. Ties in log-probability go to the lexicographically smallest
// preorder rule sequence. Holds a reference to the grammar, which must
// outlive it.
class ViterbiParser {
 public:
  explicit ViterbiParser(const RubricGrammar& grammar);

  // nullopt means the program is outside the grammar's support.
  std::optional<ParseResult> parse(const Program& program, const ParseOptions& opts = {},
                                   ParseStats* stats = nullptr) const;

  const RubricGrammar& grammar() const noexcept { return grammar_; }
  const HeuristicTable& heuristic() const noexcept { return heuristic_; }

 private:
  const RubricGrammar& grammar_;
  HeuristicTable heuristic_;
  std::unordered_map<std::string, int> vocab_;
  std::vector<std::vector<int>> runs_;   // terminal runs as vocab ids
  std::vector<std::size_t> min_len_;     // per nonterminal
  std::vector<std::size_t> max_len_;     // per nonterminal, saturating
  std::vector<std::vector<bool>> first_; // per nonterminal, over vocab ids
};

std::optional<ParseResult> viterbi_parse(const RubricGrammar& grammar, const Program& program);
std::optional<HighlightMask> highlight(const RubricGrammar& grammar, const Program& program);
std::optional<LabelVector> predict_labels_grammar(const RubricGrammar& grammar,
                                                  const Program& program);

// Bracketed annotation: "[label-name: tokens ... ]" around each span.
std::string annotate(const RubricGrammar& grammar, const Program& program,
                     const HighlightMask& mask);

}  // namespace rubric
