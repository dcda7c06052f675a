#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rubric/labels.hpp"

namespace rubric {

struct RhsItem {
  enum class Kind { kNonterminal, kTerminal };
  Kind kind = Kind::kNonterminal;
  // Nonterminal index or terminal-run index, depending on kind.
  int index = 0;

  bool is_nonterminal() const { return kind == Kind::kNonterminal; }
  bool operator==(const RhsItem&) const = default;
};

struct ProductionRule {
  int lhs = 0;
  std::vector<RhsItem> rhs;
  std::optional<int> label;
  double prob = 1.0;
  int source_line = 0;
};

// Label-annotated acyclic PCFG. Immutable after construction; theta changes go
// through with_probabilities(), which revalidates.
//
// Rubric DSL, one rule per line:
//
//   %label "name" : loop|geometry|other
//   NonTerminal -> item item ... : prob [@label("name")]
//   NonTerminal -> item ... : ~weight [@label("name")]
//
// Bare identifiers are nonterminals, quoted strings are runs of terminal
// tokens, `#` starts a comment and the first rule's lhs is the start symbol.
// All rules of one nonterminal use either probabilities or `~` weights; the
// latter are normalized at parse time.
class RubricGrammar {
 public:
  const LabelSchema& schema() const noexcept { return schema_; }
  const std::vector<std::string>& nonterminals() const noexcept { return nonterminals_; }
  std::size_t num_nonterminals() const noexcept { return nonterminals_.size(); }
  int start() const noexcept { return start_; }

  const std::vector<ProductionRule>& rules() const noexcept { return rules_; }
  const ProductionRule& rule(std::size_t i) const { return rules_.at(i); }
  double rule_logprob(std::size_t i) const { return logprobs_.at(i); }
  // Rule indices with the given lhs, in source order.
  const std::vector<int>& rules_for(int nonterminal) const {
    return rules_by_lhs_.at(static_cast<std::size_t>(nonterminal));
  }

  // Terminal runs are interned: equal token sequences share one index.
  const std::vector<std::vector<std::string>>& terminal_runs() const noexcept {
    return terminal_runs_;
  }
  const std::string& terminal_text(int run) const {
    return terminal_texts_.at(static_cast<std::size_t>(run));
  }

  // Nonterminals ordered so every rule's children come before its lhs.
  const std::vector<int>& bottom_up_order() const noexcept { return bottom_up_; }

  std::optional<int> find_nonterminal(std::string_view name) const;

  // Cumulative rule probabilities per nonterminal, aligned with rules_for().
  const std::vector<double>& cumulative(int nonterminal) const {
    return cumulative_.at(static_cast<std::size_t>(nonterminal));
  }

  // Copy with new per-rule probabilities (indexed like rules()).
  RubricGrammar with_probabilities(const std::vector<double>& probs) const;

  // Serializes back to the DSL. parse_rubric(to_dsl()) reproduces the grammar.
  std::string to_dsl() const;

 private:
  friend class RubricBuilder;
  void finalize();

  LabelSchema schema_;
  std::vector<std::string> nonterminals_;
  int start_ = 0;
  std::vector<ProductionRule> rules_;
  std::vector<double> logprobs_;
  std::vector<std::vector<int>> rules_by_lhs_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::vector<std::string>> terminal_runs_;
  std::vector<std::string> terminal_texts_;
  std::vector<int> bottom_up_;
};

// Parses and validates. Label declarations in the text are merged into the
// schema. Errors: kSyntaxError (with line), kUnknownSymbol, kProbSumMismatch,
// kCycleDetected, kUnknownLabel.
RubricGrammar parse_rubric(std::string_view text, const LabelSchema& schema = {});

// Reads a rubric file from disk. Throws Error{kIoError} when unreadable.
RubricGrammar load_rubric(const std::string& path, const LabelSchema& schema = {});

}  // namespace rubric
