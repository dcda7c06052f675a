#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rubric/derivation.hpp"
#include "rubric/grammar.hpp"

namespace rubric {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct SynExample {
  Program program;
  LabelVector labels;
  HighlightMask mask;
  double logprob = 0.0;
  Derivation derivation;
};

// Top-down, left-to-right expansion from the start symbol. Each nonterminal
// consumes exactly one uniform draw, in preorder.
SynExample sample(const RubricGrammar& grammar, Rng& rng);
SynExample sample(const RubricGrammar& grammar, std::uint64_t seed);

// Same draw sequence as sample() but only builds render(program).
std::string sample_text(const RubricGrammar& grammar, Rng& rng);

// n draws from one seeded stream. With unique_only, later duplicates of a
// program text are dropped (first-drawn labels win). n == 0 is rejected.
std::vector<SynExample> sample_corpus(const RubricGrammar& grammar, std::size_t n,
                                      bool unique_only, std::uint64_t seed);

struct SupportEntry {
  Program program;
  double prob = 0.0;
};

// Every derivable program with its total probability (summed over
// derivations), sorted by descending probability then text. Throws
// Error{kSupportTooLarge} as soon as any intermediate expansion exceeds
// max_items rather than truncating.
std::vector<SupportEntry> enumerate_support(const RubricGrammar& grammar,
                                            std::size_t max_items);

}  // namespace rubric
