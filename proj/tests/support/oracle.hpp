#pragma once

// Reference implementations used only by tests. They share nothing with the
// library beyond reading the parsed grammar's rules.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rubric/grammar.hpp"

namespace oracle {

struct Candidate {
  std::vector<std::string> tokens;
  std::vector<int> rules;  // preorder
  double logprob = 0.0;    // summed in preorder from 0.0
};

// Every derivation of the grammar. Aborts the test if more than `cap` exist.
std::vector<Candidate> all_derivations(const rubric::RubricGrammar& g, std::size_t cap);

// Best derivation per program text: max logprob, ties to the lexicographically
// smallest rule sequence.
std::map<std::string, Candidate> argmax_by_program(const std::vector<Candidate>& all);

// Total probability per program text (products of theta, summed).
std::map<std::string, double> exact_distribution(const rubric::RubricGrammar& g,
                                                 std::size_t cap);

// Upper tail P(X >= x) for a chi-square variable with k degrees of freedom.
double chi_square_sf(double x, double k);

std::string join(const std::vector<std::string>& tokens);

}  // namespace oracle
