#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rubric/grammar.hpp"
#include "rubric/zipf.hpp"

namespace rubric {

// Unconstrained search coordinates for theta: one logit per rule, softmaxed
// within each lhs group.
class ThetaLogits {
 public:
  ThetaLogits() = default;
  explicit ThetaLogits(std::vector<double> logits) : logits_(std::move(logits)) {}

  // ln(theta) of the grammar's current probabilities.
  static ThetaLogits from_grammar(const RubricGrammar& grammar);
  // Independent N(0, scale^2) logits.
  static ThetaLogits random(const RubricGrammar& grammar, std::uint64_t seed,
                            double scale = 1.0);

  const std::vector<double>& values() const noexcept { return logits_; }
  std::size_t size() const noexcept { return logits_.size(); }

  std::vector<double> probabilities(const RubricGrammar& grammar) const;
  RubricGrammar apply(const RubricGrammar& grammar) const;

  bool operator==(const ThetaLogits&) const = default;

 private:
  std::vector<double> logits_;
};

enum class EsUpdate {
  kEliteMean,        // new center = mean of the elite_k best candidates
  kFitnessWeighted,  // center += lr / (pop * sigma) * sum(rank_utility * eps)
};

struct ESConfig {
  std::size_t population = 50;
  double sigma = 0.1;
  std::size_t elite_k = 10;
  std::size_t iterations = 100;
  std::size_t fitness_sample_size = 20'000;
  std::uint64_t seed = 0;
  EsUpdate update = EsUpdate::kEliteMean;
  double learning_rate = 0.1;  // kFitnessWeighted only
  // Every candidate of a generation is scored on the same sampling stream.
  // When false (default) that stream is also shared across generations.
  bool resample_each_generation = false;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double best_so_far = 0.0;
};

struct TuneReport {
  std::vector<IterationRecord> iterations;
  ThetaLogits final_logits;
};

struct TuneResult {
  RubricGrammar grammar;
  TuneReport report;
};

// -rank_order_distance(table of m non-unique samples, unlabeled).
double fitness(const RubricGrammar& grammar, const ThetaLogits& theta,
               const FrequencyTable& unlabeled, std::size_t m, std::uint64_t seed);

// Frequency table of m non-unique samples.
FrequencyTable sample_frequency(const RubricGrammar& grammar, std::size_t m,
                                std::uint64_t seed);

// Tunes from the grammar's own probabilities.
TuneResult tune(const RubricGrammar& grammar, const FrequencyTable& unlabeled,
                const ESConfig& cfg);
// Tunes from explicit starting logits.
TuneResult tune(const RubricGrammar& grammar, const FrequencyTable& unlabeled,
                const ESConfig& cfg, const ThetaLogits& init);

}  // namespace rubric
