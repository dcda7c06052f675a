#include <cmath>
#include <numeric>

#include "doctest.h"
#include "rubric/es_tuner.hpp"
#include "test_util.hpp"

using namespace rubric;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> probs_of(const RubricGrammar& g) {
  std::vector<double> out;
  for (const auto& r : g.rules()) out.push_back(r.prob);
  return out;
}

ESConfig small_config() {
  ESConfig cfg;
  cfg.population = 8;
  cfg.elite_k = 3;
  cfg.sigma = 0.3;
  cfg.iterations = 5;
  cfg.fitness_sample_size = 2000;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("zero iterations returns the grammar unchanged") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 1000, 1);
  ESConfig cfg = small_config();
  cfg.iterations = 0;
  const TuneResult r = tune(g, unlabeled, cfg);
  CHECK(r.report.iterations.empty());
  CHECK(probs_of(r.grammar) == probs_of(g));
}

TEST_CASE("tuned probabilities stay on the simplex") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 2000, 2);
  const TuneResult r = tune(g, unlabeled, small_config(), ThetaLogits::random(g, 9));
  const auto probs = probs_of(r.grammar);
  for (int a = 0; a < static_cast<int>(g.num_nonterminals()); ++a) {
    double sum = 0;
    for (int idx : g.rules_for(a)) {
      CHECK(probs[idx] > 0);
      sum += probs[idx];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("softmax ignores a shared shift within a group") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  const ThetaLogits base = ThetaLogits::random(g, 3);
  std::vector<double> shifted = base.values();
  for (double& v : shifted) v += 17.0;
  CHECK(max_abs_diff(base.probabilities(g), ThetaLogits(shifted).probabilities(g)) < 1e-12);
  const auto from = ThetaLogits::from_grammar(g).probabilities(g);
  CHECK(max_abs_diff(from, probs_of(g)) < 1e-12);
}

TEST_CASE("tuning is deterministic for a seed") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 2000, 2);
  const ThetaLogits init = ThetaLogits::random(g, 4);
  const TuneResult a = tune(g, unlabeled, small_config(), init);
  const TuneResult b = tune(g, unlabeled, small_config(), init);
  CHECK(a.report.final_logits == b.report.final_logits);
  REQUIRE(a.report.iterations.size() == b.report.iterations.size());
  for (std::size_t i = 0; i < a.report.iterations.size(); ++i) {
    CHECK(a.report.iterations[i].best_fitness == b.report.iterations[i].best_fitness);
  }
}

TEST_CASE("tiny sigma leaves theta in place") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 2000, 2);
  ESConfig cfg = small_config();
  cfg.sigma = 1e-9;
  cfg.iterations = 10;
  const TuneResult r = tune(g, unlabeled, cfg);
  CHECK(max_abs_diff(probs_of(r.grammar), probs_of(g)) < 1e-3);
}

TEST_CASE("best-so-far is monotone and matches the per-iteration best") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 3000, 21);
  ESConfig cfg = small_config();
  cfg.iterations = 8;
  const TuneResult r = tune(g, unlabeled, cfg, ThetaLogits::random(g, 22));
  REQUIRE(r.report.iterations.size() == 8);
  double running = -INFINITY;
  for (const auto& rec : r.report.iterations) {
    running = std::max(running, rec.best_fitness);
    CHECK(rec.best_so_far == running);
    CHECK(rec.best_fitness >= rec.mean_fitness);
    CHECK(rec.best_fitness <= 0);
  }
}

TEST_CASE("fitness is zero against the same stream") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  const ThetaLogits theta = ThetaLogits::from_grammar(g);
  const FrequencyTable unlabeled = sample_frequency(g, 5000, 77);
  CHECK(fitness(g, theta, unlabeled, 5000, 77) == 0.0);
  CHECK(fitness(g, theta, unlabeled, 5000, 78) < 0.0);
}

TEST_CASE("a degenerate theta scores worse than the planted one") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 20000, 1);
  // Push every group towards its last rule.
  std::vector<double> skew(g.rules().size(), 0.0);
  for (int a = 0; a < static_cast<int>(g.num_nonterminals()); ++a) {
    const auto& rules = g.rules_for(a);
    skew[rules.back()] = 6.0;
  }
  const double planted = fitness(g, ThetaLogits::from_grammar(g), unlabeled, 20000, 2);
  const double degenerate = fitness(g, ThetaLogits(skew), unlabeled, 20000, 2);
  CHECK(degenerate < planted);
}

TEST_CASE("invalid configurations") {
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  const FrequencyTable unlabeled = sample_frequency(g, 100, 1);
  ESConfig cfg = small_config();
  cfg.elite_k = cfg.population + 1;
  CHECK(error_of([&] { tune(g, unlabeled, cfg); }) == ErrorCode::kInvalidArgument);
  cfg = small_config();
  cfg.sigma = 0;
  CHECK(error_of([&] { tune(g, unlabeled, cfg); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { tune(g, FrequencyTable{}, small_config()); }) == ErrorCode::kEmptyTable);
  CHECK(error_of([&] { tune(g, unlabeled, small_config(), ThetaLogits({1.0})); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { fitness(g, ThetaLogits::from_grammar(g), unlabeled, 0, 1); }) ==
        ErrorCode::kInvalidArgument);
}
