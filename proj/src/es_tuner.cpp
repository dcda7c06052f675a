#include "rubric/es_tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "rubric/error.hpp"
#include "rubric/sampler.hpp"

namespace rubric {

namespace {

// Lowest logit kept relative to its group's max, so exp() never underflows.
constexpr double kLogitFloor = -700.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void validate(const ESConfig& cfg) {
  if (cfg.population == 0 || cfg.elite_k == 0 || cfg.fitness_sample_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "ES counts must be >= 1");
  }
  if (cfg.elite_k > cfg.population) {
    throw Error(ErrorCode::kInvalidArgument, "elite_k must not exceed population");
  }
  if (!(cfg.sigma > 0) || !std::isfinite(cfg.sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  }
}

}  // namespace

ThetaLogits ThetaLogits::from_grammar(const RubricGrammar& grammar) {
  std::vector<double> logits;
  logits.reserve(grammar.rules().size());
  for (std::size_t i = 0; i < grammar.rules().size(); ++i) {
    logits.push_back(grammar.rule_logprob(i));
  }
  return ThetaLogits(std::move(logits));
}

ThetaLogits ThetaLogits::random(const RubricGrammar& grammar, std::uint64_t seed,
                                double scale) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> logits(grammar.rules().size());
  for (auto& v : logits) v = normal(rng);
  return ThetaLogits(std::move(logits));
}

std::vector<double> ThetaLogits::probabilities(const RubricGrammar& grammar) const {
  if (logits_.size() != grammar.rules().size()) {
    throw Error(ErrorCode::kInvalidArgument, "logit vector has wrong length");
  }
  std::vector<double> probs(logits_.size());
  for (std::size_t nt = 0; nt < grammar.num_nonterminals(); ++nt) {
    const auto& rules = grammar.rules_for(static_cast<int>(nt));
    double mx = -INFINITY;
    for (int r : rules) {
      if (!std::isfinite(logits_[r])) {
        throw Error(ErrorCode::kNonFiniteFitness, "non-finite logit");
      }
      mx = std::max(mx, logits_[r]);
    }
    double z = 0;
    for (int r : rules) {
      probs[r] = std::exp(std::max(logits_[r] - mx, kLogitFloor));
      z += probs[r];
    }
    for (int r : rules) probs[r] /= z;
  }
  return probs;
}

RubricGrammar ThetaLogits::apply(const RubricGrammar& grammar) const {
  return grammar.with_probabilities(probabilities(grammar));
}

FrequencyTable sample_frequency(const RubricGrammar& grammar, std::size_t m,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::unordered_map<std::string, double> counts;
  counts.reserve(m);
  for (std::size_t i = 0; i < m; ++i) counts[sample_text(grammar, rng)] += 1.0;
  std::vector<FrequencyEntry> entries;
  entries.reserve(counts.size());
  for (auto& [program, w] : counts) entries.push_back(FrequencyEntry{program, w});
  return FrequencyTable(std::move(entries));
}

double fitness(const RubricGrammar& grammar, const ThetaLogits& theta,
               const FrequencyTable& unlabeled, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "fitness needs m >= 1");
  const RubricGrammar candidate = theta.apply(grammar);
  const double value = -rank_order_distance(sample_frequency(candidate, m, seed), unlabeled);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFiniteFitness, "fitness evaluated to a non-finite value");
  }
  return value;
}

TuneResult tune(const RubricGrammar& grammar, const FrequencyTable& unlabeled,
                const ESConfig& cfg) {
  validate(cfg);
  if (cfg.iterations == 0) {
    return TuneResult{grammar, TuneReport{{}, ThetaLogits::from_grammar(grammar)}};
  }
  return tune(grammar, unlabeled, cfg, ThetaLogits::from_grammar(grammar));
}

TuneResult tune(const RubricGrammar& grammar, const FrequencyTable& unlabeled,
                const ESConfig& cfg, const ThetaLogits& init) {
  validate(cfg);
  if (unlabeled.empty()) throw Error(ErrorCode::kEmptyTable, "unlabeled table is empty");
  if (init.size() != grammar.rules().size()) {
    throw Error(ErrorCode::kInvalidArgument, "initial logits have wrong length");
  }

  const std::size_t dim = init.size();
  std::vector<double> center = init.values();
  Rng noise_rng(splitmix64(cfg.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::uint64_t shared_eval_seed = splitmix64(cfg.seed ^ 0x5bd1e995ull);

  TuneReport report;
  double best_so_far = -INFINITY;
  std::vector<std::vector<double>> eps(cfg.population, std::vector<double>(dim));
  std::vector<double> fit(cfg.population);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const std::uint64_t eval_seed =
        cfg.resample_each_generation ? splitmix64(shared_eval_seed + it + 1) : shared_eval_seed;
    for (std::size_t i = 0; i < cfg.population; ++i) {
      std::vector<double> cand(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        eps[i][d] = normal(noise_rng);
        cand[d] = center[d] + cfg.sigma * eps[i][d];
      }
      fit[i] = fitness(grammar, ThetaLogits(std::move(cand)), unlabeled,
                       cfg.fitness_sample_size, eval_seed);
    }

    std::vector<std::size_t> order(cfg.population);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&fit](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });

    if (cfg.update == EsUpdate::kEliteMean) {
      std::vector<double> next(dim, 0.0);
      for (std::size_t k = 0; k < cfg.elite_k; ++k) {
        for (std::size_t d = 0; d < dim; ++d) {
          next[d] += center[d] + cfg.sigma * eps[order[k]][d];
        }
      }
      for (std::size_t d = 0; d < dim; ++d) next[d] /= static_cast<double>(cfg.elite_k);
      center = std::move(next);
    } else {
      // Centered rank utilities in [-0.5, 0.5].
      std::vector<double> utility(cfg.population, 0.0);
      if (cfg.population > 1) {
        for (std::size_t r = 0; r < cfg.population; ++r) {
          utility[order[r]] = 0.5 - static_cast<double>(r) / static_cast<double>(cfg.population - 1);
        }
      }
      const double scale = cfg.learning_rate / (static_cast<double>(cfg.population) * cfg.sigma);
      for (std::size_t d = 0; d < dim; ++d) {
        double step = 0;
        for (std::size_t i = 0; i < cfg.population; ++i) step += utility[i] * eps[i][d];
        center[d] += scale * step;
      }
    }

    const double best = fit[order.front()];
    const double mean = std::accumulate(fit.begin(), fit.end(), 0.0) /
                        static_cast<double>(cfg.population);
    best_so_far = std::max(best_so_far, best);
    report.iterations.push_back(IterationRecord{it, best, mean, best_so_far});
  }

  report.final_logits = ThetaLogits(center);
  RubricGrammar tuned = report.final_logits.apply(grammar);
  return TuneResult{std::move(tuned), std::move(report)};
}

}  // namespace rubric
