#include "rubric/zipf.hpp"

#include <algorithm>
#include <cmath>

#include "rubric/error.hpp"

namespace rubric {

FrequencyTable::FrequencyTable(std::vector<FrequencyEntry> entries) {
  std::unordered_map<std::string, std::size_t> merged;
  merged.reserve(entries.size());
  for (auto& e : entries) {
    if (!std::isfinite(e.weight) || e.weight < 0) {
      throw Error(ErrorCode::kNonPositiveWeight,
                  "weight must be finite and non-negative for '" + e.program + "'");
    }
    auto [it, inserted] = merged.emplace(e.program, ranked_.size());
    if (inserted) {
      ranked_.push_back(std::move(e));
    } else {
      ranked_[it->second].weight += e.weight;
    }
  }
  std::sort(ranked_.begin(), ranked_.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.program < b.program;
  });
  index_.reserve(ranked_.size());
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    index_.emplace(ranked_[i].program, i);
    total_ += ranked_[i].weight;
  }
}

std::optional<std::size_t> FrequencyTable::rank(const std::string& program) const {
  auto it = index_.find(program);
  if (it == index_.end()) return std::nullopt;
  return it->second + 1;
}

double FrequencyTable::weight(const std::string& program) const {
  auto it = index_.find(program);
  return it == index_.end() ? 0.0 : ranked_[it->second].weight;
}

FrequencyTable build_frequency(const std::vector<std::string>& rendered_corpus) {
  std::unordered_map<std::string, double> counts;
  counts.reserve(rendered_corpus.size());
  for (const auto& p : rendered_corpus) counts[p] += 1.0;
  std::vector<FrequencyEntry> entries;
  entries.reserve(counts.size());
  for (auto& [program, w] : counts) entries.push_back(FrequencyEntry{program, w});
  return FrequencyTable(std::move(entries));
}

FrequencyTable build_frequency(const std::vector<Program>& corpus) {
  std::vector<std::string> rendered;
  rendered.reserve(corpus.size());
  for (const auto& p : corpus) rendered.push_back(render(p));
  return build_frequency(rendered);
}

ZipfSplit split_zipf(const FrequencyTable& table, const ZipfSplitConfig& cfg) {
  ZipfSplit split;
  const auto& ranked = table.ranked();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < cfg.head_size) {
      split.head.push_back(ranked[i].program);
    } else if (ranked[i].weight <= cfg.tail_max_weight) {
      split.tail.push_back(ranked[i].program);
    } else {
      split.body.push_back(ranked[i].program);
    }
  }
  return split;
}

ZipfRegion zipf_region(const FrequencyTable& table, const std::string& program,
                       const ZipfSplitConfig& cfg) {
  auto r = table.rank(program);
  if (!r) return 1.0 <= cfg.tail_max_weight ? ZipfRegion::kTail : ZipfRegion::kBody;
  if (*r <= cfg.head_size) return ZipfRegion::kHead;
  return table.weight(program) <= cfg.tail_max_weight ? ZipfRegion::kTail
                                                      : ZipfRegion::kBody;
}

ZipfFit fit_zipf(const FrequencyTable& table) {
  std::vector<double> xs, ys;
  const auto& ranked = table.ranked();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].weight <= 0) continue;
    xs.push_back(std::log(static_cast<double>(i + 1)));
    ys.push_back(std::log(ranked[i].weight / table.total()));
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::kTooFewEntries, "Zipf fit needs at least 3 positive entries");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  ZipfFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  // Constant log-probabilities are fit exactly by a flat line.
  fit.r2 = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

FrequencyTable log_zipf(const FrequencyTable& table) {
  std::vector<FrequencyEntry> out;
  out.reserve(table.size());
  for (const auto& e : table.ranked()) {
    if (!(e.weight >= 1.0)) {
      throw Error(ErrorCode::kNonPositiveWeight,
                  "log-Zipf needs weights >= 1, got " + std::to_string(e.weight));
    }
    out.push_back(FrequencyEntry{e.program, std::max(1.0, std::log(e.weight))});
  }
  return FrequencyTable(std::move(out));
}

FrequencyTable exp_zipf(const FrequencyTable& table) {
  std::vector<FrequencyEntry> out;
  out.reserve(table.size());
  for (const auto& e : table.ranked()) {
    out.push_back(FrequencyEntry{e.program, std::exp(e.weight)});
  }
  return FrequencyTable(std::move(out));
}

double rank_order_distance(const FrequencyTable& a, const FrequencyTable& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kEmptyTable, "rank-order distance needs non-empty tables");
  }
  const double missing_a = std::log(static_cast<double>(a.size() + 1));
  const double missing_b = std::log(static_cast<double>(b.size() + 1));
  double sum = 0;
  std::size_t count = 0;
  const auto& ra = a.ranked();
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const auto rb = b.rank(ra[i].program);
    const double la = std::log(static_cast<double>(i + 1));
    const double lb = rb ? std::log(static_cast<double>(*rb)) : missing_b;
    sum += (la - lb) * (la - lb);
    ++count;
  }
  const auto& rbv = b.ranked();
  for (std::size_t j = 0; j < rbv.size(); ++j) {
    if (a.contains(rbv[j].program)) continue;
    const double lb = std::log(static_cast<double>(j + 1));
    sum += (missing_a - lb) * (missing_a - lb);
    ++count;
  }
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace rubric
