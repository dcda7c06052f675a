#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rubric/program.hpp"

namespace rubric {

struct FrequencyEntry {
  std::string program;  // rendered program text
  double weight = 0.0;

  bool operator==(const FrequencyEntry&) const = default;
};

// Weighted multiset of programs with a total rank order: descending weight,
// ties broken by ascending program text. Immutable after construction.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  // Duplicate programs are merged by summing weights. Weights must be finite
  // and >= 0.
  explicit FrequencyTable(std::vector<FrequencyEntry> entries);

  std::size_t size() const noexcept { return ranked_.size(); }
  bool empty() const noexcept { return ranked_.empty(); }
  double total() const noexcept { return total_; }

  // Entries in rank order; entry i has rank i + 1.
  const std::vector<FrequencyEntry>& ranked() const noexcept { return ranked_; }

  std::optional<std::size_t> rank(const std::string& program) const;
  double weight(const std::string& program) const;
  bool contains(const std::string& program) const { return index_.count(program) > 0; }

 private:
  std::vector<FrequencyEntry> ranked_;
  std::unordered_map<std::string, std::size_t> index_;
  double total_ = 0.0;
};

FrequencyTable build_frequency(const std::vector<Program>& corpus);
FrequencyTable build_frequency(const std::vector<std::string>& rendered_corpus);

enum class ZipfRegion { kHead, kBody, kTail };

struct ZipfSplit {
  std::vector<std::string> head;
  std::vector<std::string> body;
  std::vector<std::string> tail;
};

struct ZipfSplitConfig {
  std::size_t head_size = 20;
  double tail_max_weight = 3.0;
};

// head = top head_size by rank, tail = weight <= tail_max_weight outside the
// head, body = the rest.
ZipfSplit split_zipf(const FrequencyTable& table, const ZipfSplitConfig& cfg = {});

// Region of one program. Programs missing from the table count as weight 1.
ZipfRegion zipf_region(const FrequencyTable& table, const std::string& program,
                       const ZipfSplitConfig& cfg = {});

struct ZipfFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares of ln(weight / total) on ln(rank) over positive-weight
// entries. Throws Error{kTooFewEntries} with fewer than 3 of them.
ZipfFit fit_zipf(const FrequencyTable& table);

// weight -> max(1, ln weight). Throws Error{kNonPositiveWeight} for any
// weight below 1.
FrequencyTable log_zipf(const FrequencyTable& table);

// weight -> exp(weight). Inverts log_zipf for original weights >= e; a
// singleton comes back as e.
FrequencyTable exp_zipf(const FrequencyTable& table);

// Root-mean-square difference of ln(rank) over the union of both tables. A
// program missing from a table takes rank size + 1 there. Throws
// Error{kEmptyTable} if either table is empty.
double rank_order_distance(const FrequencyTable& a, const FrequencyTable& b);

}  // namespace rubric
