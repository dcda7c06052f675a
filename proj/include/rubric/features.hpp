#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rubric/interpreter.hpp"
#include "rubric/program.hpp"

namespace rubric {

// Sparse view of a fixed-dimension non-negative vector. Entries are sorted by
// index with no duplicates; absent indices are zero.
struct FeatureVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  double at(std::size_t index) const;
  std::vector<double> dense() const;
  bool operator==(const FeatureVector&) const = default;
};

// Merges duplicate indices and sorts.
FeatureVector make_feature_vector(std::size_t dim,
                                  std::vector<std::pair<std::uint32_t, double>> raw);

struct FeatureConfig {
  std::size_t dim = 4096;
  // Per opened block, also count (enclosing block, block) and (enclosing
  // block, previous sibling, block). Token bigrams alone cannot tell a
  // statement's nesting or order among siblings.
  bool block_context = false;

  bool operator==(const FeatureConfig&) const = default;
};

// FNV-1a 64 of the byte string, used for hash folding.
std::uint64_t feature_hash(std::string_view key);

// Hashed counts of token unigrams and adjacent bigrams (plus block context
// pairs when enabled).
FeatureVector featurize(const Program& program, const FeatureConfig& cfg = {});

// Index layout of featurize_trace().
enum TraceFeature : std::uint32_t {
  kSegmentCount = 0,
  kPathLength,
  kAbsTurning,
  kClosureDistance,
  kBoxWidth,
  kBoxHeight,
  kCompiled,
  kTraceFeatureCount,
};

FeatureVector featurize_trace(const ExecutionTrace& trace);

}  // namespace rubric
