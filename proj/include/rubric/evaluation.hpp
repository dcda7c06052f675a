#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rubric/classifier.hpp"
#include "rubric/labels.hpp"
#include "rubric/program.hpp"
#include "rubric/zipf.hpp"

namespace rubric {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// A ratio whose denominator is empty is 1 when nothing was missed (no false
// negatives for precision, no false positives for recall) and 0 otherwise.
// F1 is the harmonic mean of the two, 0 when both are 0.
PRF prf(const Confusion& c);

struct LabelMetrics {
  Confusion counts;
  PRF scores;
};

struct SplitMetrics {
  std::size_t count = 0;  // programs in the split
  std::vector<LabelMetrics> per_label;
  LabelMetrics micro;     // confusion pooled over labels
  double macro_f1 = 0.0;  // mean of per-label F1
};

struct EvalReport {
  std::optional<SplitMetrics> body;  // absent when the split is empty
  std::optional<SplitMetrics> tail;
  std::size_t head_excluded = 0;
};

struct EvalOptions {
  double threshold = 0.5;
  ZipfSplitConfig split;
};

struct LabeledProgram {
  Program program;
  LabelVector labels;
};

// Thresholds precomputed predictions; regions come from `table`.
EvalReport evaluate_predictions(const std::vector<LabeledProgram>& corpus,
                                const std::vector<LabelVector>& predicted,
                                const FrequencyTable& table, const EvalOptions& opts = {});

EvalReport evaluate(const MultiLabelModel& model, const std::vector<LabeledProgram>& corpus,
                    const FrequencyTable& table, const EvalOptions& opts = {});

}  // namespace rubric
