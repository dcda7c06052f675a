#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rubric/classifier.hpp"
#include "rubric/labels.hpp"
#include "rubric/program.hpp"

namespace rubric {

enum class TraceCategory { kNoErrors, kLoopErrors, kGeometryErrors };

std::string_view trace_category_name(TraceCategory c);

// Sums predicted probabilities over the loop and geometry label groups. Both
// sums below 1 is no-errors; otherwise the larger sum decides, ties to loop.
TraceCategory classify_submission(const LabelVector& probs, const LabelSchema& schema);

struct IndexDistribution {
  std::size_t index = 0;  // 1-based submission index
  std::size_t students = 0;
  double no_errors = 0.0;
  double loop_errors = 0.0;
  double geometry_errors = 0.0;
};

struct StudentTrace {
  std::string student_id;
  std::vector<TraceCategory> categories;  // one per submission
};

struct TraceReport {
  std::vector<IndexDistribution> per_index;  // indices that at least one student reached
  std::vector<StudentTrace> students;
};

using ProgramPredictor = std::function<LabelVector(const Program&)>;

TraceReport knowledge_trace(const ProgramPredictor& predictor,
                            const std::vector<Trajectory>& trajectories,
                            const LabelSchema& schema, std::size_t max_index = 10);

TraceReport knowledge_trace(const MultiLabelModel& model,
                            const std::vector<Trajectory>& trajectories,
                            const LabelSchema& schema, std::size_t max_index = 10);

}  // namespace rubric
