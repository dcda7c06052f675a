#include "rubric/knowledge_trace.hpp"

#include "rubric/error.hpp"

namespace rubric {

std::string_view trace_category_name(TraceCategory c) {
  switch (c) {
    case TraceCategory::kNoErrors: return "no-errors";
    case TraceCategory::kLoopErrors: return "loop-errors";
    case TraceCategory::kGeometryErrors: return "geometry-errors";
  }
  return "?";
}

TraceCategory classify_submission(const LabelVector& probs, const LabelSchema& schema) {
  if (probs.size() != schema.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction size differs from schema size");
  }
  double loop = 0, geom = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (schema[j].group == LabelGroup::kLoop) loop += probs[j];
    if (schema[j].group == LabelGroup::kGeometry) geom += probs[j];
  }
  if (loop < 1 && geom < 1) return TraceCategory::kNoErrors;
  return loop >= geom ? TraceCategory::kLoopErrors : TraceCategory::kGeometryErrors;
}

TraceReport knowledge_trace(const ProgramPredictor& predictor,
                            const std::vector<Trajectory>& trajectories,
                            const LabelSchema& schema, std::size_t max_index) {
  TraceReport report;
  std::vector<IndexDistribution> dist(max_index);
  for (std::size_t i = 0; i < max_index; ++i) dist[i].index = i + 1;

  for (const auto& t : trajectories) {
    StudentTrace st{t.student_id, {}};
    for (std::size_t i = 0; i < t.submissions.size(); ++i) {
      const TraceCategory c = classify_submission(predictor(t.submissions[i]), schema);
      st.categories.push_back(c);
      if (i >= max_index) continue;
      ++dist[i].students;
      if (c == TraceCategory::kNoErrors) dist[i].no_errors += 1;
      if (c == TraceCategory::kLoopErrors) dist[i].loop_errors += 1;
      if (c == TraceCategory::kGeometryErrors) dist[i].geometry_errors += 1;
    }
    report.students.push_back(std::move(st));
  }
  for (auto& d : dist) {
    if (d.students == 0) continue;
    const double n = static_cast<double>(d.students);
    d.no_errors /= n;
    d.loop_errors /= n;
    d.geometry_errors /= n;
    report.per_index.push_back(d);
  }
  return report;
}

TraceReport knowledge_trace(const MultiLabelModel& model,
                            const std::vector<Trajectory>& trajectories,
                            const LabelSchema& schema, std::size_t max_index) {
  return knowledge_trace([&model](const Program& p) { return predict_program(model, p); },
                         trajectories, schema, max_index);
}

}  // namespace rubric
