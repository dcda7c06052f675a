#include <algorithm>
#include <random>

#include "doctest.h"
#include "rubric/evaluation.hpp"
#include "rubric/knowledge_trace.hpp"
#include "test_util.hpp"

using namespace rubric;

namespace {

LabeledProgram lp(const char* text, std::vector<double> y) {
  return {Program::from_tokens({text}), LabelVector(std::move(y))};
}

// Head h; body b1 b2; tail t1 t2 t3 (head size 1).
struct Fixture {
  FrequencyTable table{std::vector<FrequencyEntry>{
      {"h", 10}, {"b1", 5}, {"b2", 4}, {"t1", 1}, {"t2", 1}, {"t3", 1}}};
  std::vector<LabeledProgram> corpus{lp("h", {1, 0}),  lp("b1", {1, 0}), lp("b2", {0, 0}),
                                     lp("t1", {1, 0}), lp("t2", {1, 0}), lp("t3", {0, 0})};
  std::vector<LabelVector> predicted{LabelVector(std::vector<double>{0.0, 0.0}), LabelVector(std::vector<double>{0.9, 0.1}),
                                     LabelVector(std::vector<double>{0.7, 0.0}), LabelVector(std::vector<double>{0.2, 0.0}),
                                     LabelVector(std::vector<double>{0.8, 0.3}), LabelVector(std::vector<double>{0.5, 0.5})};
  EvalOptions opts{0.5, {1, 3.0}};
};

}  // namespace

TEST_CASE("prf conventions") {
  CHECK(prf({0, 0, 0, 5}).f1 == 1.0);
  CHECK(prf({0, 0, 3, 0}).precision == 0.0);
  CHECK(prf({0, 2, 0, 0}).recall == 0.0);
  CHECK(prf({0, 2, 0, 0}).f1 == 0.0);
  const PRF r = prf({3, 1, 2, 9});
  CHECK(r.precision == 0.75);
  CHECK(r.recall == 0.6);
  CHECK(r.f1 == doctest::Approx(2 * 0.75 * 0.6 / 1.35).epsilon(1e-15));
}

TEST_CASE("hand built corpus") {
  const Fixture f;
  const EvalReport r = evaluate_predictions(f.corpus, f.predicted, f.table, f.opts);
  CHECK(r.head_excluded == 1);
  REQUIRE(r.body);
  REQUIRE(r.tail);
  CHECK(r.body->count == 2);
  CHECK(r.tail->count == 3);
  // body label 0: tp b1, fp b2.  tail label 0: fn t1, tp t2, tn t3 (0.5 is negative).
  CHECK(r.body->per_label[0].scores.f1 == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(r.tail->per_label[0].counts.tn == 1);
  CHECK(r.tail->per_label[0].scores.precision == 1.0);
  CHECK(r.tail->per_label[0].scores.recall == 0.5);
  CHECK(r.tail->per_label[0].scores.f1 == doctest::Approx(2.0 / 3).epsilon(1e-15));
  // Label 1 never fires on either side.
  CHECK(r.body->per_label[1].scores.f1 == 1.0);
  CHECK(r.body->macro_f1 == doctest::Approx(5.0 / 6).epsilon(1e-15));
  CHECK(r.body->micro.scores.f1 == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("perfect and all-positive predictors") {
  const Fixture f;
  std::vector<LabelVector> perfect, all_on;
  for (const auto& ex : f.corpus) {
    perfect.push_back(ex.labels);
    all_on.push_back(LabelVector(2, 1.0));
  }
  const EvalReport p = evaluate_predictions(f.corpus, perfect, f.table, f.opts);
  CHECK(p.body->micro.scores.f1 == 1.0);
  CHECK(p.tail->macro_f1 == 1.0);
  const EvalReport a = evaluate_predictions(f.corpus, all_on, f.table, f.opts);
  CHECK(a.tail->per_label[0].scores.recall == 1.0);
  CHECK(a.tail->per_label[0].scores.precision == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(a.tail->per_label[1].scores.f1 == 0.0);
}

TEST_CASE("order invariance") {
  const Fixture f;
  const EvalReport base = evaluate_predictions(f.corpus, f.predicted, f.table, f.opts);
  std::vector<std::size_t> perm{5, 3, 0, 4, 1, 2};
  std::vector<LabeledProgram> c;
  std::vector<LabelVector> p;
  for (std::size_t i : perm) {
    c.push_back(f.corpus[i]);
    p.push_back(f.predicted[i]);
  }
  const EvalReport r = evaluate_predictions(c, p, f.table, f.opts);
  CHECK(r.body->micro.scores.f1 == base.body->micro.scores.f1);
  CHECK(r.tail->macro_f1 == base.tail->macro_f1);
}

TEST_CASE("empty split is absent") {
  const Fixture f;
  std::vector<LabeledProgram> tail_only(f.corpus.begin() + 3, f.corpus.end());
  std::vector<LabelVector> preds(f.predicted.begin() + 3, f.predicted.end());
  const EvalReport r = evaluate_predictions(tail_only, preds, f.table, f.opts);
  CHECK_FALSE(r.body);
  CHECK(r.tail);
  CHECK(error_of([&] { evaluate_predictions(tail_only, f.predicted, f.table, f.opts); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("classification rule for submissions") {
  LabelSchema s;
  s.add("l1", LabelGroup::kLoop);
  s.add("l2", LabelGroup::kLoop);
  s.add("g1", LabelGroup::kGeometry);
  s.add("o1", LabelGroup::kOther);
  CHECK(classify_submission(LabelVector(std::vector<double>{0.4, 0.5, 0.9, 1.0}), s) == TraceCategory::kNoErrors);
  CHECK(classify_submission(LabelVector(std::vector<double>{0.9, 0.5, 0.3, 0.0}), s) == TraceCategory::kLoopErrors);
  CHECK(classify_submission(LabelVector(std::vector<double>{0.5, 0.5, 1.0, 0.0}), s) == TraceCategory::kLoopErrors);
  CHECK(classify_submission(LabelVector(std::vector<double>{0.6, 0.5, 1.0, 0.0}), s) == TraceCategory::kLoopErrors);
  CHECK(classify_submission(LabelVector(std::vector<double>{0.1, 0.0, 1.0, 0.0}), s) == TraceCategory::kGeometryErrors);
  CHECK(error_of([&] { classify_submission(LabelVector(std::vector<double>{0.1}), s); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("knowledge trace distributions") {
  LabelSchema s;
  s.add("l1", LabelGroup::kLoop);
  s.add("l2", LabelGroup::kLoop);
  s.add("g1", LabelGroup::kGeometry);
  std::mt19937_64 rng(3);
  std::vector<Trajectory> trajectories;
  for (int k = 0; k < 40; ++k) {
    Trajectory t{"s" + std::to_string(k), {}};
    const int n = 1 + static_cast<int>(rng() % 14);
    for (int i = 0; i < n; ++i) t.submissions.push_back(Program::from_tokens({std::to_string(rng() % 3)}));
    trajectories.push_back(t);
  }
  // Loop sum 1.4 against geometry 0.3 for token "1".
  const ProgramPredictor by_token = [](const Program& p) {
    const std::string& t = p[0].text;
    if (t == "0") return LabelVector(std::vector<double>{0.01, 0.01, 0.02});
    if (t == "1") return LabelVector(std::vector<double>{0.7, 0.7, 0.3});
    return LabelVector(std::vector<double>{0.2, 0.0, 1.0});
  };
  const TraceReport r = knowledge_trace(by_token, trajectories, s);
  CHECK(r.students.size() == 40);
  REQUIRE(r.per_index.size() == 10);
  for (const auto& d : r.per_index) {
    CHECK(d.no_errors + d.loop_errors + d.geometry_errors == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(r.per_index[0].students == 40);
  CHECK(r.students[0].categories.size() == trajectories[0].submissions.size());

  const ProgramPredictor quiet = [](const Program&) { return LabelVector(std::vector<double>{1e-9, 1e-9, 1e-9}); };
  for (const auto& d : knowledge_trace(quiet, trajectories, s).per_index) CHECK(d.no_errors == 1.0);
  const ProgramPredictor loopy = [](const Program&) { return LabelVector(std::vector<double>{0.7, 0.7, 0.3}); };
  for (const auto& d : knowledge_trace(loopy, trajectories, s).per_index) CHECK(d.loop_errors == 1.0);

  const TraceReport short_run =
      knowledge_trace(by_token, {Trajectory{"a", {Program::from_tokens({"0"})}}}, s);
  CHECK(short_run.per_index.size() == 1);
}
