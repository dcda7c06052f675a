#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rubric/io.hpp"
#include "rubric/sampler.hpp"
#include "test_util.hpp"

using namespace rubric;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rubric_io_test_" + name);
}

}  // namespace

TEST_CASE("corpus round trip keeps programs, labels and masks") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  CorpusFile file;
  file.schema = g.schema();
  for (const auto& e : sample_corpus(g, 200, true, 6)) {
    CorpusRecord r;
    r.program = render(e.program);
    r.labels = e.labels.positive_names(g.schema());
    r.mask = e.mask.spans;
    file.records.push_back(r);
  }
  std::stringstream ss;
  write_corpus(ss, file);
  const CorpusFile back = read_corpus(ss);
  CHECK(back.kind == RecordKind::kCorpus);
  CHECK(back.schema == g.schema());
  REQUIRE(back.records.size() == file.records.size());
  for (std::size_t i = 0; i < file.records.size(); ++i) {
    CHECK(back.records[i].program == file.records[i].program);
    CHECK(back.records[i].labels == file.records[i].labels);
    CHECK(back.records[i].mask == file.records[i].mask);
  }
  const auto labeled = labeled_programs(back, g.schema());
  CHECK(labeled.size() == file.records.size());
}

TEST_CASE("headerless files and blank lines") {
  std::stringstream ss("{\"program\": \"( Program ( WhenRun ) )\"}\n\n{\"program\": \"(Program (WhenRun))\", \"weight\": 3}\n");
  const CorpusFile f = read_corpus(ss);
  CHECK(f.schema.empty());
  REQUIRE(f.records.size() == 2);
  CHECK(f.records[1].program == "( Program ( WhenRun ) )");
  const FrequencyTable t = frequency_from_corpus(f);
  CHECK(t.size() == 1);
  CHECK(t.weight("( Program ( WhenRun ) )") == 4);
}

TEST_CASE("errors carry line numbers") {
  std::stringstream bad_json(
      "{\"schema\": \"rubric-sampling/corpus\", \"version\": 1}\n"
      "{\"program\": \"( a )\"}\n"
      "{\"program\": \n");
  try {
    read_corpus(bad_json);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormatError);
    REQUIRE(e.line());
    CHECK(*e.line() == 3);
  }
  std::stringstream bad_program("{\"program\": \"( a\"}\n");
  try {
    read_corpus(bad_program);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnbalancedParens);
    CHECK(e.line() == std::optional<int>(1));
  }
  std::stringstream version("{\"schema\": \"rubric-sampling/corpus\", \"version\": 9}\n");
  CHECK(error_of([&] { read_corpus(version); }) == ErrorCode::kFormatError);
  std::stringstream unknown(
      "{\"schema\": \"rubric-sampling/corpus\", \"version\": 1, \"labels\": "
      "[{\"id\": 0, \"name\": \"a\", \"group\": \"loop\"}]}\n"
      "{\"program\": \"( x )\", \"labels\": [\"b\"]}\n");
  CHECK(error_of([&] { read_corpus(unknown); }) == ErrorCode::kUnknownLabel);
}

TEST_CASE("model round trip is bit exact") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const RubricGrammar g = load_rubric(rubric_path("p8.rubric"));
  MultiLabelModel m = MultiLabelModel::zeros(64, g.schema().size());
  m.schema = g.schema();
  m.features = {64, true};
  m.training.epochs = 3;
  m.loss_history = {1.0 / 3, 0.1};
  for (auto& w : m.weights) {
    for (std::size_t i = 0; i < w.size(); i += 3) w[i] = n(rng);
  }
  for (double& b : m.bias) b = n(rng);
  const auto path = temp_path("model.json");
  save_model(path, m);
  const MultiLabelModel back = load_model(path, &g.schema());
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.loss_history == m.loss_history);
  CHECK(back.features == m.features);
  CHECK(back.schema == m.schema);
  CHECK(back.training.epochs == 3);

  const RubricGrammar other = load_rubric(rubric_path("p1.rubric"));
  CHECK(error_of([&] { load_model(path, &other.schema()); }) == ErrorCode::kSchemaMismatch);

  Json j = model_to_json(m);
  j["schema_hash"] = "0000";
  CHECK(error_of([&] { model_from_json(j); }) == ErrorCode::kSchemaMismatch);
  std::filesystem::remove(path);
}

TEST_CASE("frequency and trajectory round trips") {
  const FrequencyTable t(std::vector<FrequencyEntry>{{"( a )", 3.5}, {"( b )", 1}, {"( c )", 10}});
  std::stringstream ss;
  write_corpus(ss, corpus_from_frequency(t));
  const CorpusFile f = read_corpus(ss);
  CHECK(f.kind == RecordKind::kFrequency);
  const FrequencyTable back = frequency_from_corpus(f);
  CHECK(back.ranked() == t.ranked());

  const std::vector<Trajectory> ts{{"s1", {tokenize(kTriangle), tokenize(kSingleMove)}},
                                   {"s2", {tokenize("( Program ( WhenRun ) )")}}};
  const auto path = temp_path("traj.jsonl");
  write_trajectories(path, ts);
  const auto read = read_trajectories(path);
  REQUIRE(read.size() == 2);
  CHECK(read[0].student_id == "s1");
  CHECK(read[0].submissions == ts[0].submissions);
  CHECK(read[1].submissions == ts[1].submissions);
  std::filesystem::remove(path);
}

TEST_CASE("report headers") {
  const Json j = with_header("eval-report", Json{{"x", 1}});
  CHECK(j["schema"] == "rubric-sampling/eval-report");
  CHECK(j["version"] == kFormatVersion);
  CHECK(j["x"] == 1);
}
