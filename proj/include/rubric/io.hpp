#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rubric/classifier.hpp"
#include "rubric/derivation.hpp"
#include "rubric/es_tuner.hpp"
#include "rubric/evaluation.hpp"
#include "rubric/knowledge_trace.hpp"
#include "rubric/labels.hpp"
#include "rubric/program.hpp"
#include "rubric/zipf.hpp"

namespace rubric {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Record files are JSON Lines. The first line may be a header
//   {"schema": "rubric-sampling/<kind>", "version": 1, "labels": [...]}
// and every other line is one record.
enum class RecordKind { kCorpus, kPredictions, kFrequency, kTrajectories };

std::string record_schema_name(RecordKind kind);

struct CorpusRecord {
  std::string program;  // rendered token text
  std::optional<std::vector<std::string>> labels;
  std::optional<std::vector<HighlightSpan>> mask;
  std::optional<double> weight;
  std::optional<std::vector<double>> probs;  // predictions, schema order
  std::optional<std::string> source;         // "grammar" or "classifier"
};

struct CorpusFile {
  RecordKind kind = RecordKind::kCorpus;
  LabelSchema schema;  // empty when the file has no header labels
  std::vector<CorpusRecord> records;
};

// Masks are written with label names, so the schema is needed to resolve ids.
Json corpus_record_to_json(const CorpusRecord& r, const LabelSchema& schema);
CorpusRecord corpus_record_from_json(const Json& j, const LabelSchema& schema);

void write_corpus(std::ostream& out, const CorpusFile& file);
void write_corpus(const std::filesystem::path& path, const CorpusFile& file);
// Files without a header read as kind kCorpus with an empty schema. Every
// program must tokenize and every label name must be in the header schema
// when one is given. Errors carry the 1-based line number.
CorpusFile read_corpus(std::istream& in);
CorpusFile read_corpus(const std::filesystem::path& path);

// Labeled view: each record's label names become a 0/1 vector. Records with no
// labels field are all-negative.
std::vector<LabeledProgram> labeled_programs(const CorpusFile& file, const LabelSchema& schema);

// Frequency tables as records {"program", "weight"}. Corpus records without a
// weight count 1 each.
FrequencyTable frequency_from_corpus(const CorpusFile& file);
CorpusFile corpus_from_frequency(const FrequencyTable& table);

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts);

Json schema_to_json(const LabelSchema& schema);
LabelSchema schema_from_json(const Json& j);

Json model_to_json(const MultiLabelModel& model);
MultiLabelModel model_from_json(const Json& j);
void save_model(const std::filesystem::path& path, const MultiLabelModel& model);
// Throws Error{kSchemaMismatch} when the stored schema hash does not match
// the stored labels, or when `expected` is given and differs.
MultiLabelModel load_model(const std::filesystem::path& path,
                           const LabelSchema* expected = nullptr);

Json eval_report_to_json(const EvalReport& report, const LabelSchema& schema);
Json trace_report_to_json(const TraceReport& report);
Json tune_report_to_json(const TuneReport& report);

// Self-describing wrapper: {"schema": "rubric-sampling/<name>", "version": 1, ...body}.
Json with_header(const std::string& name, Json body);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rubric
