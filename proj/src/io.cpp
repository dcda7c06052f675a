#include "rubric/io.hpp"

#include <fstream>
#include <sstream>

#include "rubric/error.hpp"

namespace rubric {

namespace {

constexpr const char* kSchemaPrefix = "rubric-sampling/";

RecordKind parse_record_kind(const std::string& schema, int line) {
  for (RecordKind k : {RecordKind::kCorpus, RecordKind::kPredictions, RecordKind::kFrequency,
                       RecordKind::kTrajectories}) {
    if (schema == record_schema_name(k)) return k;
  }
  throw Error(ErrorCode::kFormatError, "unknown record schema '" + schema + "'", line);
}

void check_version(const Json& j, std::optional<int> line) {
  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != kFormatVersion) {
    throw Error(ErrorCode::kFormatError,
                "unsupported format version (expected " + std::to_string(kFormatVersion) + ")",
                line);
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

Json prf_json(const LabelMetrics& m) {
  return Json{{"tp", m.counts.tp},
              {"fp", m.counts.fp},
              {"fn", m.counts.fn},
              {"tn", m.counts.tn},
              {"precision", m.scores.precision},
              {"recall", m.scores.recall},
              {"f1", m.scores.f1}};
}

Json split_json(const std::optional<SplitMetrics>& s, const LabelSchema& schema) {
  if (!s) return nullptr;
  Json per_label = Json::array();
  for (std::size_t j = 0; j < s->per_label.size(); ++j) {
    Json e = prf_json(s->per_label[j]);
    e["label"] = j < schema.size() ? schema[j].name : std::to_string(j);
    per_label.push_back(std::move(e));
  }
  return Json{{"count", s->count},
              {"micro", prf_json(s->micro)},
              {"macro_f1", s->macro_f1},
              {"per_label", std::move(per_label)}};
}

}  // namespace

std::string record_schema_name(RecordKind kind) {
  switch (kind) {
    case RecordKind::kCorpus: return std::string(kSchemaPrefix) + "corpus";
    case RecordKind::kPredictions: return std::string(kSchemaPrefix) + "predictions";
    case RecordKind::kFrequency: return std::string(kSchemaPrefix) + "frequency";
    case RecordKind::kTrajectories: return std::string(kSchemaPrefix) + "trajectories";
  }
  return kSchemaPrefix;
}

Json schema_to_json(const LabelSchema& schema) {
  Json out = Json::array();
  for (const auto& l : schema.labels()) {
    out.push_back(Json{{"id", l.id}, {"name", l.name},
                       {"group", std::string(label_group_name(l.group))}});
  }
  return out;
}

LabelSchema schema_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kFormatError, "label schema must be an array");
  LabelSchema schema;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
      throw Error(ErrorCode::kFormatError, "label entry needs a string 'name'");
    }
    const LabelGroup group = e.contains("group")
                                 ? parse_label_group(e["group"].get<std::string>())
                                 : LabelGroup::kOther;
    const int id = schema.add(e["name"].get<std::string>(), group);
    if (e.contains("id") && e["id"].get<int>() != id) {
      throw Error(ErrorCode::kFormatError, "label ids must be dense and in order");
    }
  }
  return schema;
}

Json corpus_record_to_json(const CorpusRecord& r, const LabelSchema& schema) {
  Json j{{"program", r.program}};
  if (r.labels) j["labels"] = *r.labels;
  if (r.mask) {
    Json spans = Json::array();
    for (const auto& s : *r.mask) {
      if (s.label < 0 || static_cast<std::size_t>(s.label) >= schema.size()) {
        throw Error(ErrorCode::kUnknownLabel, "mask label id " + std::to_string(s.label) +
                                                  " outside the schema");
      }
      spans.push_back(Json{{"start", s.token_start}, {"end", s.token_end},
                           {"label", schema[s.label].name}});
    }
    j["mask"] = std::move(spans);
  }
  if (r.weight) j["weight"] = *r.weight;
  if (r.probs) j["probs"] = *r.probs;
  if (r.source) j["source"] = *r.source;
  return j;
}

CorpusRecord corpus_record_from_json(const Json& j, const LabelSchema& schema) {
  if (!j.is_object() || !j.contains("program") || !j["program"].is_string()) {
    throw Error(ErrorCode::kFormatError, "record needs a string 'program'");
  }
  CorpusRecord r;
  const Program p = tokenize(j["program"].get<std::string>());
  r.program = render(p);
  if (j.contains("labels")) {
    r.labels = j["labels"].get<std::vector<std::string>>();
    if (!schema.empty()) {
      for (const auto& name : *r.labels) {
        if (!schema.find(name)) throw Error(ErrorCode::kUnknownLabel, "unknown label '" + name + "'");
      }
    }
  }
  if (j.contains("mask")) {
    std::vector<HighlightSpan> spans;
    for (const auto& s : j["mask"]) {
      HighlightSpan span;
      span.token_start = s.at("start").get<std::size_t>();
      span.token_end = s.at("end").get<std::size_t>();
      const auto name = s.at("label").get<std::string>();
      const auto id = schema.find(name);
      if (!id) throw Error(ErrorCode::kUnknownLabel, "unknown mask label '" + name + "'");
      span.label = *id;
      if (span.token_start >= span.token_end || span.token_end > p.size()) {
        throw Error(ErrorCode::kFormatError, "mask span out of bounds");
      }
      spans.push_back(span);
    }
    r.mask = std::move(spans);
  }
  if (j.contains("weight")) r.weight = j["weight"].get<double>();
  if (j.contains("probs")) {
    r.probs = j["probs"].get<std::vector<double>>();
    if (!schema.empty() && r.probs->size() != schema.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "probs length differs from schema size");
    }
  }
  if (j.contains("source")) r.source = j["source"].get<std::string>();
  return r;
}

void write_corpus(std::ostream& out, const CorpusFile& file) {
  Json header{{"schema", record_schema_name(file.kind)}, {"version", kFormatVersion}};
  if (!file.schema.empty()) header["labels"] = schema_to_json(file.schema);
  out << header.dump() << '\n';
  for (const auto& r : file.records) out << corpus_record_to_json(r, file.schema).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

void write_corpus(const std::filesystem::path& path, const CorpusFile& file) {
  auto out = open_out(path);
  write_corpus(out, file);
}

CorpusFile read_corpus(std::istream& in) {
  CorpusFile file;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kFormatError, std::string("invalid JSON: ") + e.what(), lineno);
    }
    try {
      if (first && j.is_object() && j.contains("schema")) {
        first = false;
        file.kind = parse_record_kind(j["schema"].get<std::string>(), lineno);
        check_version(j, lineno);
        if (j.contains("labels")) file.schema = schema_from_json(j["labels"]);
        continue;
      }
      first = false;
      file.records.push_back(corpus_record_from_json(j, file.schema));
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.code(), e.what(), lineno);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kFormatError, e.what(), lineno);
    }
  }
  return file;
}

CorpusFile read_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_corpus(in);
}

std::vector<LabeledProgram> labeled_programs(const CorpusFile& file, const LabelSchema& schema) {
  std::vector<LabeledProgram> out;
  out.reserve(file.records.size());
  for (const auto& r : file.records) {
    LabelVector y = r.labels ? label_vector_from_names(schema, *r.labels)
                             : LabelVector(schema.size(), 0.0);
    out.push_back(LabeledProgram{tokenize(r.program), std::move(y)});
  }
  return out;
}

FrequencyTable frequency_from_corpus(const CorpusFile& file) {
  std::vector<FrequencyEntry> entries;
  entries.reserve(file.records.size());
  for (const auto& r : file.records) entries.push_back(FrequencyEntry{r.program, r.weight.value_or(1.0)});
  return FrequencyTable(std::move(entries));
}

CorpusFile corpus_from_frequency(const FrequencyTable& table) {
  CorpusFile file;
  file.kind = RecordKind::kFrequency;
  for (const auto& e : table.ranked()) {
    CorpusRecord r;
    r.program = e.program;
    r.weight = e.weight;
    file.records.push_back(std::move(r));
  }
  return file;
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Trajectory> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      if (j.contains("schema")) {
        if (parse_record_kind(j["schema"].get<std::string>(), lineno) != RecordKind::kTrajectories) {
          throw Error(ErrorCode::kFormatError, "not a trajectories file", lineno);
        }
        check_version(j, lineno);
        continue;
      }
      Trajectory t;
      t.student_id = j.at("student").get<std::string>();
      for (const auto& s : j.at("submissions")) t.submissions.push_back(tokenize(s.get<std::string>()));
      out.push_back(std::move(t));
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.code(), e.what(), lineno);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kFormatError, e.what(), lineno);
    }
  }
  return out;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts) {
  auto out = open_out(path);
  out << Json{{"schema", record_schema_name(RecordKind::kTrajectories)},
              {"version", kFormatVersion}}.dump()
      << '\n';
  for (const auto& t : ts) {
    Json subs = Json::array();
    for (const auto& p : t.submissions) subs.push_back(render(p));
    out << Json{{"student", t.student_id}, {"submissions", std::move(subs)}}.dump() << '\n';
  }
}

Json model_to_json(const MultiLabelModel& model) {
  Json weights = Json::array();
  for (const auto& w : model.weights) {
    Json sparse = Json::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) sparse.push_back(Json::array({i, w[i]}));
    }
    weights.push_back(std::move(sparse));
  }
  return with_header(
      "model",
      Json{{"schema_hash", model.schema.hash()},
           {"labels", schema_to_json(model.schema)},
           {"dim", model.dim},
           {"num_labels", model.num_labels()},
           {"source", feature_source_name(model.source)},
           {"features", {{"dim", model.features.dim}, {"block_context", model.features.block_context}}},
           {"training",
            {{"epochs", model.training.epochs},
             {"batch_size", model.training.batch_size},
             {"learning_rate", model.training.learning_rate},
             {"l2", model.training.l2},
             {"seed", model.training.seed}}},
           {"loss_history", model.loss_history},
           {"bias", model.bias},
           {"weights", std::move(weights)}});
}

MultiLabelModel model_from_json(const Json& j) {
  try {
    if (j.at("schema").get<std::string>() != std::string(kSchemaPrefix) + "model") {
      throw Error(ErrorCode::kFormatError, "not a model file");
    }
    check_version(j, std::nullopt);
    MultiLabelModel m = MultiLabelModel::zeros(j.at("dim").get<std::size_t>(),
                                               j.at("num_labels").get<std::size_t>());
    m.schema = schema_from_json(j.at("labels"));
    if (m.schema.hash() != j.at("schema_hash").get<std::string>()) {
      throw Error(ErrorCode::kSchemaMismatch, "stored schema hash does not match stored labels");
    }
    if (!m.schema.empty() && m.schema.size() != m.num_labels()) {
      throw Error(ErrorCode::kSchemaMismatch, "label count differs from schema size");
    }
    m.source = parse_feature_source(j.at("source").get<std::string>());
    m.features.dim = j.at("features").at("dim").get<std::size_t>();
    m.features.block_context = j.at("features").at("block_context").get<bool>();
    const auto& t = j.at("training");
    m.training.epochs = t.at("epochs").get<std::size_t>();
    m.training.batch_size = t.at("batch_size").get<std::size_t>();
    m.training.learning_rate = t.at("learning_rate").get<double>();
    m.training.l2 = t.at("l2").get<double>();
    m.training.seed = t.at("seed").get<std::uint64_t>();
    m.loss_history = j.at("loss_history").get<std::vector<double>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    const auto& w = j.at("weights");
    if (m.bias.size() != m.num_labels() || w.size() != m.num_labels()) {
      throw Error(ErrorCode::kFormatError, "model parameter shapes are inconsistent");
    }
    for (std::size_t l = 0; l < w.size(); ++l) {
      for (const auto& e : w[l]) {
        const auto i = e.at(0).get<std::size_t>();
        if (i >= m.dim) throw Error(ErrorCode::kFormatError, "weight index out of range");
        m.weights[l][i] = e.at(1).get<double>();
      }
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const MultiLabelModel& model) {
  // Doubles are dumped in shortest round-trip form, so weights reload bit-exact.
  write_text_file(path, model_to_json(model).dump() + "\n");
}

MultiLabelModel load_model(const std::filesystem::path& path, const LabelSchema* expected) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("invalid JSON: ") + e.what());
  }
  MultiLabelModel m = model_from_json(j);
  if (expected && expected->hash() != m.schema.hash()) {
    throw Error(ErrorCode::kSchemaMismatch, "model label schema " + m.schema.hash() +
                                                " differs from expected " + expected->hash());
  }
  return m;
}

Json eval_report_to_json(const EvalReport& report, const LabelSchema& schema) {
  return with_header("eval-report", Json{{"head_excluded", report.head_excluded},
                                         {"body", split_json(report.body, schema)},
                                         {"tail", split_json(report.tail, schema)}});
}

Json trace_report_to_json(const TraceReport& report) {
  Json per_index = Json::array();
  for (const auto& d : report.per_index) {
    per_index.push_back(Json{{"index", d.index},
                             {"students", d.students},
                             {"no-errors", d.no_errors},
                             {"loop-errors", d.loop_errors},
                             {"geometry-errors", d.geometry_errors}});
  }
  Json students = Json::array();
  for (const auto& s : report.students) {
    Json cats = Json::array();
    for (auto c : s.categories) cats.push_back(std::string(trace_category_name(c)));
    students.push_back(Json{{"student", s.student_id}, {"categories", std::move(cats)}});
  }
  return with_header("trace-report",
                     Json{{"per_index", std::move(per_index)}, {"students", std::move(students)}});
}

Json tune_report_to_json(const TuneReport& report) {
  Json its = Json::array();
  for (const auto& r : report.iterations) {
    its.push_back(Json{{"iteration", r.iteration},
                       {"best_fitness", r.best_fitness},
                       {"mean_fitness", r.mean_fitness},
                       {"best_so_far", r.best_so_far}});
  }
  return with_header("tune-report", Json{{"iterations", std::move(its)},
                                         {"final_logits", report.final_logits.values()}});
}

Json with_header(const std::string& name, Json body) {
  Json out{{"schema", kSchemaPrefix + name}, {"version", kFormatVersion}};
  for (auto& [k, v] : body.items()) out[k] = std::move(v);
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path.string() + "' failed");
}

}  // namespace rubric
