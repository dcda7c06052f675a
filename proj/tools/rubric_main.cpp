// rubric: command-line front end for sampling, tuning, inference and analysis.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rubric/classifier.hpp"
#include "rubric/error.hpp"
#include "rubric/es_tuner.hpp"
#include "rubric/evaluation.hpp"
#include "rubric/inference.hpp"
#include "rubric/interpreter.hpp"
#include "rubric/io.hpp"
#include "rubric/knowledge_trace.hpp"
#include "rubric/sampler.hpp"
#include "rubric/zipf.hpp"

using namespace rubric;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

// "-" writes to stdout.
void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void write_json(const std::string& path, const Json& j) { write_output(path, j.dump(2) + "\n"); }

void write_corpus_to(const std::string& path, const CorpusFile& file) {
  if (path == "-") {
    write_corpus(std::cout, file);
  } else {
    write_corpus(std::filesystem::path(path), file);
  }
}

Program read_program_file(const std::string& path) { return tokenize(read_text_file(path)); }

void error_record(const std::string& code, const std::string& message,
                  std::optional<int> line = std::nullopt) {
  Json j{{"error", code}, {"message", message}};
  if (line) j["line"] = *line;
  std::cerr << j.dump() << "\n";
}

struct Options {
  std::uint64_t seed = 0;

  std::string rubric;
  std::string corpus;
  std::string output;
  std::string report;
  std::string model;
  std::size_t n = 0;
  bool unique = false;

  // tune
  std::string unlabeled;
  ESConfig es;
  std::string update = "elite";
  bool random_init = false;
  double init_scale = 1.0;

  // train
  TrainConfig train;
  FeatureConfig features;
  std::string feature_source = "tokens";

  // eval
  std::string pred, truth, freq;
  double threshold = 0.5;

  // stats
  std::string log_zipf_out;

  std::size_t max_index = 10;
  bool json = false;
};

int cmd_sample(const Options& o) {
  const RubricGrammar g = load_rubric(o.rubric);
  CorpusFile file;
  file.schema = g.schema();
  for (const auto& e : sample_corpus(g, o.n, o.unique, o.seed)) {
    CorpusRecord r;
    r.program = render(e.program);
    r.labels = e.labels.positive_names(g.schema());
    r.mask = e.mask.spans;
    file.records.push_back(std::move(r));
  }
  write_corpus_to(o.output, file);
  std::cerr << "sampled " << file.records.size() << " programs\n";
  return 0;
}

int cmd_tune(const Options& o) {
  const RubricGrammar g = load_rubric(o.rubric);
  const FrequencyTable unlabeled = frequency_from_corpus(read_corpus(std::filesystem::path(o.unlabeled)));
  ESConfig cfg = o.es;
  cfg.seed = o.seed;
  if (o.update == "elite") {
    cfg.update = EsUpdate::kEliteMean;
  } else if (o.update == "weighted") {
    cfg.update = EsUpdate::kFitnessWeighted;
  } else {
    throw rubric::Error(ErrorCode::kInvalidArgument, "--update must be 'elite' or 'weighted'");
  }
  const ThetaLogits init = o.random_init ? ThetaLogits::random(g, o.seed ^ 0x9e37ull, o.init_scale)
                                         : ThetaLogits::from_grammar(g);
  const TuneResult r = tune(g, unlabeled, cfg, init);
  write_output(o.output, r.grammar.to_dsl());
  if (!o.report.empty()) write_json(o.report, tune_report_to_json(r.report));
  if (!r.report.iterations.empty()) {
    std::cerr << "best fitness " << r.report.iterations.back().best_so_far << " after "
              << r.report.iterations.size() << " iterations\n";
  }
  return 0;
}

int cmd_infer(const Options& o) {
  const RubricGrammar g = load_rubric(o.rubric);
  std::optional<MultiLabelModel> model;
  if (!o.model.empty()) model = load_model(o.model, &g.schema());
  const ViterbiParser parser(g);
  const CorpusFile in = read_corpus(std::filesystem::path(o.corpus));
  CorpusFile out;
  out.kind = RecordKind::kPredictions;
  out.schema = g.schema();
  std::size_t by_grammar = 0, by_model = 0, missing = 0;
  for (const auto& rec : in.records) {
    const Program p = tokenize(rec.program);
    CorpusRecord r;
    r.program = rec.program;
    if (auto parsed = parser.parse(p)) {
      r.probs = parsed->labels.values();
      r.labels = parsed->labels.positive_names(g.schema());
      r.mask = parsed->mask.spans;
      r.source = "grammar";
      ++by_grammar;
    } else if (model) {
      const LabelVector y = predict_program(*model, p);
      r.probs = y.values();
      r.labels = y.positive_names(g.schema());
      r.source = "classifier";
      ++by_model;
    } else {
      r.source = "out-of-support";
      ++missing;
    }
    out.records.push_back(std::move(r));
  }
  write_corpus_to(o.output, out);
  std::cerr << "grammar " << by_grammar << ", classifier " << by_model << ", out of support "
            << missing << "\n";
  return 0;
}

int cmd_highlight(const Options& o) {
  const RubricGrammar g = load_rubric(o.rubric);
  const Program p = read_program_file(o.corpus);
  const auto mask = highlight(g, p);
  if (!mask) {
    error_record("OutOfSupport", "program is not derivable from the rubric");
    return kExitData;
  }
  if (o.json) {
    CorpusRecord r;
    r.program = render(p);
    r.mask = mask->spans;
    std::cout << corpus_record_to_json(r, g.schema()).dump() << "\n";
  } else {
    std::cout << annotate(g, p, *mask) << "\n";
  }
  return 0;
}

int cmd_train(const Options& o) {
  const CorpusFile file = read_corpus(std::filesystem::path(o.corpus));
  if (file.schema.empty()) {
    throw rubric::Error(ErrorCode::kFormatError, "training corpus needs a header with labels");
  }
  const FeatureSource source = parse_feature_source(o.feature_source);
  MultiLabelModel proto;
  proto.source = source;
  proto.features = o.features;
  std::vector<TrainExample> data;
  data.reserve(file.records.size());
  for (auto& ex : labeled_programs(file, file.schema)) {
    data.push_back(TrainExample{model_features(proto, ex.program), std::move(ex.labels)});
  }
  TrainConfig cfg = o.train;
  cfg.seed = o.seed;
  MultiLabelModel m = train_multilabel(data, cfg);
  m.schema = file.schema;
  m.source = source;
  m.features = source == FeatureSource::kTrace ? FeatureConfig{kTraceFeatureCount, false} : o.features;
  save_model(o.output, m);
  std::cerr << "trained on " << data.size() << " programs, loss " << m.loss_history.front()
            << " -> " << m.loss_history.back() << "\n";
  return 0;
}

int cmd_eval(const Options& o) {
  const CorpusFile truth = read_corpus(std::filesystem::path(o.truth));
  const CorpusFile pred = read_corpus(std::filesystem::path(o.pred));
  const LabelSchema& schema = truth.schema.empty() ? pred.schema : truth.schema;
  if (schema.empty()) throw rubric::Error(ErrorCode::kFormatError, "no label schema in truth or predictions");
  if (!pred.schema.empty() && !(pred.schema == schema)) {
    throw rubric::Error(ErrorCode::kSchemaMismatch, "prediction labels differ from truth labels");
  }
  const FrequencyTable table = frequency_from_corpus(read_corpus(std::filesystem::path(o.freq)));

  // Predictions are matched to truth by program text. A prediction record
  // without probs (out of support) predicts no labels.
  std::map<std::string, LabelVector> by_program;
  for (const auto& r : pred.records) {
    LabelVector y(schema.size(), 0.0);
    if (r.probs) {
      y = LabelVector(*r.probs);
    } else if (r.labels) {
      y = label_vector_from_names(schema, *r.labels);
    }
    if (y.size() != schema.size()) {
      throw rubric::Error(ErrorCode::kDimensionMismatch, "prediction length differs from schema size");
    }
    by_program.insert_or_assign(r.program, std::move(y));
  }
  const auto corpus = labeled_programs(truth, schema);
  std::vector<LabelVector> predicted;
  predicted.reserve(corpus.size());
  for (const auto& r : truth.records) {
    auto it = by_program.find(r.program);
    if (it == by_program.end()) {
      throw rubric::Error(ErrorCode::kFormatError, "no prediction for program '" + r.program + "'");
    }
    predicted.push_back(it->second);
  }
  EvalOptions opts;
  opts.threshold = o.threshold;
  const EvalReport report = evaluate_predictions(corpus, predicted, table, opts);
  write_json(o.output, eval_report_to_json(report, schema));
  auto line = [](const char* name, const std::optional<SplitMetrics>& s) {
    std::cerr << name;
    if (s) {
      std::cerr << " n=" << s->count << " micro-F1=" << s->micro.scores.f1
                << " macro-F1=" << s->macro_f1 << "\n";
    } else {
      std::cerr << " (empty)\n";
    }
  };
  line("body", report.body);
  line("tail", report.tail);
  return 0;
}

int cmd_stats(const Options& o) {
  const FrequencyTable t = frequency_from_corpus(read_corpus(std::filesystem::path(o.corpus)));
  const ZipfSplit split = split_zipf(t);
  Json body{{"unique_programs", t.size()},
            {"total_weight", t.total()},
            {"split", {{"head", split.head.size()},
                       {"body", split.body.size()},
                       {"tail", split.tail.size()}}}};
  if (t.size() >= 3) {
    const ZipfFit fit = fit_zipf(t);
    body["zipf"] = Json{{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
  } else {
    body["zipf"] = nullptr;
  }
  write_json(o.output.empty() ? "-" : o.output, with_header("stats-report", body));
  if (!o.log_zipf_out.empty()) write_corpus_to(o.log_zipf_out, corpus_from_frequency(log_zipf(t)));
  return 0;
}

int cmd_exec(const Options& o) {
  const ExecutionTrace trace = execute(read_program_file(o.corpus));
  Json segs = Json::array();
  for (const auto& s : trace.segments) segs.push_back({s.x0, s.y0, s.x1, s.y1});
  Json body{{"compiled", trace.compiled},
            {"segments", std::move(segs)},
            {"final_heading", trace.final_heading},
            {"total_abs_turn", trace.total_abs_turn}};
  if (!trace.compiled) body["error"] = trace.error;
  write_json(o.output.empty() ? "-" : o.output, with_header("execution-trace", body));
  return 0;
}

int cmd_trace(const Options& o) {
  const MultiLabelModel m = load_model(o.model);
  if (m.schema.empty()) throw rubric::Error(ErrorCode::kFormatError, "model has no label schema");
  const auto trajectories = read_trajectories(o.corpus);
  const TraceReport r = knowledge_trace(m, trajectories, m.schema, o.max_index);
  write_json(o.output, trace_report_to_json(r));
  for (const auto& d : r.per_index) {
    std::cerr << "index " << d.index << " (" << d.students << "): no-errors " << d.no_errors
              << " loop " << d.loop_errors << " geometry " << d.geometry_errors << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rubric sampling toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&o](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed"); };

  auto* sample = app.add_subcommand("sample", "Draw labeled programs from a rubric");
  sample->add_option("rubric", o.rubric)->required()->check(CLI::ExistingFile);
  sample->add_option("-n", o.n, "number of draws")->required();
  sample->add_flag("--unique", o.unique, "drop repeated programs");
  sample->add_option("-o", o.output, "output corpus")->required();
  add_seed(sample);

  auto* tune_cmd = app.add_subcommand("tune", "Fit rubric probabilities to an unlabeled corpus");
  tune_cmd->add_option("rubric", o.rubric)->required()->check(CLI::ExistingFile);
  tune_cmd->add_option("--unlabeled", o.unlabeled, "unlabeled corpus or frequency table")
      ->required()
      ->check(CLI::ExistingFile);
  tune_cmd->add_option("-o", o.output, "output rubric")->required();
  tune_cmd->add_option("--report", o.report, "tune report");
  tune_cmd->add_option("--population", o.es.population)->capture_default_str();
  tune_cmd->add_option("--elite", o.es.elite_k)->capture_default_str();
  tune_cmd->add_option("--sigma", o.es.sigma)->capture_default_str();
  tune_cmd->add_option("--iterations", o.es.iterations)->capture_default_str();
  tune_cmd->add_option("--sample-size", o.es.fitness_sample_size, "samples per fitness call")
      ->capture_default_str();
  tune_cmd->add_option("--update", o.update, "elite | weighted")->capture_default_str();
  tune_cmd->add_option("--learning-rate", o.es.learning_rate)->capture_default_str();
  tune_cmd->add_flag("--resample", o.es.resample_each_generation, "fresh sample stream per generation");
  tune_cmd->add_flag("--random-init", o.random_init, "start from N(0, scale^2) logits");
  tune_cmd->add_option("--init-scale", o.init_scale)->capture_default_str();
  add_seed(tune_cmd);

  auto* infer = app.add_subcommand("infer", "Predict labels, grammar first then classifier");
  infer->add_option("rubric", o.rubric)->required()->check(CLI::ExistingFile);
  infer->add_option("corpus", o.corpus)->required()->check(CLI::ExistingFile);
  infer->add_option("--model", o.model, "classifier for out-of-support programs")
      ->check(CLI::ExistingFile);
  infer->add_option("-o", o.output, "output predictions")->required();
  add_seed(infer);

  auto* hl = app.add_subcommand("highlight", "Annotate a program with its misconception spans");
  hl->add_option("rubric", o.rubric)->required()->check(CLI::ExistingFile);
  hl->add_option("program-file", o.corpus)->required()->check(CLI::ExistingFile);
  hl->add_flag("--json", o.json, "print the span record instead");
  add_seed(hl);

  auto* train = app.add_subcommand("train", "Train the multi-label classifier");
  train->add_option("corpus", o.corpus, "labeled corpus")->required()->check(CLI::ExistingFile);
  train->add_option("-o", o.output, "output model")->required();
  train->add_option("--epochs", o.train.epochs)->capture_default_str();
  train->add_option("--batch-size", o.train.batch_size)->capture_default_str();
  train->add_option("--learning-rate", o.train.learning_rate)->capture_default_str();
  train->add_option("--l2", o.train.l2)->capture_default_str();
  train->add_option("--dim", o.features.dim, "hashed feature dimension")->capture_default_str();
  train->add_flag("--block-context", o.features.block_context, "add block nesting features");
  train->add_option("--features", o.feature_source, "tokens | trace")->capture_default_str();
  add_seed(train);

  auto* eval = app.add_subcommand("eval", "Score predictions on the body and tail");
  eval->add_option("--pred", o.pred)->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", o.truth)->required()->check(CLI::ExistingFile);
  eval->add_option("--freq", o.freq, "frequency table or corpus")->required()->check(CLI::ExistingFile);
  eval->add_option("-o", o.output, "output report")->required();
  eval->add_option("--threshold", o.threshold)->capture_default_str();
  add_seed(eval);

  auto* stats = app.add_subcommand("stats", "Zipf fit and split sizes of a corpus");
  stats->add_option("corpus", o.corpus)->required()->check(CLI::ExistingFile);
  stats->add_option("-o", o.output, "report (default stdout)");
  stats->add_option("--log-zipf", o.log_zipf_out, "write the log-Zipf frequency table");
  add_seed(stats);

  auto* exec = app.add_subcommand("exec", "Run a program and dump its drawing");
  exec->add_option("program-file", o.corpus)->required()->check(CLI::ExistingFile);
  exec->add_option("-o", o.output, "output (default stdout)");
  add_seed(exec);

  auto* trace = app.add_subcommand("trace", "Knowledge trace over student trajectories");
  trace->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  trace->add_option("trajectories", o.corpus)->required()->check(CLI::ExistingFile);
  trace->add_option("-o", o.output, "output report")->required();
  trace->add_option("--max-index", o.max_index)->capture_default_str();
  add_seed(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("UsageError", e.what());
    return kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(o);
    if (*tune_cmd) return cmd_tune(o);
    if (*infer) return cmd_infer(o);
    if (*hl) return cmd_highlight(o);
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o);
    if (*stats) return cmd_stats(o);
    if (*exec) return cmd_exec(o);
    if (*trace) return cmd_trace(o);
  } catch (const rubric::Error& e) {
    error_record(std::string(error_code_name(e.code())), e.what(), e.line());
    switch (error_category(e.code())) {
      case ErrorCategory::kUsage: return kExitUsage;
      case ErrorCategory::kNumerical: return kExitNumerical;
      case ErrorCategory::kData: return kExitData;
    }
  } catch (const std::exception& e) {
    error_record("InternalError", e.what());
    return kExitData;
  }
  return kExitUsage;
}
