#include "rubric/evaluation.hpp"

#include "rubric/error.hpp"

namespace rubric {

namespace {

double ratio(std::size_t hits, std::size_t denom, std::size_t misses) {
  if (denom == 0) return misses == 0 ? 1.0 : 0.0;
  return static_cast<double>(hits) / static_cast<double>(denom);
}

SplitMetrics summarize(const std::vector<Confusion>& per_label, std::size_t count) {
  SplitMetrics m;
  m.count = count;
  double f1_sum = 0;
  for (const auto& c : per_label) {
    LabelMetrics lm{c, prf(c)};
    f1_sum += lm.scores.f1;
    m.micro.counts.tp += c.tp;
    m.micro.counts.fp += c.fp;
    m.micro.counts.fn += c.fn;
    m.micro.counts.tn += c.tn;
    m.per_label.push_back(lm);
  }
  m.micro.scores = prf(m.micro.counts);
  m.macro_f1 = per_label.empty() ? 0.0 : f1_sum / static_cast<double>(per_label.size());
  return m;
}

}  // namespace

PRF prf(const Confusion& c) {
  PRF r;
  r.precision = ratio(c.tp, c.tp + c.fp, c.fn);
  r.recall = ratio(c.tp, c.tp + c.fn, c.fp);
  const double s = r.precision + r.recall;
  r.f1 = s > 0 ? 2 * r.precision * r.recall / s : 0.0;
  return r;
}

EvalReport evaluate_predictions(const std::vector<LabeledProgram>& corpus,
                                const std::vector<LabelVector>& predicted,
                                const FrequencyTable& table, const EvalOptions& opts) {
  if (predicted.size() != corpus.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction count differs from corpus size");
  }
  const std::size_t num_labels = corpus.empty() ? 0 : corpus.front().labels.size();
  std::vector<Confusion> body(num_labels), tail(num_labels);
  std::size_t n_body = 0, n_tail = 0;
  EvalReport report;

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& truth = corpus[k].labels;
    const auto& pred = predicted[k];
    if (truth.size() != num_labels || pred.size() != num_labels) {
      throw Error(ErrorCode::kDimensionMismatch, "inconsistent label vector sizes");
    }
    const ZipfRegion region = zipf_region(table, render(corpus[k].program), opts.split);
    if (region == ZipfRegion::kHead) {
      ++report.head_excluded;
      continue;
    }
    auto& conf = region == ZipfRegion::kBody ? body : tail;
    ++(region == ZipfRegion::kBody ? n_body : n_tail);
    for (std::size_t j = 0; j < num_labels; ++j) {
      const bool y = truth.positive(j);
      const bool p = pred.positive(j, opts.threshold);
      if (y && p) {
        ++conf[j].tp;
      } else if (p) {
        ++conf[j].fp;
      } else if (y) {
        ++conf[j].fn;
      } else {
        ++conf[j].tn;
      }
    }
  }
  if (n_body > 0) report.body = summarize(body, n_body);
  if (n_tail > 0) report.tail = summarize(tail, n_tail);
  return report;
}

EvalReport evaluate(const MultiLabelModel& model, const std::vector<LabeledProgram>& corpus,
                    const FrequencyTable& table, const EvalOptions& opts) {
  std::vector<LabelVector> predicted;
  predicted.reserve(corpus.size());
  for (const auto& ex : corpus) predicted.push_back(predict_program(model, ex.program));
  return evaluate_predictions(corpus, predicted, table, opts);
}

}  // namespace rubric
