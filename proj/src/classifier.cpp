#include "rubric/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "rubric/error.hpp"
#include "rubric/interpreter.hpp"
#include "rubric/sampler.hpp"

namespace rubric {

namespace {

constexpr double kMajorityEps = 1e-6;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ln(1 + e^z), stable for large |z|.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void check_example(const MultiLabelModel& model, const TrainExample& ex) {
  if (ex.features.dim != model.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dimension " +
                std::to_string(ex.features.dim) + " != model dimension " +
                std::to_string(model.dim));
  }
  if (ex.labels.size() != model.num_labels()) {
    throw Error(ErrorCode::kDimensionMismatch, "label count " +
                std::to_string(ex.labels.size()) + " != model label count " +
                std::to_string(model.num_labels()));
  }
}

}  // namespace

const char* feature_source_name(FeatureSource s) {
  return s == FeatureSource::kTokens ? "tokens" : "trace";
}

FeatureSource parse_feature_source(std::string_view name) {
  if (name == "tokens") return FeatureSource::kTokens;
  if (name == "trace") return FeatureSource::kTrace;
  throw Error(ErrorCode::kFormatError, "unknown feature source '" + std::string(name) + "'");
}

MultiLabelModel MultiLabelModel::zeros(std::size_t dim, std::size_t num_labels) {
  MultiLabelModel m;
  m.dim = dim;
  m.weights.assign(num_labels, std::vector<double>(dim, 0.0));
  m.bias.assign(num_labels, 0.0);
  return m;
}

double MultiLabelModel::score(std::size_t label, const FeatureVector& f) const {
  const auto& w = weights[label];
  double s = bias[label];
  for (const auto& [i, v] : f.entries) s += w[i] * v;
  return s;
}

LabelVector predict(const MultiLabelModel& model, const FeatureVector& f) {
  if (f.dim != model.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dimension " + std::to_string(f.dim) +
                " != model dimension " + std::to_string(model.dim));
  }
  std::vector<double> probs(model.num_labels());
  for (std::size_t j = 0; j < probs.size(); ++j) probs[j] = sigmoid(model.score(j, f));
  return LabelVector(std::move(probs));
}

FeatureVector model_features(const MultiLabelModel& model, const Program& program) {
  if (model.source == FeatureSource::kTrace) return featurize_trace(execute(program));
  return featurize(program, model.features);
}

LabelVector predict_program(const MultiLabelModel& model, const Program& program) {
  return predict(model, model_features(model, program));
}

double bce_loss(const MultiLabelModel& model, std::span<const TrainExample> data, double l2) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training corpus");
  double total = 0;
  for (const auto& ex : data) {
    check_example(model, ex);
    for (std::size_t j = 0; j < model.num_labels(); ++j) {
      const double s = model.score(j, ex.features);
      // -[y ln sigma(s) + (1-y) ln(1 - sigma(s))] = softplus(s) - y s
      total += softplus(s) - ex.labels[j] * s;
    }
  }
  double loss = total / static_cast<double>(data.size());
  if (l2 != 0) {
    double sq = 0;
    for (const auto& w : model.weights) {
      for (double v : w) sq += v * v;
    }
    loss += 0.5 * l2 * sq;
  }
  return loss;
}

ModelGradient bce_gradient(const MultiLabelModel& model, std::span<const TrainExample> data,
                           double l2) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training corpus");
  ModelGradient g;
  g.weights.assign(model.num_labels(), std::vector<double>(model.dim, 0.0));
  g.bias.assign(model.num_labels(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (const auto& ex : data) {
    check_example(model, ex);
    for (std::size_t j = 0; j < model.num_labels(); ++j) {
      const double err = (sigmoid(model.score(j, ex.features)) - ex.labels[j]) * inv_n;
      g.bias[j] += err;
      for (const auto& [i, v] : ex.features.entries) g.weights[j][i] += err * v;
    }
  }
  if (l2 != 0) {
    for (std::size_t j = 0; j < model.num_labels(); ++j) {
      for (std::size_t i = 0; i < model.dim; ++i) g.weights[j][i] += l2 * model.weights[j][i];
    }
  }
  return g;
}

MultiLabelModel train_multilabel(std::span<const TrainExample> data, const TrainConfig& cfg,
                                 const WarningSink& warn) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training corpus");
  if (cfg.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (!(cfg.learning_rate > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  const std::size_t dim = data.front().features.dim;
  const std::size_t num_labels = data.front().labels.size();
  MultiLabelModel model = MultiLabelModel::zeros(dim, num_labels);
  model.training = cfg;
  for (const auto& ex : data) check_example(model, ex);

  std::vector<bool> frozen(num_labels, false);
  for (std::size_t j = 0; j < num_labels; ++j) {
    const double first = data.front().labels[j];
    frozen[j] = std::all_of(data.begin(), data.end(),
                            [&](const TrainExample& ex) { return ex.labels[j] == first; });
    if (frozen[j]) {
      const std::string msg = "DegenerateLabels: label " + std::to_string(j) +
                              " is constant in the training corpus; weights stay at init";
      if (warn) {
        warn(msg);
      } else {
        std::cerr << "warning: " << msg << "\n";
      }
    }
  }

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  std::vector<std::vector<double>> m_w(num_labels, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> v_w = m_w;
  std::vector<double> m_b(num_labels, 0.0), v_b(num_labels, 0.0);
  std::vector<std::vector<double>> g_w(num_labels, std::vector<double>(dim, 0.0));
  std::vector<double> g_b(num_labels, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<bool> is_touched(dim, false);

  model.loss_history.push_back(bce_loss(model, data, cfg.l2));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      touched.clear();
      std::fill(g_b.begin(), g_b.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = data[order[k]];
        for (const auto& [i, v] : ex.features.entries) {
          if (!is_touched[i]) {
            is_touched[i] = true;
            touched.push_back(i);
          }
        }
        for (std::size_t j = 0; j < num_labels; ++j) {
          const double err = (sigmoid(model.score(j, ex.features)) - ex.labels[j]) * inv_b;
          g_b[j] += err;
          if (frozen[j]) continue;
          for (const auto& [i, v] : ex.features.entries) g_w[j][i] += err * v;
        }
      }
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto adam = [&](double& param, double& m, double& v, double g) {
        m = kBeta1 * m + (1 - kBeta1) * g;
        v = kBeta2 * v + (1 - kBeta2) * g * g;
        param -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + kAdamEps);
      };
      for (std::size_t j = 0; j < num_labels; ++j) {
        adam(model.bias[j], m_b[j], v_b[j], g_b[j]);
        if (frozen[j]) continue;
        auto& w = model.weights[j];
        auto& gw = g_w[j];
        // Dense step: coordinates outside the batch still move on momentum.
        for (std::size_t i = 0; i < dim; ++i) {
          adam(w[i], m_w[j][i], v_w[j][i], gw[i] + cfg.l2 * w[i]);
        }
        for (std::uint32_t i : touched) gw[i] = 0.0;
      }
      for (std::uint32_t i : touched) is_touched[i] = false;
    }
    model.loss_history.push_back(bce_loss(model, data, cfg.l2));
  }
  return model;
}

MultiLabelModel majority_baseline(std::span<const LabelVector> labels, std::size_t dim) {
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "majority baseline needs labels");
  const std::size_t num_labels = labels.front().size();
  MultiLabelModel model = MultiLabelModel::zeros(dim, num_labels);
  const double hi = std::log((1 - kMajorityEps) / kMajorityEps);
  for (std::size_t j = 0; j < num_labels; ++j) {
    std::size_t pos = 0;
    for (const auto& y : labels) {
      if (y.size() != num_labels) {
        throw Error(ErrorCode::kDimensionMismatch, "inconsistent label vector sizes");
      }
      if (y.positive(j)) ++pos;
    }
    model.bias[j] = 2 * pos > labels.size() ? hi : -hi;
  }
  return model;
}

}  // namespace rubric
