#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rubric/features.hpp"
#include "rubric/labels.hpp"

namespace rubric {

// What a model's inputs are featurized from.
enum class FeatureSource { kTokens, kTrace };

const char* feature_source_name(FeatureSource s);
FeatureSource parse_feature_source(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;  // Adam step size
  double l2 = 0.0;              // on weights only, not biases
  std::uint64_t seed = 0;
};

// One independent logistic regression per label.
struct MultiLabelModel {
  std::size_t dim = 0;
  std::vector<std::vector<double>> weights;  // [label][feature]
  std::vector<double> bias;

  LabelSchema schema;  // may be empty for unnamed labels
  FeatureSource source = FeatureSource::kTokens;
  FeatureConfig features;
  TrainConfig training;
  std::vector<double> loss_history;  // full-corpus loss, index 0 before any step

  static MultiLabelModel zeros(std::size_t dim, std::size_t num_labels);
  std::size_t num_labels() const noexcept { return bias.size(); }
  double score(std::size_t label, const FeatureVector& f) const;
};

struct TrainExample {
  FeatureVector features;
  LabelVector labels;
};

LabelVector predict(const MultiLabelModel& model, const FeatureVector& f);

// Featurizes per the model's source and config, then predicts.
FeatureVector model_features(const MultiLabelModel& model, const Program& program);
LabelVector predict_program(const MultiLabelModel& model, const Program& program);

// Mean over examples of the summed per-label binary cross entropy, plus
// 0.5 * l2 * |W|^2.
double bce_loss(const MultiLabelModel& model, std::span<const TrainExample> data,
                double l2 = 0.0);

struct ModelGradient {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
};

ModelGradient bce_gradient(const MultiLabelModel& model, std::span<const TrainExample> data,
                           double l2 = 0.0);

using WarningSink = std::function<void(const std::string&)>;

// Mini-batch Adam from zero weights. Labels that are constant over the corpus
// keep their weights at zero (only the bias is fitted) and are reported to
// `warn`, or to stderr when no sink is given.
MultiLabelModel train_multilabel(std::span<const TrainExample> data, const TrainConfig& cfg,
                                 const WarningSink& warn = {});

// Predicts each label's majority bit as probability 1-1e-6 or 1e-6. An exact
// 50/50 split predicts negative.
MultiLabelModel majority_baseline(std::span<const LabelVector> labels, std::size_t dim);

}  // namespace rubric
