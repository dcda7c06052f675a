#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rubric {

enum class LabelGroup { kLoop, kGeometry, kOther };

std::string_view label_group_name(LabelGroup group);
// Throws Error{kFormatError} for anything but "loop", "geometry", "other".
LabelGroup parse_label_group(std::string_view name);

struct Label {
  int id = 0;
  std::string name;
  LabelGroup group = LabelGroup::kOther;

  bool operator==(const Label&) const = default;
};

// Ordered, densely numbered set of feedback labels.
class LabelSchema {
 public:
  LabelSchema() = default;

  // Appends a label and returns its id. Duplicate names are rejected.
  int add(std::string name, LabelGroup group);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const Label& operator[](std::size_t id) const { return labels_.at(id); }

  std::optional<int> find(std::string_view name) const;

  // Stable 64-bit FNV-1a digest over ids, names and groups, in hex.
  std::string hash() const;

  bool operator==(const LabelSchema&) const = default;

 private:
  std::vector<Label> labels_;
};

// One value per schema label. Ground truth uses exact 0/1; predictions carry
// probabilities in [0,1].
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::size_t size, double fill = 0.0) : values_(size, fill) {}
  explicit LabelVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, double value);
  const std::vector<double>& values() const noexcept { return values_; }

  // Positive iff value > threshold; 0.5 itself counts as negative.
  bool positive(std::size_t i, double threshold = 0.5) const {
    return values_[i] > threshold;
  }
  std::vector<std::string> positive_names(const LabelSchema& schema,
                                          double threshold = 0.5) const;

  bool operator==(const LabelVector&) const = default;

 private:
  std::vector<double> values_;
};

// Builds a 0/1 vector from label names; throws Error{kUnknownLabel}.
LabelVector label_vector_from_names(const LabelSchema& schema,
                                    const std::vector<std::string>& names);

}  // namespace rubric
