#include "rubric/labels.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

#include "rubric/error.hpp"

namespace rubric {

std::string_view label_group_name(LabelGroup group) {
  switch (group) {
    case LabelGroup::kLoop: return "loop";
    case LabelGroup::kGeometry: return "geometry";
    case LabelGroup::kOther: return "other";
  }
  return "other";
}

LabelGroup parse_label_group(std::string_view name) {
  if (name == "loop") return LabelGroup::kLoop;
  if (name == "geometry") return LabelGroup::kGeometry;
  if (name == "other") return LabelGroup::kOther;
  throw Error(ErrorCode::kFormatError,
              "unknown label group '" + std::string(name) + "'");
}

int LabelSchema::add(std::string name, LabelGroup group) {
  if (name.empty()) throw Error(ErrorCode::kFormatError, "empty label name");
  if (find(name)) {
    throw Error(ErrorCode::kFormatError, "duplicate label '" + name + "'");
  }
  const int id = static_cast<int>(labels_.size());
  labels_.push_back(Label{id, std::move(name), group});
  return id;
}

std::optional<int> LabelSchema::find(std::string_view name) const {
  for (const auto& label : labels_) {
    if (label.name == name) return label.id;
  }
  return std::nullopt;
}

std::string LabelSchema::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  for (const auto& label : labels_) {
    mix(std::to_string(label.id));
    mix(label.name);
    mix(label_group_name(label.group));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LabelVector::LabelVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "label value outside [0,1]");
    }
  }
}

void LabelVector::set(std::size_t i, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "label value outside [0,1]");
  }
  values_.at(i) = value;
}

std::vector<std::string> LabelVector::positive_names(const LabelSchema& schema,
                                                     double threshold) const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (positive(i, threshold)) names.push_back(schema[i].name);
  }
  return names;
}

LabelVector label_vector_from_names(const LabelSchema& schema,
                                    const std::vector<std::string>& names) {
  LabelVector v(schema.size());
  for (const auto& name : names) {
    auto id = schema.find(name);
    if (!id) throw Error(ErrorCode::kUnknownLabel, "unknown label '" + name + "'");
    v.set(static_cast<std::size_t>(*id), 1.0);
  }
  return v;
}

}  // namespace rubric
