#include "rubric/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rubric {

double FeatureVector::at(std::size_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::size_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0.0;
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [i, v] : entries) out[i] = v;
  return out;
}

FeatureVector make_feature_vector(std::size_t dim,
                                  std::vector<std::pair<std::uint32_t, double>> raw) {
  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  FeatureVector fv;
  fv.dim = dim;
  for (const auto& e : raw) {
    if (!fv.entries.empty() && fv.entries.back().first == e.first) {
      fv.entries.back().second += e.second;
    } else {
      fv.entries.push_back(e);
    }
  }
  return fv;
}

std::uint64_t feature_hash(std::string_view key) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

FeatureVector featurize(const Program& program, const FeatureConfig& cfg) {
  std::vector<std::pair<std::uint32_t, double>> raw;
  auto add = [&](const std::string& key) {
    raw.emplace_back(static_cast<std::uint32_t>(feature_hash(key) % cfg.dim), 1.0);
  };
  const auto& toks = program.tokens();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    add("u\x1f" + toks[i].text);
    if (i + 1 < toks.size()) add("b\x1f" + toks[i].text + "\x1f" + toks[i + 1].text);
  }
  if (cfg.block_context) {
    struct Frame {
      std::string head;
      std::string last_child = "^";
    };
    std::vector<Frame> frames{Frame{"<root>"}};
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].kind == TokenKind::kOpen) {
        const std::string head =
            i + 1 < toks.size() && toks[i + 1].kind == TokenKind::kSymbol ? toks[i + 1].text : "<list>";
        Frame& parent = frames.back();
        add("c\x1f" + parent.head + "\x1f" + head);
        add("s\x1f" + parent.head + "\x1f" + parent.last_child + "\x1f" + head);
        parent.last_child = head;
        frames.push_back(Frame{head});
      } else if (toks[i].kind == TokenKind::kClose && frames.size() > 1) {
        frames.pop_back();
      }
    }
  }
  return make_feature_vector(cfg.dim, std::move(raw));
}

FeatureVector featurize_trace(const ExecutionTrace& trace) {
  double length = 0;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  double end_x = 0, end_y = 0;
  for (const auto& s : trace.segments) {
    length += s.length();
    min_x = std::min({min_x, s.x0, s.x1});
    max_x = std::max({max_x, s.x0, s.x1});
    min_y = std::min({min_y, s.y0, s.y1});
    max_y = std::max({max_y, s.y0, s.y1});
    end_x = s.x1;
    end_y = s.y1;
  }
  const double values[kTraceFeatureCount] = {
      static_cast<double>(trace.segments.size()),
      length,
      trace.total_abs_turn,
      std::hypot(end_x, end_y),
      max_x - min_x,
      max_y - min_y,
      trace.compiled ? 1.0 : 0.0,
  };
  FeatureVector fv;
  fv.dim = kTraceFeatureCount;
  for (std::uint32_t i = 0; i < kTraceFeatureCount; ++i) {
    if (values[i] != 0.0) fv.entries.emplace_back(i, values[i]);
  }
  return fv;
}

}  // namespace rubric
