#include "rubric/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rubric/error.hpp"

namespace rubric {

namespace {

constexpr double kProbTolerance = 1e-6;

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<std::string> split_terminal(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == '(' || c == ')') {
      flush();
      tokens.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return tokens;
}

// Cursor over one DSL line.
class LineScanner {
 public:
  LineScanner(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool consume(std::string_view lit) {
    skip_ws();
    if (s_.substr(pos_, lit.size()) == lit) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view lit) {
    if (!consume(lit)) fail("expected '" + std::string(lit) + "'");
  }
  std::string ident() {
    skip_ws();
    if (pos_ >= s_.size() || !is_ident_start(s_[pos_])) fail("expected identifier");
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  std::string quoted() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '"') fail("expected quoted string");
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out.push_back(s_[pos_++]);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }
  double number() {
    skip_ws();
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    double v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail("expected number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kSyntaxError, msg, line_);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
    } else if (line[i] == '"') {
      in_string = !in_string;
    } else if (line[i] == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

struct RawItem {
  bool terminal = false;
  std::string text;
};

struct RawRule {
  std::string lhs;
  std::vector<RawItem> items;
  double value = 0;
  bool weighted = false;
  std::optional<std::string> label;
  int line = 0;
};

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

class RubricBuilder {
 public:
  explicit RubricBuilder(const LabelSchema& schema) { g_.schema_ = schema; }

  RubricGrammar build(std::string_view text) {
    std::vector<RawRule> raw;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      ++line_no;
      parse_line(strip_comment(text.substr(pos, nl - pos)), line_no, raw);
      pos = nl + 1;
    }
    if (raw.empty()) throw Error(ErrorCode::kEmptyInput, "rubric defines no rules");
    resolve(raw);
    check_probabilities();
    check_acyclic();
    g_.finalize();
    return std::move(g_);
  }

 private:
  void parse_line(std::string_view line, int line_no, std::vector<RawRule>& raw) {
    LineScanner sc(line, line_no);
    if (sc.at_end()) return;
    if (sc.consume("%label")) {
      std::string name = sc.quoted();
      sc.expect(":");
      std::string group_name = sc.ident();
      LabelGroup group;
      try {
        group = parse_label_group(group_name);
      } catch (const Error&) {
        sc.fail("unknown label group '" + group_name + "'");
      }
      if (!sc.at_end()) sc.fail("trailing characters after label declaration");
      declare_label(name, group, line_no);
      return;
    }
    RawRule rule;
    rule.line = line_no;
    rule.lhs = sc.ident();
    sc.expect("->");
    while (sc.peek() != ':') {
      if (sc.at_end()) sc.fail("expected ':' before probability");
      if (sc.peek() == '"') {
        std::string t = sc.quoted();
        if (split_terminal(t).empty()) sc.fail("empty terminal string");
        rule.items.push_back(RawItem{true, std::move(t)});
      } else {
        rule.items.push_back(RawItem{false, sc.ident()});
      }
    }
    if (rule.items.empty()) sc.fail("rule has an empty right-hand side");
    sc.expect(":");
    rule.weighted = sc.consume("~");
    rule.value = sc.number();
    if (!std::isfinite(rule.value)) sc.fail("probability must be finite");
    if (rule.weighted && !(rule.value > 0)) sc.fail("weight must be positive");
    if (!rule.weighted && !(rule.value > 0 && rule.value <= 1)) {
      sc.fail("probability must be in (0, 1]");
    }
    if (sc.consume("@label")) {
      sc.expect("(");
      rule.label = sc.quoted();
      sc.expect(")");
    }
    if (!sc.at_end()) sc.fail("trailing characters after rule");
    raw.push_back(std::move(rule));
  }

  void declare_label(const std::string& name, LabelGroup group, int line_no) {
    if (auto id = g_.schema_.find(name)) {
      if (g_.schema_[static_cast<std::size_t>(*id)].group != group) {
        throw Error(ErrorCode::kSyntaxError,
                    "label '" + name + "' redeclared with a different group", line_no);
      }
      return;
    }
    g_.schema_.add(name, group);
  }

  int intern_run(const std::string& text) {
    auto tokens = split_terminal(text);
    auto it = run_index_.find(tokens);
    if (it != run_index_.end()) return it->second;
    const int idx = static_cast<int>(g_.terminal_runs_.size());
    run_index_.emplace(tokens, idx);
    g_.terminal_runs_.push_back(std::move(tokens));
    return idx;
  }

  void resolve(const std::vector<RawRule>& raw) {
    std::map<std::string, int> nt_index;
    for (const auto& r : raw) {
      if (nt_index.emplace(r.lhs, static_cast<int>(g_.nonterminals_.size())).second) {
        g_.nonterminals_.push_back(r.lhs);
      }
    }
    g_.start_ = 0;

    // Normalize `~` groups and reject mixed probability/weight groups.
    std::vector<double> group_weight(g_.nonterminals_.size(), 0.0);
    std::vector<int> group_mode(g_.nonterminals_.size(), -1);
    for (const auto& r : raw) {
      const int lhs = nt_index.at(r.lhs);
      const int mode = r.weighted ? 1 : 0;
      if (group_mode[lhs] == -1) group_mode[lhs] = mode;
      if (group_mode[lhs] != mode) {
        throw Error(ErrorCode::kSyntaxError,
                    "nonterminal '" + r.lhs + "' mixes probabilities and ~weights",
                    r.line);
      }
      group_weight[lhs] += r.value;
    }

    for (const auto& r : raw) {
      ProductionRule rule;
      rule.lhs = nt_index.at(r.lhs);
      rule.source_line = r.line;
      rule.prob = r.weighted ? r.value / group_weight[rule.lhs] : r.value;
      for (const auto& item : r.items) {
        if (item.terminal) {
          rule.rhs.push_back(RhsItem{RhsItem::Kind::kTerminal, intern_run(item.text)});
          continue;
        }
        auto it = nt_index.find(item.text);
        if (it == nt_index.end()) {
          throw Error(ErrorCode::kUnknownSymbol,
                      "undefined nonterminal '" + item.text + "' in rule for '" +
                          r.lhs + "'",
                      r.line);
        }
        rule.rhs.push_back(RhsItem{RhsItem::Kind::kNonterminal, it->second});
      }
      if (r.label) {
        auto id = g_.schema_.find(*r.label);
        if (!id) {
          throw Error(ErrorCode::kUnknownLabel, "unknown label '" + *r.label + "'",
                      r.line);
        }
        rule.label = *id;
      }
      g_.rules_.push_back(std::move(rule));
    }
  }

  void check_probabilities() const {
    std::vector<double> sums(g_.nonterminals_.size(), 0.0);
    for (const auto& r : g_.rules_) sums[r.lhs] += r.prob;
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (std::abs(sums[i] - 1.0) > kProbTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", sums[i]);
        throw Error(ErrorCode::kProbSumMismatch,
                    "probabilities of '" + g_.nonterminals_[i] + "' sum to " + buf);
      }
    }
  }

  void check_acyclic() const {
    const std::size_t n = g_.nonterminals_.size();
    std::vector<std::vector<int>> edges(n);
    for (const auto& r : g_.rules_) {
      for (const auto& item : r.rhs) {
        if (item.is_nonterminal()) edges[r.lhs].push_back(item.index);
      }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> color(n, 0);
    std::vector<int> path;
    auto dfs = [&](auto&& self, int v) -> void {
      color[v] = 1;
      path.push_back(v);
      for (int w : edges[v]) {
        if (color[w] == 1) {
          std::string desc;
          auto from = std::find(path.begin(), path.end(), w);
          for (auto it = from; it != path.end(); ++it) desc += g_.nonterminals_[*it] + " -> ";
          desc += g_.nonterminals_[w];
          throw Error(ErrorCode::kCycleDetected, "cycle: " + desc);
        }
        if (color[w] == 0) self(self, w);
      }
      path.pop_back();
      color[v] = 2;
    };
    for (std::size_t v = 0; v < n; ++v) {
      if (color[v] == 0) dfs(dfs, static_cast<int>(v));
    }
  }

  RubricGrammar g_;
  std::map<std::vector<std::string>, int> run_index_;
};

void RubricGrammar::finalize() {
  const std::size_t n = nonterminals_.size();
  rules_by_lhs_.assign(n, {});
  cumulative_.assign(n, {});
  logprobs_.clear();
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    rules_by_lhs_[rules_[i].lhs].push_back(static_cast<int>(i));
    logprobs_.push_back(std::log(rules_[i].prob));
  }
  for (std::size_t nt = 0; nt < n; ++nt) {
    double acc = 0;
    for (int r : rules_by_lhs_[nt]) {
      acc += rules_[r].prob;
      cumulative_[nt].push_back(acc);
    }
  }
  terminal_texts_.clear();
  for (const auto& run : terminal_runs_) {
    std::string text;
    for (const auto& t : run) {
      if (!text.empty()) text.push_back(' ');
      text += t;
    }
    terminal_texts_.push_back(std::move(text));
  }

  bottom_up_.clear();
  std::vector<bool> done(n, false);
  auto visit = [&](auto&& self, int v) -> void {
    done[v] = true;
    for (int r : rules_by_lhs_[v]) {
      for (const auto& item : rules_[r].rhs) {
        if (item.is_nonterminal() && !done[item.index]) self(self, item.index);
      }
    }
    bottom_up_.push_back(v);
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (!done[v]) visit(visit, static_cast<int>(v));
  }
}

std::optional<int> RubricGrammar::find_nonterminal(std::string_view name) const {
  for (std::size_t i = 0; i < nonterminals_.size(); ++i) {
    if (nonterminals_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

RubricGrammar RubricGrammar::with_probabilities(const std::vector<double>& probs) const {
  if (probs.size() != rules_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "probability vector has wrong length");
  }
  RubricGrammar g = *this;
  std::vector<double> sums(nonterminals_.size(), 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0 && probs[i] <= 1)) {
      throw Error(ErrorCode::kInvalidArgument, "rule probability outside (0, 1]");
    }
    g.rules_[i].prob = probs[i];
    sums[rules_[i].lhs] += probs[i];
  }
  for (std::size_t nt = 0; nt < sums.size(); ++nt) {
    if (std::abs(sums[nt] - 1.0) > kProbTolerance) {
      throw Error(ErrorCode::kProbSumMismatch,
                  "probabilities of '" + nonterminals_[nt] + "' sum to " +
                      format_prob(sums[nt]));
    }
  }
  g.finalize();
  return g;
}

std::string RubricGrammar::to_dsl() const {
  std::ostringstream out;
  for (const auto& label : schema_.labels()) {
    out << "%label " << quote(label.name) << " : " << label_group_name(label.group) << '\n';
  }
  if (!schema_.empty()) out << '\n';
  for (const auto& r : rules_) {
    out << nonterminals_[r.lhs] << " ->";
    for (const auto& item : r.rhs) {
      out << ' ';
      if (item.is_nonterminal()) {
        out << nonterminals_[item.index];
      } else {
        out << quote(terminal_texts_[item.index]);
      }
    }
    out << " : " << format_prob(r.prob);
    if (r.label) out << " @label(" << quote(schema_[*r.label].name) << ")";
    out << '\n';
  }
  return out.str();
}

RubricGrammar parse_rubric(std::string_view text, const LabelSchema& schema) {
  return RubricBuilder(schema).build(text);
}

RubricGrammar load_rubric(const std::string& path, const LabelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read rubric '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rubric(buf.str(), schema);
}

}  // namespace rubric
