#include "rubric/interpreter.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string_view>

namespace rubric {

double Segment::length() const { return std::hypot(x1 - x0, y1 - y0); }

namespace {

// Parenthesized list; atoms are stored with an empty `items`.
struct Node {
  std::string atom;
  std::vector<Node> items;
  bool is_list = false;

  std::string_view head() const {
    if (!is_list || items.empty() || items[0].is_list) return {};
    return items[0].atom;
  }
};

// Reads one list starting at tokens[pos] == "(". Balanced input is assumed
// (tokenize guarantees it) but guarded anyway.
std::optional<Node> read_list(const std::vector<Token>& tokens, std::size_t& pos) {
  if (pos >= tokens.size() || tokens[pos].kind != TokenKind::kOpen) return std::nullopt;
  ++pos;
  Node node;
  node.is_list = true;
  while (pos < tokens.size() && tokens[pos].kind != TokenKind::kClose) {
    if (tokens[pos].kind == TokenKind::kOpen) {
      auto child = read_list(tokens, pos);
      if (!child) return std::nullopt;
      node.items.push_back(std::move(*child));
    } else {
      node.items.push_back(Node{tokens[pos].text, {}, false});
      ++pos;
    }
  }
  if (pos >= tokens.size()) return std::nullopt;
  ++pos;
  return node;
}

struct Failure {
  std::string message;
};

class Turtle {
 public:
  Turtle(ExecutionTrace& trace, const ExecutionLimits& limits)
      : trace_(trace), limits_(limits) {}

  // Returns a failure description or nullopt on success.
  std::optional<Failure> run_block(const Node& stmt) {
    const auto head = stmt.head();
    if (head == "Move") return run_move(stmt);
    if (head == "Turn") return run_turn(stmt);
    if (head == "Repeat") return run_repeat(stmt);
    return Failure{"unknown block '" + std::string(head) + "'"};
  }

  double heading() const { return heading_; }

 private:
  std::optional<Failure> step() {
    if (++steps_ > limits_.max_steps) return Failure{"step limit exceeded"};
    return std::nullopt;
  }

  std::optional<Failure> run_move(const Node& stmt) {
    if (stmt.items.size() != 3) return Failure{"Move expects a direction and a value"};
    const auto dir = stmt.items[1].head();
    double sign = 0;
    if (dir == "Forward") sign = 1;
    else if (dir == "Backward") sign = -1;
    else return Failure{"unknown move direction '" + std::string(dir) + "'"};
    double amount = 0;
    if (auto f = eval(stmt.items[2], amount)) return f;
    if (auto f = step()) return f;
    const double rad = heading_ * std::numbers::pi / 180.0;
    Segment seg{x_, y_, x_ + sign * amount * std::cos(rad),
                y_ + sign * amount * std::sin(rad)};
    x_ = seg.x1;
    y_ = seg.y1;
    trace_.segments.push_back(seg);
    return std::nullopt;
  }

  std::optional<Failure> run_turn(const Node& stmt) {
    if (stmt.items.size() != 3) return Failure{"Turn expects a direction and a value"};
    const auto dir = stmt.items[1].head();
    double sign = 0;
    if (dir == "Left") sign = 1;
    else if (dir == "Right") sign = -1;
    else return Failure{"unknown turn direction '" + std::string(dir) + "'"};
    double degrees = 0;
    if (auto f = eval(stmt.items[2], degrees)) return f;
    if (auto f = step()) return f;
    heading_ = std::fmod(heading_ + sign * degrees, 360.0);
    if (heading_ < 0) heading_ += 360.0;
    trace_.total_abs_turn += std::abs(degrees);
    return std::nullopt;
  }

  std::optional<Failure> run_repeat(const Node& stmt) {
    if (stmt.items.size() != 3 || stmt.items[2].head() != "Body") {
      return Failure{"Repeat expects a count and a Body"};
    }
    double count = 0;
    if (auto f = eval(stmt.items[1], count)) return f;
    const double rounded = std::round(count);
    if (!(count >= 0) || std::abs(count - rounded) > 1e-9) {
      return Failure{"Repeat count must be a non-negative integer"};
    }
    const auto& body = stmt.items[2].items;
    for (long i = 1; i <= static_cast<long>(rounded); ++i) {
      counters_.push_back(static_cast<double>(i));
      for (std::size_t k = 1; k < body.size(); ++k) {
        if (auto f = run_block(body[k])) {
          counters_.pop_back();
          return f;
        }
      }
      counters_.pop_back();
      // An empty body still has to terminate on huge counts.
      if (body.size() <= 1) {
        if (auto f = step()) return f;
      }
    }
    return std::nullopt;
  }

  // Value wrappers are optional around operands of Mult/Add.
  std::optional<Failure> eval(const Node& node, double& out) const {
    const auto head = node.head();
    if (head == "Value") {
      if (node.items.size() != 2) return Failure{"Value expects one expression"};
      return eval(node.items[1], out);
    }
    if (head == "Number") {
      if (node.items.size() != 2 || !node.items[1].is_list ||
          node.items[1].items.size() != 1 || node.items[1].items[0].is_list) {
        return Failure{"Number expects ( <literal> )"};
      }
      const std::string& lit = node.items[1].items[0].atom;
      double v = 0;
      auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
      if (ec != std::errc() || ptr != lit.data() + lit.size() || !std::isfinite(v)) {
        return Failure{"bad number literal '" + lit + "'"};
      }
      out = v;
      return std::nullopt;
    }
    if (head == "Counter") {
      if (counters_.empty()) return Failure{"Counter used outside of Repeat"};
      out = counters_.back();
      return std::nullopt;
    }
    if (head == "Mult" || head == "Add") {
      if (node.items.size() != 3) return Failure{std::string(head) + " expects two values"};
      double a = 0, b = 0;
      if (auto f = eval(node.items[1], a)) return f;
      if (auto f = eval(node.items[2], b)) return f;
      out = head == "Mult" ? a * b : a + b;
      return std::nullopt;
    }
    return Failure{"unknown expression '" + std::string(head) + "'"};
  }

  ExecutionTrace& trace_;
  const ExecutionLimits& limits_;
  double x_ = 0, y_ = 0;
  double heading_ = 90.0;
  std::size_t steps_ = 0;
  std::vector<double> counters_;
};

}  // namespace

ExecutionTrace execute(const Program& program, const ExecutionLimits& limits) {
  ExecutionTrace trace;
  auto fail = [&trace](std::string message) {
    trace.compiled = false;
    trace.error = std::move(message);
    return trace;
  };

  std::size_t pos = 0;
  auto root = read_list(program.tokens(), pos);
  if (!root || pos != program.size()) return fail("malformed program structure");
  if (root->head() != "Program") return fail("program must start with Program");
  if (root->items.size() < 2 || root->items[1].head() != "WhenRun") {
    return fail("missing WhenRun");
  }

  Turtle turtle(trace, limits);
  for (std::size_t i = 2; i < root->items.size(); ++i) {
    if (auto f = turtle.run_block(root->items[i])) {
      trace.final_heading = turtle.heading();
      return fail(f->message);
    }
  }
  trace.final_heading = turtle.heading();
  return trace;
}

}  // namespace rubric
