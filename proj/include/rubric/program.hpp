#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rubric {

enum class TokenKind { kOpen, kClose, kSymbol };

struct Token {
  TokenKind kind = TokenKind::kSymbol;
  std::string text;

  static Token from_text(std::string text);
  bool operator==(const Token&) const = default;
};

// A block program in parenthesized prefix form, e.g.
//   ( Program ( WhenRun ) ( Move ( Forward ) ( Value ( Number ( 50 ) ) ) ) )
// Tokens are immutable once constructed.
class Program {
 public:
  Program() = default;

  // Builds a program from already-split token texts. Parenthesis balance is
  // not checked here; tokenize() is the validating entry point.
  static Program from_tokens(std::vector<std::string> texts);

  const std::vector<Token>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }

  // True when parentheses balance and the program opens with
  // "( Program ( WhenRun ) ...".
  bool has_program_header() const;
  bool balanced() const;

  bool operator==(const Program&) const = default;

 private:
  explicit Program(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  friend Program tokenize(std::string_view text);

  std::vector<Token> tokens_;
};

// Ordered submissions of one student on one exercise.
struct Trajectory {
  std::string student_id;
  std::vector<Program> submissions;
};

// Splits on whitespace; every "(" and ")" is its own token even when glued to
// a symbol. Throws Error{kEmptyInput} or Error{kUnbalancedParens}.
Program tokenize(std::string_view text);

// Single-space join of the token texts.
std::string render(const Program& program);

}  // namespace rubric
