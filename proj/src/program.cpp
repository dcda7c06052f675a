#include "rubric/program.hpp"

#include <cctype>

#include "rubric/error.hpp"

namespace rubric {

Token Token::from_text(std::string text) {
  TokenKind kind = TokenKind::kSymbol;
  if (text == "(") kind = TokenKind::kOpen;
  if (text == ")") kind = TokenKind::kClose;
  return Token{kind, std::move(text)};
}

Program Program::from_tokens(std::vector<std::string> texts) {
  std::vector<Token> tokens;
  tokens.reserve(texts.size());
  for (auto& t : texts) tokens.push_back(Token::from_text(std::move(t)));
  return Program(std::move(tokens));
}

bool Program::balanced() const {
  long depth = 0;
  for (const auto& t : tokens_) {
    if (t.kind == TokenKind::kOpen) ++depth;
    if (t.kind == TokenKind::kClose && --depth < 0) return false;
  }
  return depth == 0;
}

bool Program::has_program_header() const {
  if (tokens_.size() < 6 || !balanced()) return false;
  return tokens_[0].kind == TokenKind::kOpen && tokens_[1].text == "Program" &&
         tokens_[2].kind == TokenKind::kOpen && tokens_[3].text == "WhenRun" &&
         tokens_[4].kind == TokenKind::kClose;
}

Program tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(Token{TokenKind::kSymbol, std::move(current)});
      current.clear();
    }
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == '(' || c == ')') {
      flush();
      tokens.push_back(Token::from_text(std::string(1, c)));
    } else {
      current.push_back(c);
    }
  }
  flush();

  if (tokens.empty()) throw Error(ErrorCode::kEmptyInput, "program text is empty");

  long depth = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::kOpen) ++depth;
    if (tokens[i].kind == TokenKind::kClose && --depth < 0) {
      throw Error(ErrorCode::kUnbalancedParens,
                  "unmatched ')' at token " + std::to_string(i));
    }
  }
  if (depth != 0) {
    throw Error(ErrorCode::kUnbalancedParens,
                std::to_string(depth) + " unclosed '('");
  }
  return Program(std::move(tokens));
}

std::string render(const Program& program) {
  std::string out;
  for (const auto& t : program.tokens()) {
    if (!out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

}  // namespace rubric
