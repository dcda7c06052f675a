#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <optional>
#include <string>

#include "rubric/error.hpp"
#include "rubric/grammar.hpp"

inline constexpr const char* kSingleMove =
    "( Program ( WhenRun ) ( Move ( Forward ) ( Value ( Number ( 50 ) ) ) ) ( Repeat ( Value "
    "( Number ( 3 ) ) ) ( Body ( Turn ( Left ) ( Value ( Number ( 120 ) ) ) ) ) ) )";

inline constexpr const char* kTriangle =
    "( Program ( WhenRun ) ( Repeat ( Value ( Number ( 3 ) ) ) ( Body ( Move ( Forward ) "
    "( Value ( Number ( 50 ) ) ) ) ( Turn ( Left ) ( Value ( Number ( 120 ) ) ) ) ) ) )";

inline constexpr const char* kToyRubric =
    "S -> A A : 1.0\n"
    "A -> \"a\" : 0.9\n"
    "A -> \"b\" : 0.1\n";

// Two derivations yield "a a": S -> X "a" (label x) and S -> "a" Y (label y).
// The labeled pair also ties in probability to exercise the tie-break.
inline constexpr const char* kAmbiguousRubric =
    "%label \"x\" : loop\n"
    "%label \"y\" : geometry\n"
    "%label \"z\" : other\n"
    "S -> X \"a\" : 0.3 @label(\"x\")\n"
    "S -> \"a\" Y : 0.3 @label(\"y\")\n"
    "S -> X Y : 0.4\n"
    "X -> \"a\" : 0.5\n"
    "X -> \"a b\" : 0.3 @label(\"z\")\n"
    "X -> \"b\" : 0.2\n"
    "Y -> \"a\" : 0.5\n"
    "Y -> \"b a\" : 0.25\n"
    "Y -> \"b\" : 0.25 @label(\"z\")\n";

inline std::string rubric_path(const std::string& name) {
  return (std::filesystem::path(RUBRIC_DIR) / name).string();
}

inline std::string read_rubric_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
std::optional<rubric::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const rubric::Error& e) {
    return e.code();
  }
  return std::nullopt;
}
