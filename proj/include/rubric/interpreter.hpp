#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rubric/program.hpp"

namespace rubric {

struct Segment {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double length() const;
  bool operator==(const Segment&) const = default;
};

// Output of running a program on the turtle canvas. When compiled is false the
// segments stop at the block that failed and `error` says why.
struct ExecutionTrace {
  std::vector<Segment> segments;
  double final_heading = 90.0;  // degrees in [0, 360)
  double total_abs_turn = 0.0;  // degrees, summed |turn|
  bool compiled = true;
  std::string error;

  bool operator==(const ExecutionTrace&) const = default;
};

struct ExecutionLimits {
  // Move/Turn executions before the run is abandoned as non-terminating.
  std::size_t max_steps = 1'000'000;
};

// Turtle starts at the origin facing 90 degrees (up). Left turns add to the
// heading, right turns subtract. Never throws for malformed programs.
ExecutionTrace execute(const Program& program, const ExecutionLimits& limits = {});

}  // namespace rubric
