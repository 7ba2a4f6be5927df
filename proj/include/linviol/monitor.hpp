/* monitor.hpp -- polynomial violation checks for the built-in specifications */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linviol/model.hpp"
#include "linviol/spec.hpp"

namespace linviol {

// An evidence edge (a, b): operation b cannot take effect before operation a
// in any legal linearization, yet the surrounding constraints force a cycle.
struct Edge {
  int from = -1;
  int to = -1;
};

struct Violation {
  std::string rule;              // violated rule class
  std::vector<Value> witnesses;  // data values involved, in cycle/report order
  std::vector<Edge> evidence;    // op index pairs into the checked history
  std::string note;
};

struct MonitorResult {
  bool linearizable = true;
  std::optional<Violation> violation;
};

// Checks h against the violation class of rule r of s (some projection ends
// with r and is not linearizable w.r.t. r's matching set). Polynomial; exact
// for the built-in specifications. h must be completed and differentiated.
std::optional<Violation> check_rule(const History& h, const Specification& s, int r);

// Runs the per-rule checks in rule index order and reports the first hit.
MonitorResult check(const History& h, const Specification& s);

// Queue pair-witness viability: true iff value x can be the first enqueued
// value in a linearization of the projection of h to {x, y}. The pair checks
// reduce full projections to these two-value tests.
bool w_holds(const History& h, Value x, Value y);

}  // namespace linviol
