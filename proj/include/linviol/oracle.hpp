/* oracle.hpp -- exhaustive linearizability decision procedures (test reference) */
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "linviol/model.hpp"
#include "linviol/spec.hpp"

namespace linviol {

enum class Verdict { Yes, No, Inconclusive };

const char* to_string(Verdict v);

struct OracleResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Word> linearization;  // a derivable/matching extension when Yes

  bool yes() const { return verdict == Verdict::Yes; }
  bool no() const { return verdict == Verdict::No; }
};

// Decides whether some linear extension of h is derivable in s. Backtracks
// over hb-minimal ops in ascending op order; Inconclusive above max_ops.
OracleResult is_linearizable(const History& h, const Specification& s, int max_ops = 10);

// Decides whether some linear extension of h matches rule r of s in a single
// step; if witness is set, only matches on that witness value count.
OracleResult is_linearizable_wrt(const History& h, const Specification& s, int r,
                                 int max_ops = 10,
                                 std::optional<Value> witness = std::nullopt);

// Projections of h by all subsets of dom(h) crossed with all subsets of its
// argless (ghost-valued) ops. Plain value projections keep every argless op;
// separating them is what makes the per-projection checks complete.
std::vector<History> extended_projections(const History& h);

struct ExcluResult {
  bool holds = true;
  Verdict verdict = Verdict::Yes;          // No iff some projection fails
  std::optional<History> failing;          // a failing projection when No
  int failing_rule = -1;                   // its last rule
};

// Checks that each extended projection of h is linearizable w.r.t. the
// matching set of its last rule. Equivalent to full linearizability on
// differentiated histories.
ExcluResult check_exclu(const History& h, const Specification& s, int max_ops = 10);

// True iff some nonempty extended projection of h has last rule r and is not
// linearizable w.r.t. M(r). This is the per-rule violation class the
// monitor checks and the rule automata recognize.
OracleResult class_violation(const History& h, const Specification& s, int r,
                             int max_ops = 10);

// Enumerates linear extensions of h (as op index orders) until f returns
// true; returns whether f stopped the walk. Ops are picked among hb-minimal
// remaining ops in ascending index order, so the first extension is the
// lexicographically least.
bool for_each_extension(const History& h,
                        const std::function<bool(const std::vector<int>&)>& f);

}  // namespace linviol
