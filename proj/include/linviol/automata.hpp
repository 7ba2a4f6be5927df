/* automata.hpp -- regular violation automata over renamed call/return actions */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linviol/model.hpp"
#include "linviol/spec.hpp"

namespace linviol {

// Automaton symbols match call/return actions after values are renamed into
// {1, 2, 3}: 1 and 2 are the significant roles of a branch, 3 is everything
// else. An empty method or value 0 is a wildcard in a pattern.
struct ASym {
  Kind kind = Kind::Call;
  std::string method;  // empty: any method
  Value value = 0;     // 0: any value

  bool matches(Kind k, const std::string& m, Value v) const {
    return kind == k && (method.empty() || method == m) && (value == 0 || value == v);
  }
};

ASym call_of(std::string method, Value v);
ASym ret_of(std::string method, Value v);

// One NFA state. On a symbol: all matching edges are taken; if none match
// and a kill pattern matches, the branch dies; otherwise the state loops.
struct AState {
  bool accepting = false;
  std::vector<std::pair<ASym, int>> edges;
  std::vector<ASym> kills;
};

struct Nfa {
  std::vector<AState> states;
  std::vector<int> initial;

  bool accepts(const std::vector<std::tuple<Kind, std::string, Value>>& word) const;
  std::vector<int> step(const std::vector<int>& current, Kind k, const std::string& m,
                        Value v) const;
  bool any_accepting(const std::vector<int>& set) const;
};

// How a branch binds history values to the renamed roles 1 and 2.
enum class CandidateShape {
  SingleValue,    // x -> 1, rest -> 2
  OrderedPair,    // (x, y) -> (1, 2), rest -> 3
  UnorderedPair,  // {x, y} -> {1, 2}, rest -> 3
  ObsSubset,      // argless op o -> 2, subset of values -> 1, rest -> 3
  PivotSubset,    // pivot value -> 2, subset of eligible values -> 1, rest -> 3
};

// Eligibility of values for the two roles of PivotSubset branches.
enum class ValueClass { Any, Inserted, Matched, MatchedExactPair, Unmatched };

struct Branch {
  std::string name;
  CandidateShape shape = CandidateShape::SingleValue;
  ValueClass pivot_class = ValueClass::Any;   // PivotSubset: role 2
  ValueClass subset_class = ValueClass::Any;  // PivotSubset/ObsSubset: role 1
  bool drop_extra_removals = false;  // drop non-minimal removal ops of role-1 values
  // Accepting a prefix already proves every extension non-linearizable, so the
  // branch may be judged on arbitrary reachable configurations (coverability).
  // Branches without this are meaningful on completed executions only.
  bool prefix_sound = true;
  Nfa nfa;
};

// The violation automaton of one rule: a union of branches, each run over
// the candidate renamings its shape prescribes.
struct ViolationAutomaton {
  std::string spec;
  std::string rule;
  std::vector<Branch> branches;
};

// Builds the (frozen) automaton for rule r of s. Rules whose class admits no
// violation get an automaton with no branches.
ViolationAutomaton build(const Specification& s, int r);

// All rule automata of s, in rule index order.
std::vector<ViolationAutomaton> build_all(const Specification& s);

// One NFA accepting the union over branches of all rules, read directly over
// actions with values in {1,2,3} (no renaming search). Sound for product-based
// verification: every accepted completed execution is non-linearizable. With
// prefix_sound_only set, only prefix-sound branches are included and every
// accepted word, completed or not, proves non-linearizability.
Nfa union_nfa(const Specification& s, bool prefix_sound_only = false);

struct MatchEvidence {
  std::string rule;
  std::string branch;
  std::map<Value, Value> renaming;       // history value -> role (1, 2, 3)
  std::vector<std::string> dropped_ops;  // ops removed by normalization
};

// Searches the candidate renamings of each branch of A against the completed
// execution e (differentiated; argless ops get ghost identities). Values are
// tried in first-occurrence order, subsets by size then order.
std::optional<MatchEvidence> match_execution(const ViolationAutomaton& a,
                                             const Execution& e);

// Tries all rules of s in index order.
std::optional<MatchEvidence> match_execution(const Specification& s, const Execution& e);

// Human-readable transition table (for the explain/emit commands).
std::string describe(const ViolationAutomaton& a);

}  // namespace linviol
