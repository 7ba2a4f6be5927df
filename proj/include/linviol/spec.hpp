/* spec.hpp -- inductively defined sequential specifications and derivability */
#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linviol/model.hpp"

namespace linviol {

// A rule's conclusion is a concatenation of atoms: Segment i stands for the
// i-th piece of the premise word, Literal m for one event m(x) on the witness
// value x, Star m for a possibly empty run of m(x) events.
struct ExprAtom {
  enum Type { Segment, Literal, Star };
  Type type;
  int seg = -1;
  std::string method;

  static ExprAtom segment(int i) { return {Segment, i, {}}; }
  static ExprAtom literal(std::string m) { return {Literal, -1, std::move(m)}; }
  static ExprAtom star(std::string m) { return {Star, -1, std::move(m)}; }
};

// Guard atoms constrain premise segments: Alphabet restricts a segment to a
// method set; Matched requires every event of the given method in the segment
// to have another event of the same value inside that segment.
struct GuardAtom {
  enum Type { Alphabet, Matched };
  Type type;
  int seg = 0;
  std::set<std::string> methods;  // Alphabet
  std::string method;             // Matched

  static GuardAtom alphabet(int i, std::set<std::string> ms) {
    GuardAtom g{Alphabet, i, std::move(ms), {}};
    return g;
  }
  static GuardAtom matched(std::string m, int i) {
    GuardAtom g{Matched, i, {}, std::move(m)};
    return g;
  }
};

struct Rule {
  std::string name;
  std::vector<ExprAtom> expr;
  std::vector<GuardAtom> guards;

  int num_segments() const;
  std::set<std::string> expr_methods() const;
};

// Rules are indexed from 0 and applied in non-decreasing index order starting
// from the empty word; the empty rule (empty expr) is index 0 by convention.
struct Specification {
  std::string name;
  std::vector<Rule> rules;
  std::set<std::string> methods;
  std::set<std::string> input_methods;    // methods whose value identifies the op
  std::set<std::string> argless_methods;  // ignored-parameter methods

  int rule_index(const std::string& rule_name) const;
  const Rule& rule(const std::string& rule_name) const;
};

// One way a word matches a rule in a single step. positions lists the word
// indices consumed by Literal/Star atoms; segments hold the remaining events
// in order, their concatenation is the premise of the step.
struct Match {
  int rule = -1;
  Value witness = kNoValue;
  std::vector<int> positions;
  std::vector<Word> segments;

  Word premise() const;
};

// All single-step matches of u against rule r of s, leftmost decompositions
// first. A decomposition is valid only if the guards hold on the segments and
// no segment contains any event on the witness value: the step introduces
// the witness fresh, so its events are exactly the expression's literals.
std::vector<Match> matches_rule(const Word& u, const Specification& s, int r);

// True iff u is derivable using rules 0..max_rule (inclusive) in
// non-decreasing index order. Memoized per specification.
bool member(const Word& u, const Specification& s, int max_rule);
bool member(const Word& u, const Specification& s);

struct DerivStep {
  int rule;
  Value witness;
};

// A derivation of u (steps in application order, first applied first), or
// nullopt if u is not derivable.
std::optional<std::vector<DerivStep>> derivation(const Word& u, const Specification& s);

// The rule any derivation of a nonempty derivable word with this event
// multiset must end with. Total on all words of the spec's alphabet.
int last_of(const Word& u, const Specification& s);
int last_of(const History& h, const Specification& s);

const Specification& queue_spec();
const Specification& stack_spec();
const Specification& register_spec();
const Specification& mutex_spec();

// Lookup by CLI name (queue, stack, register, mutex); throws on unknown.
const Specification& spec_by_name(const std::string& name);
const std::vector<const Specification*>& all_specs();

}  // namespace linviol
