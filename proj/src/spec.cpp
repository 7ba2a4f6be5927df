/* spec.cpp -- rule matching, derivability, built-in specifications */
#include "linviol/spec.hpp"

#include <algorithm>
#include <unordered_map>

namespace linviol {

int Rule::num_segments() const {
  int n = 0;
  for (const auto& a : expr)
    if (a.type == ExprAtom::Segment) n = std::max(n, a.seg + 1);
  return n;
}

std::set<std::string> Rule::expr_methods() const {
  std::set<std::string> ms;
  for (const auto& a : expr)
    if (a.type != ExprAtom::Segment) ms.insert(a.method);
  return ms;
}

int Specification::rule_index(const std::string& rule_name) const {
  for (int i = 0; i < static_cast<int>(rules.size()); ++i)
    if (rules[i].name == rule_name) return i;
  throw std::out_of_range("no such rule: " + rule_name);
}

const Rule& Specification::rule(const std::string& rule_name) const {
  return rules[rule_index(rule_name)];
}

Word Match::premise() const {
  Word w;
  for (const Word& s : segments) w.insert(w.end(), s.begin(), s.end());
  return w;
}

namespace {

bool guard_holds(const GuardAtom& g, const std::vector<Word>& segs) {
  const Word& w = segs[g.seg];
  if (g.type == GuardAtom::Alphabet) {
    for (const Event& ev : w)
      if (!g.methods.count(ev.method)) return false;
    return true;
  }
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    if (w[i].method != g.method) continue;
    bool companion = false;
    for (int j = 0; j < static_cast<int>(w.size()); ++j)
      if (j != i && w[j].value == w[i].value) companion = true;
    if (!companion) return false;
  }
  return true;
}

struct Decomposer {
  const Word& u;
  const Rule& rule;
  int rule_index;
  std::vector<Match>& out;

  bool witness_bound = false;
  Value witness = kNoValue;
  std::vector<int> positions;
  std::vector<Word> segments;

  void run() {
    segments.resize(rule.num_segments());
    step(0, 0);
  }

  void step(std::size_t atom, int pos) {
    const int n = static_cast<int>(u.size());
    if (atom == rule.expr.size()) {
      if (pos == n) finish();
      return;
    }
    const ExprAtom& a = rule.expr[atom];
    if (a.type == ExprAtom::Segment) {
      for (int end = pos; end <= n; ++end) {
        segments[a.seg] = Word(u.begin() + pos, u.begin() + end);
        step(atom + 1, end);
      }
      segments[a.seg].clear();
      return;
    }
    if (a.type == ExprAtom::Literal) {
      if (pos >= n || u[pos].method != a.method) return;
      if (witness_bound && u[pos].value != witness) return;
      bool bound_here = !witness_bound;
      witness_bound = true;
      Value saved = witness;
      witness = u[pos].value;
      positions.push_back(pos);
      step(atom + 1, pos + 1);
      positions.pop_back();
      witness = saved;
      if (bound_here) witness_bound = false;
      return;
    }
    // Star: a run of a.method events, all on the witness value.
    std::size_t before = positions.size();
    bool bound_here = false;
    Value saved = witness;
    int end = pos;
    step(atom + 1, pos);  // empty run
    while (end < n && u[end].method == a.method) {
      if (witness_bound && u[end].value != witness) break;
      if (!witness_bound) {
        witness_bound = true;
        bound_here = true;
        witness = u[end].value;
      } else if (bound_here && u[end].value != witness) {
        break;
      }
      positions.push_back(end);
      ++end;
      step(atom + 1, end);
    }
    positions.resize(before);
    witness = saved;
    if (bound_here) witness_bound = false;
  }

  void finish() {
    for (const GuardAtom& g : rule.guards)
      if (!guard_holds(g, segments)) return;
    if (witness_bound) {
      // The step introduces the witness value fresh: its premise, the
      // concatenated segments, may not carry any event on that value.
      for (const Word& s : segments)
        for (const Event& ev : s)
          if (ev.value == witness) return;
    }
    Match m;
    m.rule = rule_index;
    m.witness = witness_bound ? witness : kNoValue;
    m.positions = positions;
    m.segments = segments;
    out.push_back(std::move(m));
  }
};

std::string memo_key(const Word& u, const std::string& spec, int max_rule) {
  // Derivability is invariant under injective renaming, so the key uses
  // values numbered by first occurrence.
  std::map<Value, int> num;
  std::string k = spec + '/' + std::to_string(max_rule);
  for (const Event& ev : u) {
    auto it = num.emplace(ev.value, static_cast<int>(num.size())).first;
    k += '|';
    k += ev.method;
    k += ':';
    k += std::to_string(it->second);
  }
  return k;
}

std::unordered_map<std::string, bool>& memo() {
  static std::unordered_map<std::string, bool> m;
  if (m.size() > 4000000) m.clear();
  return m;
}

}  // namespace

std::vector<Match> matches_rule(const Word& u, const Specification& s, int r) {
  std::vector<Match> out;
  Decomposer d{u, s.rules[r], r, out, false, kNoValue, {}, {}};
  d.run();
  return out;
}

bool member(const Word& u, const Specification& s, int max_rule) {
  if (u.empty()) return true;
  std::string key = memo_key(u, s.name, max_rule);
  auto it = memo().find(key);
  if (it != memo().end()) return it->second;
  memo().emplace(key, false);  // cut cycles while computing
  bool ok = false;
  for (int r = 0; r <= max_rule && !ok; ++r) {
    for (const Match& m : matches_rule(u, s, r)) {
      Word p = m.premise();
      if (p.size() == u.size()) continue;  // no progress
      if (member(p, s, r)) {
        ok = true;
        break;
      }
    }
  }
  memo()[key] = ok;
  return ok;
}

bool member(const Word& u, const Specification& s) {
  return member(u, s, static_cast<int>(s.rules.size()) - 1);
}

namespace {

bool derive(const Word& u, const Specification& s, int max_rule,
            std::vector<DerivStep>& steps) {
  if (u.empty()) return true;
  if (!member(u, s, max_rule)) return false;
  for (int r = 0; r <= max_rule; ++r) {
    for (const Match& m : matches_rule(u, s, r)) {
      Word p = m.premise();
      if (p.size() == u.size()) continue;
      if (derive(p, s, r, steps)) {
        steps.push_back(DerivStep{r, m.witness});
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::optional<std::vector<DerivStep>> derivation(const Word& u, const Specification& s) {
  std::vector<DerivStep> steps;
  if (!derive(u, s, static_cast<int>(s.rules.size()) - 1, steps)) return std::nullopt;
  return steps;
}

namespace {

struct Counts {
  std::map<std::string, int> by_method;
  std::map<Value, int> pushes, pops;
  int total = 0;

  void add(const std::string& method, Value v) {
    ++by_method[method];
    ++total;
    if (method == "Push") ++pushes[v];
    if (method == "Pop") ++pops[v];
  }

  bool has(const char* m) const { return by_method.count(m) > 0; }

  bool unmatched_push() const {
    for (const auto& [v, n] : pushes) {
      auto it = pops.find(v);
      if (it == pops.end() || it->second < n) return true;
    }
    return false;
  }
};

int classify(const Counts& c, const Specification& s) {
  if (s.name == "queue") {
    if (c.has("DeqEmpty")) return s.rule_index("deq-empty");
    if (c.has("Deq")) return s.rule_index("enq-deq");
    if (c.total > 0) return s.rule_index("enq");
    return 0;
  }
  if (s.name == "stack") {
    if (c.has("PopEmpty")) return s.rule_index("pop-empty");
    if (c.unmatched_push()) return s.rule_index("push");
    if (c.has("Pop")) return s.rule_index("push-pop");
    return 0;
  }
  if (s.name == "register") {
    return c.total > 0 ? s.rule_index("write-read") : 0;
  }
  if (s.name == "mutex") {
    if (c.has("Unlock")) return s.rule_index("lock-unlock");
    if (c.total > 0) return s.rule_index("lock");
    return 0;
  }
  throw std::out_of_range("last_of: no classifier for spec " + s.name);
}

}  // namespace

int last_of(const Word& u, const Specification& s) {
  Counts c;
  for (const Event& ev : u) c.add(ev.method, ev.value);
  return classify(c, s);
}

int last_of(const History& h, const Specification& s) {
  Counts c;
  for (const Operation& o : h.ops()) c.add(o.method, o.value);
  return classify(c, s);
}

const Specification& queue_spec() {
  static const Specification s = [] {
    Specification q;
    q.name = "queue";
    q.methods = {"Enq", "Deq", "DeqEmpty"};
    q.input_methods = {"Enq"};
    q.argless_methods = {"DeqEmpty"};
    q.rules.push_back(Rule{"empty", {}, {}});
    q.rules.push_back(Rule{"enq",
                           {ExprAtom::segment(0), ExprAtom::literal("Enq")},
                           {GuardAtom::alphabet(0, {"Enq"})}});
    q.rules.push_back(Rule{"enq-deq",
                           {ExprAtom::literal("Enq"), ExprAtom::segment(0),
                            ExprAtom::literal("Deq"), ExprAtom::segment(1)},
                           {GuardAtom::alphabet(0, {"Enq"}),
                            GuardAtom::alphabet(1, {"Enq", "Deq"})}});
    q.rules.push_back(Rule{"deq-empty",
                           {ExprAtom::segment(0), ExprAtom::literal("DeqEmpty"),
                            ExprAtom::segment(1)},
                           {GuardAtom::matched("Enq", 0)}});
    return q;
  }();
  return s;
}

const Specification& stack_spec() {
  static const Specification s = [] {
    Specification t;
    t.name = "stack";
    t.methods = {"Push", "Pop", "PopEmpty"};
    t.input_methods = {"Push"};
    t.argless_methods = {"PopEmpty"};
    t.rules.push_back(Rule{"empty", {}, {}});
    t.rules.push_back(Rule{"push-pop",
                           {ExprAtom::literal("Push"), ExprAtom::segment(0),
                            ExprAtom::literal("Pop"), ExprAtom::segment(1)},
                           {GuardAtom::matched("Push", 0), GuardAtom::matched("Push", 1),
                            GuardAtom::alphabet(0, {"Push", "Pop"}),
                            GuardAtom::alphabet(1, {"Push", "Pop"})}});
    t.rules.push_back(Rule{"push",
                           {ExprAtom::segment(0), ExprAtom::literal("Push"),
                            ExprAtom::segment(1)},
                           {GuardAtom::matched("Push", 0),
                            GuardAtom::alphabet(0, {"Push", "Pop"}),
                            GuardAtom::alphabet(1, {"Push", "Pop"})}});
    t.rules.push_back(Rule{"pop-empty",
                           {ExprAtom::segment(0), ExprAtom::literal("PopEmpty"),
                            ExprAtom::segment(1)},
                           {GuardAtom::matched("Push", 0)}});
    return t;
  }();
  return s;
}

const Specification& register_spec() {
  static const Specification s = [] {
    Specification r;
    r.name = "register";
    r.methods = {"Write", "Read"};
    r.input_methods = {"Write"};
    r.rules.push_back(Rule{"empty", {}, {}});
    r.rules.push_back(Rule{"write-read",
                           {ExprAtom::literal("Write"), ExprAtom::star("Read"),
                            ExprAtom::segment(0)},
                           {}});
    return r;
  }();
  return s;
}

const Specification& mutex_spec() {
  static const Specification s = [] {
    Specification m;
    m.name = "mutex";
    m.methods = {"Lock", "Unlock"};
    m.input_methods = {"Lock"};
    m.rules.push_back(Rule{"empty", {}, {}});
    m.rules.push_back(Rule{"lock", {ExprAtom::literal("Lock")}, {}});
    m.rules.push_back(Rule{"lock-unlock",
                           {ExprAtom::literal("Lock"), ExprAtom::literal("Unlock"),
                            ExprAtom::segment(0)},
                           {}});
    return m;
  }();
  return s;
}

const Specification& spec_by_name(const std::string& name) {
  if (name == "queue") return queue_spec();
  if (name == "stack") return stack_spec();
  if (name == "register") return register_spec();
  if (name == "mutex") return mutex_spec();
  throw std::out_of_range("unknown spec: " + name);
}

const std::vector<const Specification*>& all_specs() {
  static const std::vector<const Specification*> v{&queue_spec(), &stack_spec(),
                                                   &register_spec(), &mutex_spec()};
  return v;
}

}  // namespace linviol
