/* Violation automata: construction, candidate search, product union. */
#include "linviol/automata.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace linviol {

ASym call_of(std::string method, Value v) { return ASym{Kind::Call, std::move(method), v}; }
ASym ret_of(std::string method, Value v) { return ASym{Kind::Ret, std::move(method), v}; }

std::vector<int> Nfa::step(const std::vector<int>& current, Kind k, const std::string& m,
                           Value v) const {
  std::set<int> next;
  for (int s : current) {
    const AState& st = states[s];
    bool moved = false;
    for (const auto& [sym, t] : st.edges) {
      if (sym.matches(k, m, v)) {
        next.insert(t);
        moved = true;
      }
    }
    if (moved) continue;
    bool dead = false;
    for (const auto& sym : st.kills) {
      if (sym.matches(k, m, v)) {
        dead = true;
        break;
      }
    }
    if (!dead) next.insert(s);
  }
  return {next.begin(), next.end()};
}

bool Nfa::any_accepting(const std::vector<int>& set) const {
  for (int s : set)
    if (states[s].accepting) return true;
  return false;
}

bool Nfa::accepts(const std::vector<std::tuple<Kind, std::string, Value>>& word) const {
  std::vector<int> cur = initial;
  for (const auto& [k, m, v] : word) {
    if (cur.empty()) return false;
    cur = step(cur, k, m, v);
  }
  return any_accepting(cur);
}

namespace {

struct MB {
  Nfa n;
  int add(bool acc = false) {
    n.states.push_back(AState{acc, {}, {}});
    return int(n.states.size()) - 1;
  }
  void edge(int s, ASym sym, int t) { n.states[s].edges.emplace_back(sym, t); }
  void kill(int s, ASym sym) { n.states[s].kills.push_back(sym); }
  Nfa done(std::vector<int> init = {0}) {
    n.initial = std::move(init);
    return n;
  }
};

bool sym_eq(const ASym& a, const ASym& b) {
  return a.kind == b.kind && a.method == b.method && a.value == b.value;
}

// The product tables are expanded over concrete symbols, so component
// patterns must not use wildcards.
void collect_syms(const Nfa& n, std::vector<ASym>& out) {
  auto push = [&](const ASym& s) {
    assert(!s.method.empty() && s.value != 0);
    for (const auto& t : out)
      if (sym_eq(s, t)) return;
    out.push_back(s);
  };
  for (const auto& st : n.states) {
    for (const auto& [sym, t] : st.edges) push(sym);
    for (const auto& sym : st.kills) push(sym);
  }
}

// Component step of one state on one concrete symbol: targets, or self-loop,
// or nothing (branch dies).
std::optional<std::vector<int>> step_one(const Nfa& n, int s, const ASym& sym) {
  const AState& st = n.states[s];
  std::vector<int> t;
  for (const auto& [e, to] : st.edges)
    if (sym_eq(e, sym)) t.push_back(to);
  if (!t.empty()) return t;
  for (const auto& k : st.kills)
    if (sym_eq(k, sym)) return std::nullopt;
  return std::vector<int>{s};
}

// Synchronous product: a run survives iff it survives in both components,
// accepts iff both accept.
Nfa product(const Nfa& a, const Nfa& b) {
  std::vector<ASym> syms;
  collect_syms(a, syms);
  collect_syms(b, syms);

  std::map<std::pair<int, int>, int> idx;
  std::vector<std::pair<int, int>> order;
  Nfa out;
  auto intern = [&](int sa, int sb) {
    auto key = std::make_pair(sa, sb);
    auto it = idx.find(key);
    if (it != idx.end()) return it->second;
    int id = int(out.states.size());
    idx[key] = id;
    out.states.push_back(AState{a.states[sa].accepting && b.states[sb].accepting, {}, {}});
    order.push_back(key);
    return id;
  };
  for (int sa : a.initial)
    for (int sb : b.initial) out.initial.push_back(intern(sa, sb));

  for (size_t i = 0; i < order.size(); i++) {
    auto [sa, sb] = order[i];
    for (const auto& sym : syms) {
      auto ta = step_one(a, sa, sym);
      auto tb = step_one(b, sb, sym);
      if (!ta || !tb) {
        out.states[i].kills.push_back(sym);
        continue;
      }
      bool pure_loop = ta->size() == 1 && (*ta)[0] == sa && tb->size() == 1 && (*tb)[0] == sb;
      if (pure_loop) continue;
      for (int na : *ta)
        for (int nb : *tb) {
          int tgt = intern(na, nb);  // may grow out.states; index afterwards
          out.states[i].edges.emplace_back(sym, tgt);
        }
    }
  }
  return out;
}

Nfa product(std::vector<Nfa> parts) {
  Nfa acc = std::move(parts.at(0));
  for (size_t i = 1; i < parts.size(); i++) acc = product(acc, parts[i]);
  return acc;
}

// counts occurrences of sym; accepts once count reaches k
Nfa count_to(const ASym& sym, int k) {
  MB m;
  for (int i = 0; i <= k; i++) m.add(i == k);
  for (int i = 0; i < k; i++) m.edge(i, sym, i + 1);
  return m.done();
}

// dies on the second occurrence of sym; otherwise neutral
Nfa cap_at_one(const ASym& sym) {
  MB m;
  int s0 = m.add(true);
  int s1 = m.add(true);
  m.edge(s0, sym, s1);
  m.kill(s1, sym);
  return m.done();
}

// accepts once any of syms has occurred
Nfa seen_any(const std::vector<ASym>& syms) {
  MB m;
  int s0 = m.add(false);
  int s1 = m.add(true);
  for (const auto& s : syms) m.edge(s0, s, s1);
  return m.done();
}

// accepts once one symbol from each group has occurred, groups in order
Nfa seq_chain(const std::vector<std::vector<ASym>>& groups) {
  MB m;
  int prev = m.add(false);
  for (size_t i = 0; i < groups.size(); i++) {
    int next = m.add(i + 1 == groups.size());
    for (const auto& s : groups[i]) m.edge(prev, s, next);
    prev = next;
  }
  return m.done();
}

Nfa seq2(const std::vector<ASym>& first, const std::vector<ASym>& second) {
  return seq_chain({first, second});
}

// neutral machine that forbids syms outright
Nfa forbid(const std::vector<ASym>& syms) {
  MB m;
  int s0 = m.add(true);
  for (const auto& s : syms) m.kill(s0, s);
  return m.done();
}

Branch branch(std::string name, CandidateShape shape, Nfa nfa) {
  Branch b;
  b.name = std::move(name);
  b.shape = shape;
  b.nfa = std::move(nfa);
  return b;
}

// ---- queue -----------------------------------------------------------------

// return of a removal that cannot be matched: observed before any insertion
// of the same value starts
Nfa unmatched_removal(const std::string& ins, const std::string& rem) {
  MB m;
  int s0 = m.add(false);
  int s1 = m.add(true);
  m.kill(s0, call_of(ins, 1));
  m.edge(s0, ret_of(rem, 1), s1);
  return m.done();
}

// two removals of one value backed by at most one insertion
Nfa duplicate_removal(const std::string& ins, const std::string& rem) {
  return product(count_to(ret_of(rem, 1), 2), cap_at_one(call_of(ins, 1)));
}

// insertion order 1 then 2 (all insertions of 2 start after the insertion of
// 1 returned), yet some removal of 2 returns before any removal of 1 starts
Nfa queue_fifo_pair() {
  MB e;
  int e0 = e.add(false), e1 = e.add(false), e2 = e.add(true);
  e.kill(e0, call_of("Enq", 2));
  e.edge(e0, ret_of("Enq", 1), e1);
  e.edge(e1, call_of("Enq", 2), e2);

  MB d;
  int d0 = d.add(false), d1 = d.add(true);
  d.kill(d0, call_of("Deq", 1));
  d.edge(d0, ret_of("Deq", 2), d1);

  return product(e.done({e0}), d.done({d0}));
}

// empty observation (role 2) covered by a chain of role-1 values: at every
// moment of the observation span, completed insertions of 1 outnumber
// started removals of 1.  Exactly one role-2 call may occur before
// acceptance, so the consumed return belongs to that same operation.
Nfa empty_obs_machine(const std::string& ins, const std::string& rem,
                      const std::string& obs) {
  MB m;
  int s0 = m.add(false), s1 = m.add(false), s2 = m.add(false), s3 = m.add(false),
      s4 = m.add(true);
  m.kill(s0, call_of(rem, 1));
  m.kill(s0, call_of(obs, 2));
  m.edge(s0, ret_of(ins, 1), s1);
  m.kill(s1, call_of(rem, 1));
  m.edge(s1, call_of(obs, 2), s2);
  m.kill(s2, call_of(rem, 1));
  m.kill(s2, call_of(obs, 2));
  m.edge(s2, ret_of(ins, 1), s3);
  m.edge(s2, ret_of(obs, 2), s4);
  m.kill(s3, call_of(obs, 2));
  m.edge(s3, call_of(rem, 1), s2);
  m.edge(s3, ret_of(obs, 2), s4);
  return m.done({s0});
}

// ---- stack -----------------------------------------------------------------

// pivot pair 2 pushed before every role-1 push, popped only after an
// alternating chain of role-1 completions and removals spanning its pop.
// No pop of either role may start before the pivot push returns.
Nfa stack_cover_machine() {
  MB m;
  int c0 = m.add(false), c1 = m.add(false), c2 = m.add(false), c3 = m.add(false),
      c4 = m.add(false), c5 = m.add(false), c6 = m.add(false), c7 = m.add(true);
  m.kill(c0, call_of("Push", 1));
  m.kill(c0, call_of("Pop", 1));
  m.kill(c0, call_of("Pop", 2));
  m.edge(c0, call_of("Push", 2), c1);

  m.kill(c1, call_of("Push", 1));
  m.kill(c1, call_of("Push", 2));
  m.kill(c1, call_of("Pop", 1));
  m.kill(c1, call_of("Pop", 2));
  m.edge(c1, ret_of("Push", 2), c2);

  m.kill(c2, call_of("Push", 2));
  m.kill(c2, call_of("Pop", 1));
  m.kill(c2, call_of("Pop", 2));
  m.edge(c2, ret_of("Push", 1), c3);

  m.kill(c3, call_of("Push", 2));
  m.kill(c3, call_of("Pop", 1));
  m.edge(c3, call_of("Pop", 2), c4);

  m.kill(c4, call_of("Push", 2));
  m.kill(c4, call_of("Pop", 1));
  m.edge(c4, ret_of("Push", 1), c5);
  m.edge(c4, ret_of("Pop", 2), c6);

  m.kill(c5, call_of("Push", 2));
  m.edge(c5, call_of("Pop", 1), c4);
  m.edge(c5, ret_of("Pop", 2), c6);

  m.edge(c6, call_of("Pop", 1), c7);
  return m.done({c0});
}

// pivot 2 is pushed but never popped; role-1 values alternate push
// completions and pop starts across its push span, with one more completed
// pop after.  Meaningful on completed executions only: a prefix reaching
// acceptance can still be extended with a pop of the pivot.
Nfa stack_push_machine() {
  MB m;
  int v0 = m.add(false), v1 = m.add(false), v2 = m.add(false), v3 = m.add(false),
      v4 = m.add(false), v5 = m.add(false), v6 = m.add(true);
  m.kill(v0, call_of("Pop", 1));
  m.kill(v0, call_of("Pop", 2));
  m.kill(v0, call_of("Push", 2));
  m.edge(v0, ret_of("Push", 1), v1);

  m.kill(v1, call_of("Pop", 1));
  m.kill(v1, call_of("Pop", 2));
  m.edge(v1, call_of("Push", 2), v2);

  m.kill(v2, call_of("Pop", 1));
  m.kill(v2, call_of("Pop", 2));
  m.kill(v2, call_of("Push", 2));
  m.edge(v2, ret_of("Push", 1), v3);
  m.edge(v2, ret_of("Push", 2), v4);

  m.kill(v3, ret_of("Push", 1));
  m.kill(v3, ret_of("Push", 2));
  m.kill(v3, call_of("Push", 2));
  m.kill(v3, call_of("Pop", 2));
  m.edge(v3, call_of("Pop", 1), v2);

  m.kill(v4, ret_of("Push", 1));
  m.kill(v4, call_of("Pop", 2));
  m.edge(v4, call_of("Pop", 1), v5);

  m.kill(v5, ret_of("Push", 1));
  m.kill(v5, call_of("Pop", 2));
  m.edge(v5, ret_of("Pop", 1), v6);

  m.kill(v6, ret_of("Push", 1));
  m.kill(v6, call_of("Pop", 2));
  return m.done({v0});
}

// sequential witness of a buried value: a completed role-1 push, then a
// completed pivot push, then a completed role-1 pop, each starting after the
// previous returned, with the pivot never popped before the pop returns
Nfa buried_push_machine() {
  MB m;
  int p0 = m.add(false), p1 = m.add(false), p2 = m.add(false), p3 = m.add(false),
      p4 = m.add(false), p5 = m.add(false), p6 = m.add(true);
  m.kill(p0, call_of("Pop", 1));
  m.kill(p0, call_of("Pop", 2));
  m.kill(p0, call_of("Push", 2));
  m.edge(p0, call_of("Push", 1), p1);

  m.kill(p1, call_of("Push", 1));
  m.kill(p1, call_of("Push", 2));
  m.kill(p1, call_of("Pop", 1));
  m.kill(p1, call_of("Pop", 2));
  m.edge(p1, ret_of("Push", 1), p2);

  m.kill(p2, call_of("Push", 1));
  m.kill(p2, call_of("Pop", 1));
  m.kill(p2, call_of("Pop", 2));
  m.edge(p2, call_of("Push", 2), p3);

  m.kill(p3, call_of("Push", 1));
  m.kill(p3, call_of("Push", 2));
  m.kill(p3, call_of("Pop", 1));
  m.kill(p3, call_of("Pop", 2));
  m.edge(p3, ret_of("Push", 2), p4);

  m.kill(p4, call_of("Push", 1));
  m.kill(p4, call_of("Pop", 2));
  m.edge(p4, call_of("Pop", 1), p5);

  m.kill(p5, call_of("Push", 1));
  m.kill(p5, call_of("Pop", 2));
  m.edge(p5, ret_of("Pop", 1), p6);
  return m.done({p0});
}

// ---- register / mutex ------------------------------------------------------

// cross-ordered operation pair: some value-2 operation returns before a
// value-1 operation starts, and some value-1 operation returns before a
// value-2 operation starts.  Meaningful on completed executions only: a
// pending read can still be satisfied by a write in the extension.
Nfa register_pair() {
  std::vector<ASym> r2 = {ret_of("Write", 2), ret_of("Read", 2)};
  std::vector<ASym> c1 = {call_of("Write", 1), call_of("Read", 1)};
  std::vector<ASym> r1 = {ret_of("Write", 1), ret_of("Read", 1)};
  std::vector<ASym> c2 = {call_of("Write", 2), call_of("Read", 2)};
  return product({seq2(r2, c1), seq2(r1, c2), cap_at_one(call_of("Write", 1)),
                  cap_at_one(call_of("Write", 2))});
}

// sequential witness of a stale read: the only write of 1 completes, then
// the only write of 2 completes, then a read of 1 called after that returns
Nfa stale_read_machine() {
  MB m;
  int w0 = m.add(false), w1 = m.add(false), w2 = m.add(false), w3 = m.add(false),
      w4 = m.add(false), w5 = m.add(false), w6 = m.add(true);
  m.kill(w0, call_of("Read", 1));
  m.kill(w0, call_of("Write", 2));
  m.edge(w0, call_of("Write", 1), w1);

  m.kill(w1, call_of("Read", 1));
  m.kill(w1, call_of("Write", 1));
  m.kill(w1, call_of("Write", 2));
  m.edge(w1, ret_of("Write", 1), w2);

  m.kill(w2, call_of("Read", 1));
  m.kill(w2, call_of("Write", 1));
  m.edge(w2, call_of("Write", 2), w3);

  m.kill(w3, call_of("Read", 1));
  m.kill(w3, call_of("Write", 1));
  m.kill(w3, call_of("Write", 2));
  m.edge(w3, ret_of("Write", 2), w4);

  m.kill(w4, call_of("Write", 1));
  m.kill(w4, call_of("Write", 2));
  m.edge(w4, call_of("Read", 1), w5);

  m.kill(w5, call_of("Write", 1));
  m.kill(w5, call_of("Write", 2));
  m.edge(w5, ret_of("Read", 1), w6);
  return m.done({w0});
}

// values 1 and 2 pin completed operations across each other's spans; with at
// most one operation per kind and value, the pinned linearization points
// force the two critical sections to overlap
Nfa mutex_pair() {
  std::vector<ASym> r1 = {ret_of("Lock", 1), ret_of("Unlock", 1)};
  std::vector<ASym> c2 = {call_of("Lock", 2), call_of("Unlock", 2)};
  std::vector<ASym> r2 = {ret_of("Lock", 2), ret_of("Unlock", 2)};
  std::vector<ASym> c1 = {call_of("Lock", 1), call_of("Unlock", 1)};
  return product({seq_chain({r1, c2, r2}), seq_chain({r2, c1, r1}),
                  seen_any({call_of("Unlock", 1), call_of("Unlock", 2)}),
                  cap_at_one(call_of("Lock", 1)), cap_at_one(call_of("Unlock", 1)),
                  cap_at_one(call_of("Lock", 2)), cap_at_one(call_of("Unlock", 2))});
}

// value 1 holds the lock forever (never unlocked) while value 2, which does
// unlock somewhere, completes a whole operation after a lock of 1 completed
Nfa mutex_starved_pair() {
  MB m;
  int x0 = m.add(false), x1 = m.add(false), xa = m.add(false), xb = m.add(false),
      x3 = m.add(true);
  m.edge(x0, ret_of("Lock", 1), x1);
  m.edge(x1, call_of("Lock", 2), xa);
  m.edge(x1, call_of("Unlock", 2), xb);
  m.edge(xa, ret_of("Lock", 2), x3);
  m.edge(xb, ret_of("Unlock", 2), x3);
  return product({m.done({x0}), seen_any({call_of("Unlock", 2)}),
                  forbid({call_of("Unlock", 1)}), cap_at_one(call_of("Lock", 2)),
                  cap_at_one(call_of("Unlock", 2))});
}

Nfa mutex_two_lockonly() {
  return product({seen_any({ret_of("Lock", 1)}), seen_any({ret_of("Lock", 2)}),
                  forbid({call_of("Unlock", 1), call_of("Unlock", 2)})});
}

}  // namespace

ViolationAutomaton build(const Specification& s, int r) {
  const Rule& rule = s.rules.at(r);
  ViolationAutomaton a;
  a.spec = s.name;
  a.rule = rule.name;

  auto single = [](std::string n, Nfa m) {
    return branch(std::move(n), CandidateShape::SingleValue, std::move(m));
  };

  if (s.name == "queue" && rule.name == "enq-deq") {
    a.branches.push_back(single("deq-unmatched", unmatched_removal("Enq", "Deq")));
    a.branches.push_back(single("deq-duplicate", duplicate_removal("Enq", "Deq")));
    a.branches.push_back(
        branch("fifo-order", CandidateShape::OrderedPair, queue_fifo_pair()));
  } else if (s.name == "queue" && rule.name == "deq-empty") {
    Branch b = branch("covered-empty", CandidateShape::ObsSubset,
                      empty_obs_machine("Enq", "Deq", "DeqEmpty"));
    b.subset_class = ValueClass::Inserted;
    b.drop_extra_removals = true;
    a.branches.push_back(std::move(b));
  } else if (s.name == "stack" && rule.name == "push-pop") {
    a.branches.push_back(single("pop-unmatched", unmatched_removal("Push", "Pop")));
    a.branches.push_back(single("pop-duplicate", duplicate_removal("Push", "Pop")));
    Branch b = branch("lifo-cover", CandidateShape::PivotSubset, stack_cover_machine());
    b.pivot_class = ValueClass::MatchedExactPair;
    b.subset_class = ValueClass::Matched;
    b.drop_extra_removals = true;
    a.branches.push_back(std::move(b));
  } else if (s.name == "stack" && rule.name == "push") {
    Branch b = branch("buried-push", CandidateShape::PivotSubset, stack_push_machine());
    b.pivot_class = ValueClass::Unmatched;
    b.subset_class = ValueClass::Matched;
    b.drop_extra_removals = true;
    b.prefix_sound = false;
    a.branches.push_back(std::move(b));
    Branch q =
        branch("buried-push-seq", CandidateShape::PivotSubset, buried_push_machine());
    q.pivot_class = ValueClass::Unmatched;
    q.subset_class = ValueClass::Matched;
    q.drop_extra_removals = true;
    a.branches.push_back(std::move(q));
  } else if (s.name == "stack" && rule.name == "pop-empty") {
    Branch b = branch("covered-empty", CandidateShape::ObsSubset,
                      empty_obs_machine("Push", "Pop", "PopEmpty"));
    b.subset_class = ValueClass::Inserted;
    b.drop_extra_removals = true;
    a.branches.push_back(std::move(b));
  } else if (s.name == "register" && rule.name == "write-read") {
    a.branches.push_back(single("read-unwritten", unmatched_removal("Write", "Read")));
    a.branches.push_back(
        branch("stale-read-seq", CandidateShape::OrderedPair, stale_read_machine()));
    Branch b = branch("stale-pair", CandidateShape::UnorderedPair, register_pair());
    b.prefix_sound = false;
    a.branches.push_back(std::move(b));
  } else if (s.name == "mutex" && rule.name == "lock-unlock") {
    a.branches.push_back(single("unlock-unmatched", unmatched_removal("Lock", "Unlock")));
    a.branches.push_back(single("unlock-duplicate", duplicate_removal("Lock", "Unlock")));
    a.branches.push_back(
        branch("blocked-pair", CandidateShape::UnorderedPair, mutex_pair()));
    a.branches.push_back(
        branch("starved-pair", CandidateShape::OrderedPair, mutex_starved_pair()));
  } else if (s.name == "mutex" && rule.name == "lock") {
    a.branches.push_back(
        branch("double-hold", CandidateShape::UnorderedPair, mutex_two_lockonly()));
  }
  // remaining rules (empty, enq, push as premise-only classes, write-read
  // handled above) admit no violations of their own class
  return a;
}

std::vector<ViolationAutomaton> build_all(const Specification& s) {
  std::vector<ViolationAutomaton> out;
  for (int r = 0; r < int(s.rules.size()); r++) out.push_back(build(s, r));
  return out;
}

Nfa union_nfa(const Specification& s, bool prefix_sound_only) {
  Nfa u;
  for (const auto& a : build_all(s)) {
    for (const auto& b : a.branches) {
      if (prefix_sound_only && !b.prefix_sound) continue;
      int off = int(u.states.size());
      for (const auto& st : b.nfa.states) {
        AState copy = st;
        for (auto& [sym, t] : copy.edges) t += off;
        u.states.push_back(std::move(copy));
      }
      for (int i : b.nfa.initial) u.initial.push_back(i + off);
    }
  }
  return u;
}

namespace {

struct ResolvedAction {
  Kind kind;
  std::string method;
  Value value;  // operation value; ghosts for argless operations
  std::string op;
};

struct ValueInfo {
  std::vector<int> ins;  // op indices, input methods
  std::vector<int> rem;  // op indices, non-input non-argless methods
};

bool in_class(const ValueInfo& vi, ValueClass c) {
  switch (c) {
    case ValueClass::Any:
      return true;
    case ValueClass::Inserted:
      return !vi.ins.empty();
    case ValueClass::Matched:
      return !vi.ins.empty() && !vi.rem.empty();
    case ValueClass::MatchedExactPair:
      return vi.ins.size() == 1 && vi.rem.size() == 1;
    case ValueClass::Unmatched:
      return !vi.ins.empty() && vi.rem.empty();
  }
  return false;
}

// masks ordered by size, then by enumeration order of their members
std::vector<std::vector<Value>> subsets_of(const std::vector<Value>& vals) {
  std::vector<unsigned> masks;
  for (unsigned m = 1; m < (1u << vals.size()); m++) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  std::vector<std::vector<Value>> out;
  for (unsigned m : masks) {
    std::vector<Value> sub;
    for (size_t i = 0; i < vals.size(); i++)
      if (m & (1u << i)) sub.push_back(vals[i]);
    out.push_back(std::move(sub));
  }
  return out;
}

struct Candidate {
  std::map<Value, Value> renaming;  // explicit roles; absent values take deflt
  Value deflt = 3;
  std::set<std::string> dropped;
};

bool run_candidate(const Nfa& nfa, const std::vector<ResolvedAction>& acts,
                   const Candidate& c) {
  std::vector<std::tuple<Kind, std::string, Value>> word;
  word.reserve(acts.size());
  for (const auto& a : acts) {
    if (c.dropped.count(a.op)) continue;
    auto it = c.renaming.find(a.value);
    Value role = it == c.renaming.end() ? c.deflt : it->second;
    word.emplace_back(a.kind, a.method, role);
  }
  return nfa.accepts(word);
}

}  // namespace

std::optional<MatchEvidence> match_execution(const ViolationAutomaton& a,
                                             const Execution& e) {
  if (a.branches.empty()) return std::nullopt;
  const Specification& spec = spec_by_name(a.spec);
  History h = History::of(e);

  std::vector<ResolvedAction> acts;
  std::map<std::string, Value> op_value;
  std::map<std::string, int> op_index;
  for (int i = 0; i < int(h.ops().size()); i++) {
    op_value[h.ops()[i].name] = h.ops()[i].value;
    op_index[h.ops()[i].name] = i;
  }
  for (const auto& act : e.actions)
    acts.push_back({act.kind, act.method, op_value.at(act.op), act.op});

  // data values in first-occurrence order, with per-value op summaries
  std::vector<Value> values;
  std::map<Value, ValueInfo> info;
  for (int i = 0; i < int(h.ops().size()); i++) {
    const Operation& op = h.ops()[i];
    if (!is_data(op.value)) continue;
    if (!info.count(op.value)) values.push_back(op.value);
    if (spec.input_methods.count(op.method))
      info[op.value].ins.push_back(i);
    else if (!spec.argless_methods.count(op.method))
      info[op.value].rem.push_back(i);
    else
      info[op.value];
  }

  auto removal_drops = [&](const std::vector<Value>& role1) {
    std::set<std::string> dropped;
    for (Value v : role1) {
      const auto& rem = info[v].rem;
      if (rem.size() < 2) continue;
      int keep = *std::min_element(rem.begin(), rem.end(), [&](int x, int y) {
        return h.ops()[x].call < h.ops()[y].call;
      });
      for (int r : rem)
        if (r != keep) dropped.insert(h.ops()[r].name);
    }
    return dropped;
  };

  auto found = [&](const Branch& b, const Candidate& c) {
    MatchEvidence ev;
    ev.rule = a.rule;
    ev.branch = b.name;
    ev.renaming = c.renaming;
    ev.dropped_ops.assign(c.dropped.begin(), c.dropped.end());
    return ev;
  };

  for (const auto& b : a.branches) {
    switch (b.shape) {
      case CandidateShape::SingleValue:
        for (Value x : values) {
          Candidate c;
          c.renaming[x] = 1;
          c.deflt = 2;
          if (run_candidate(b.nfa, acts, c)) return found(b, c);
        }
        break;
      case CandidateShape::OrderedPair:
        for (Value x : values)
          for (Value y : values) {
            if (x == y) continue;
            Candidate c;
            c.renaming[x] = 1;
            c.renaming[y] = 2;
            if (run_candidate(b.nfa, acts, c)) return found(b, c);
          }
        break;
      case CandidateShape::UnorderedPair:
        for (size_t i = 0; i < values.size(); i++)
          for (size_t j = i + 1; j < values.size(); j++) {
            Candidate c;
            c.renaming[values[i]] = 1;
            c.renaming[values[j]] = 2;
            if (run_candidate(b.nfa, acts, c)) return found(b, c);
          }
        break;
      case CandidateShape::ObsSubset: {
        std::vector<Value> eligible;
        for (Value v : values)
          if (in_class(info[v], b.subset_class)) eligible.push_back(v);
        auto subs = subsets_of(eligible);
        for (const auto& op : h.ops()) {
          if (!spec.argless_methods.count(op.method)) continue;
          for (const auto& sub : subs) {
            Candidate c;
            for (Value v : sub) c.renaming[v] = 1;
            c.renaming[op.value] = 2;  // the observation's ghost value
            if (b.drop_extra_removals) c.dropped = removal_drops(sub);
            if (run_candidate(b.nfa, acts, c)) return found(b, c);
          }
        }
        break;
      }
      case CandidateShape::PivotSubset: {
        std::vector<Value> eligible;
        for (Value v : values)
          if (in_class(info[v], b.subset_class)) eligible.push_back(v);
        for (Value d : values) {
          if (!in_class(info[d], b.pivot_class)) continue;
          std::vector<Value> rest;
          for (Value v : eligible)
            if (v != d) rest.push_back(v);
          for (const auto& sub : subsets_of(rest)) {
            Candidate c;
            for (Value v : sub) c.renaming[v] = 1;
            c.renaming[d] = 2;
            if (b.drop_extra_removals) c.dropped = removal_drops(sub);
            if (run_candidate(b.nfa, acts, c)) return found(b, c);
          }
        }
        break;
      }
    }
  }
  return std::nullopt;
}

std::optional<MatchEvidence> match_execution(const Specification& s, const Execution& e) {
  for (const auto& a : build_all(s)) {
    if (auto ev = match_execution(a, e)) return ev;
  }
  return std::nullopt;
}

std::string describe(const ViolationAutomaton& a) {
  std::ostringstream os;
  os << "automaton " << a.spec << "/" << a.rule << "\n";
  if (a.branches.empty()) {
    os << "  (no violating executions in this class)\n";
    return os.str();
  }
  auto shape_name = [](CandidateShape s) {
    switch (s) {
      case CandidateShape::SingleValue:
        return "single value: x->1, rest->2";
      case CandidateShape::OrderedPair:
        return "ordered pair: x->1, y->2, rest->3";
      case CandidateShape::UnorderedPair:
        return "pair: {x,y}->{1,2}, rest->3";
      case CandidateShape::ObsSubset:
        return "empty observation->2, value subset->1, rest->3";
      case CandidateShape::PivotSubset:
        return "pivot value->2, value subset->1, rest->3";
    }
    return "";
  };
  auto sym_str = [](const ASym& s) {
    std::ostringstream ss;
    ss << (s.kind == Kind::Call ? "call " : "ret ") << s.method << "(" << s.value << ")";
    return ss.str();
  };
  for (const auto& b : a.branches) {
    os << "branch " << b.name << "  [" << shape_name(b.shape) << "]\n";
    if (b.drop_extra_removals)
      os << "  normalization: keep only the earliest-called removal of each role-1 value\n";
    if (!b.prefix_sound) os << "  judged on completed executions only\n";
    const Nfa& n = b.nfa;
    os << "  initial:";
    for (int i : n.initial) os << " q" << i;
    os << "\n";
    for (int i = 0; i < int(n.states.size()); i++) {
      const AState& st = n.states[i];
      os << "  q" << i << (st.accepting ? " (accept)" : "") << ":";
      bool any = false;
      for (const auto& [sym, t] : st.edges) {
        os << (any ? ", " : " ") << sym_str(sym) << " -> q" << t;
        any = true;
      }
      for (const auto& sym : st.kills) {
        os << (any ? ", " : " ") << sym_str(sym) << " -> die";
        any = true;
      }
      os << (any ? ", " : " ") << "else loop\n";
    }
  }
  return os.str();
}

}  // namespace linviol
