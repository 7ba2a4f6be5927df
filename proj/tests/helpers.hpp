/* helpers.hpp -- test-side reference machinery: sequential object simulators,
   random execution sampling, and brute-force linearizability. The simulators
   define legality independently of the library; tests treat them as ground
   truth. */
#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "linviol/model.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// sequential simulators

inline bool queue_legal(const linviol::Word& w) {
  std::deque<linviol::Value> q;
  for (const auto& e : w) {
    if (e.method == "Enq") {
      q.push_back(e.value);
    } else if (e.method == "Deq") {
      if (q.empty() || q.front() != e.value) return false;
      q.pop_front();
    } else if (e.method == "DeqEmpty") {
      if (!q.empty()) return false;
    } else {
      return false;
    }
  }
  return true;
}

inline bool stack_legal(const linviol::Word& w) {
  std::vector<linviol::Value> st;
  for (const auto& e : w) {
    if (e.method == "Push") {
      st.push_back(e.value);
    } else if (e.method == "Pop") {
      if (st.empty() || st.back() != e.value) return false;
      st.pop_back();
    } else if (e.method == "PopEmpty") {
      if (!st.empty()) return false;
    } else {
      return false;
    }
  }
  return true;
}

inline bool register_legal(const linviol::Word& w) {
  bool written = false;
  linviol::Value cur = linviol::kNoValue;
  for (const auto& e : w) {
    if (e.method == "Write") {
      written = true;
      cur = e.value;
    } else if (e.method == "Read") {
      if (!written || cur != e.value) return false;
    } else {
      return false;
    }
  }
  return true;
}

inline bool mutex_legal(const linviol::Word& w) {
  bool held = false;
  linviol::Value owner = linviol::kNoValue;
  for (const auto& e : w) {
    if (e.method == "Lock") {
      if (held) return false;
      held = true;
      owner = e.value;
    } else if (e.method == "Unlock") {
      if (!held || owner != e.value) return false;
      held = false;
    } else {
      return false;
    }
  }
  return true;
}

inline bool word_legal(const std::string& spec, const linviol::Word& w) {
  if (spec == "queue") return queue_legal(w);
  if (spec == "stack") return stack_legal(w);
  if (spec == "register") return register_legal(w);
  if (spec == "mutex") return mutex_legal(w);
  return false;
}

// ---------------------------------------------------------------------------
// brute-force linearizability: try every linear extension of happens-before

inline bool brute_rec(const linviol::History& h, const std::string& spec,
                      std::vector<int>& order, std::vector<bool>& used) {
  const int n = h.size();
  if (static_cast<int>(order.size()) == n)
    return word_legal(spec, linviol::word_of(h, order));
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    bool minimal = true;
    for (int j = 0; j < n && minimal; ++j)
      if (!used[j] && j != i && h.hb(j, i)) minimal = false;
    if (!minimal) continue;
    used[i] = true;
    order.push_back(i);
    if (brute_rec(h, spec, order, used)) return true;
    order.pop_back();
    used[i] = false;
  }
  return false;
}

inline bool brute_linearizable(const linviol::History& h, const std::string& spec) {
  std::vector<int> order;
  std::vector<bool> used(h.size(), false);
  order.reserve(h.size());
  return h.size() == 0 || brute_rec(h, spec, order, used);
}

// ---------------------------------------------------------------------------
// fixture construction

inline linviol::Event ev(std::string m, linviol::Value v) { return {std::move(m), v, -1}; }

// each op's ret immediately follows its call
inline linviol::Execution seq_execution(
    const std::vector<std::pair<std::string, linviol::Value>>& ops) {
  linviol::Execution e;
  for (size_t i = 0; i < ops.size(); ++i) {
    std::string id = "o" + std::to_string(i);
    e.actions.push_back({linviol::Kind::Call, id, ops[i].first, ops[i].second});
    e.actions.push_back({linviol::Kind::Ret, id, ops[i].first, ops[i].second});
  }
  return e;
}

// explicit call/ret positions; positions must be distinct and call < ret
struct OpSpec {
  std::string m;
  linviol::Value v;
  int call;
  int ret;
};

inline linviol::Execution exec_of(const std::vector<OpSpec>& ops) {
  int maxpos = -1;
  for (const auto& o : ops) maxpos = std::max(maxpos, std::max(o.call, o.ret));
  std::vector<linviol::Action> slots(maxpos + 1);
  for (size_t i = 0; i < ops.size(); ++i) {
    std::string id = "o" + std::to_string(i);
    slots[ops[i].call] = {linviol::Kind::Call, id, ops[i].m, ops[i].v};
    slots[ops[i].ret] = {linviol::Kind::Ret, id, ops[i].m, ops[i].v};
  }
  linviol::Execution e;
  for (linviol::Action& a : slots)
    if (!a.op.empty()) e.actions.push_back(std::move(a));  // gaps only order slots
  return e;
}

// ---------------------------------------------------------------------------
// word utilities

inline std::set<linviol::Value> word_dom(const linviol::Word& w) {
  std::set<linviol::Value> d;
  for (const auto& e : w)
    if (linviol::is_data(e.value)) d.insert(e.value);
  return d;
}

// argless events carry distinct ghost values, so they project like any value
inline std::set<linviol::Value> word_values(const linviol::Word& w) {
  std::set<linviol::Value> d;
  for (const auto& e : w) d.insert(e.value);
  return d;
}

inline linviol::Word word_project(const linviol::Word& w,
                                  const std::set<linviol::Value>& keep) {
  linviol::Word out;
  for (const auto& e : w)
    if (keep.count(e.value)) out.push_back(e);
  return out;
}

inline std::vector<std::set<linviol::Value>> subsets_of(
    const std::set<linviol::Value>& d) {
  std::vector<linviol::Value> v(d.begin(), d.end());
  std::vector<std::set<linviol::Value>> out;
  for (unsigned m = 0; m < (1u << v.size()); ++m) {
    std::set<linviol::Value> s;
    for (size_t i = 0; i < v.size(); ++i)
      if (m & (1u << i)) s.insert(v[i]);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<std::tuple<linviol::Kind, std::string, linviol::Value>> action_word(
    const linviol::Execution& e) {
  std::vector<std::tuple<linviol::Kind, std::string, linviol::Value>> w;
  for (const auto& a : e.actions) w.emplace_back(a.kind, a.method, a.value);
  return w;
}

// ---------------------------------------------------------------------------
// random sampling

struct SpecMethods {
  std::string insert;
  std::string removal;   // valued non-insert method
  std::string argless;   // empty if the spec has none
};

inline SpecMethods methods_of(const std::string& spec) {
  if (spec == "queue") return {"Enq", "Deq", "DeqEmpty"};
  if (spec == "stack") return {"Push", "Pop", "PopEmpty"};
  if (spec == "register") return {"Write", "Read", ""};
  return {"Lock", "Unlock", ""};
}

// interleaves planned ops into call/ret actions; ops start in plan order
inline linviol::Execution interleave(
    std::mt19937& rng, const std::vector<std::pair<std::string, linviol::Value>>& plan) {
  linviol::Execution e;
  std::vector<int> pending;
  size_t started = 0;
  std::bernoulli_distribution startp(0.55);
  while (started < plan.size() || !pending.empty()) {
    if (started < plan.size() && (pending.empty() || startp(rng))) {
      e.actions.push_back({linviol::Kind::Call, "o" + std::to_string(started),
                           plan[started].first, plan[started].second});
      pending.push_back(static_cast<int>(started));
      ++started;
    } else {
      int pi = std::uniform_int_distribution<int>(0, static_cast<int>(pending.size()) - 1)(rng);
      int op = pending[pi];
      pending.erase(pending.begin() + pi);
      e.actions.push_back({linviol::Kind::Ret, "o" + std::to_string(op), plan[op].first,
                           plan[op].second});
    }
  }
  return e;
}

// completed, differentiated execution: insert values are distinct, removal
// values are drawn from the pool (so they may dangle or repeat)
inline linviol::Execution random_execution(std::mt19937& rng, const std::string& spec,
                                           int max_ops, int max_values) {
  SpecMethods sm = methods_of(spec);
  int nops = std::uniform_int_distribution<int>(1, max_ops)(rng);
  std::vector<linviol::Value> pool(max_values);
  std::iota(pool.begin(), pool.end(), 1);
  std::shuffle(pool.begin(), pool.end(), rng);
  size_t next_insert = 0;
  std::vector<std::pair<std::string, linviol::Value>> plan;
  for (int i = 0; i < nops; ++i) {
    int kinds = sm.argless.empty() ? 2 : 3;
    int k = std::uniform_int_distribution<int>(0, kinds - 1)(rng);
    if (k == 0 && next_insert < pool.size()) {
      plan.emplace_back(sm.insert, pool[next_insert++]);
    } else if (k <= 1) {
      plan.emplace_back(sm.removal,
                        std::uniform_int_distribution<int>(1, max_values)(rng));
    } else {
      plan.emplace_back(sm.argless, linviol::kNoValue);
    }
  }
  return interleave(rng, plan);
}

// every value present exactly once as an insert and once as a removal
inline linviol::Execution random_matched_queue(std::mt19937& rng, int max_values) {
  int n = std::uniform_int_distribution<int>(1, max_values)(rng);
  std::vector<std::pair<std::string, linviol::Value>> plan;
  for (int v = 1; v <= n; ++v) {
    plan.emplace_back("Enq", v);
    plan.emplace_back("Deq", v);
  }
  std::shuffle(plan.begin(), plan.end(), rng);
  return interleave(rng, plan);
}

// model-style execution: every op, observers included, carries a value in
// 1..3 and insert values repeat; for running automata without renaming
inline linviol::Execution random_reused_execution(std::mt19937& rng,
                                                  const std::string& spec, int max_ops) {
  SpecMethods sm = methods_of(spec);
  int nops = std::uniform_int_distribution<int>(1, max_ops)(rng);
  std::vector<std::pair<std::string, linviol::Value>> plan;
  for (int i = 0; i < nops; ++i) {
    int kinds = sm.argless.empty() ? 2 : 3;
    int k = std::uniform_int_distribution<int>(0, kinds - 1)(rng);
    linviol::Value v = std::uniform_int_distribution<int>(1, 3)(rng);
    if (k == 0) {
      plan.emplace_back(sm.insert, v);
    } else if (k == 1) {
      plan.emplace_back(sm.removal, v);
    } else {
      plan.emplace_back(sm.argless, v);
    }
  }
  return interleave(rng, plan);
}

// a legal sequential word, built by only ever taking legal simulator steps
inline linviol::Word random_legal_word(std::mt19937& rng, const std::string& spec,
                                       int max_events, int max_values) {
  linviol::Word w;
  int len = std::uniform_int_distribution<int>(0, max_events)(rng);
  int ghosts = 0;
  auto pick = [&rng](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  if (spec == "queue" || spec == "stack") {
    bool fifo = spec == "queue";
    SpecMethods sm = methods_of(spec);
    std::deque<linviol::Value> st;
    linviol::Value next = 1;
    for (int i = 0; i < len; ++i) {
      int k = pick(3);
      if (k == 0 && next <= max_values) {
        st.push_back(next);
        w.push_back(ev(sm.insert, next));
        ++next;
      } else if (k == 1 && !st.empty()) {
        linviol::Value v = fifo ? st.front() : st.back();
        if (fifo)
          st.pop_front();
        else
          st.pop_back();
        w.push_back(ev(sm.removal, v));
      } else if (k == 2 && st.empty()) {
        w.push_back(ev(sm.argless, linviol::ghost_for(ghosts++)));
      }
    }
  } else if (spec == "register") {
    linviol::Value cur = linviol::kNoValue;
    linviol::Value next = 1;
    for (int i = 0; i < len; ++i) {
      if (pick(2) == 0 && next <= max_values) {
        cur = next++;
        w.push_back(ev("Write", cur));
      } else if (cur != linviol::kNoValue) {
        w.push_back(ev("Read", cur));
      }
    }
  } else {
    bool held = false;
    linviol::Value owner = linviol::kNoValue;
    linviol::Value next = 1;
    for (int i = 0; i < len; ++i) {
      if (!held && next <= max_values) {
        held = true;
        owner = next++;
        w.push_back(ev("Lock", owner));
      } else if (held && pick(2) == 0) {
        held = false;
        w.push_back(ev("Unlock", owner));
      }
    }
  }
  return w;
}

// arbitrary word with distinct insert values (may be far from legal)
inline linviol::Word random_word(std::mt19937& rng, const std::string& spec,
                                 int max_events, int max_values) {
  SpecMethods sm = methods_of(spec);
  linviol::Word w;
  int len = std::uniform_int_distribution<int>(0, max_events)(rng);
  linviol::Value next = 1;
  int ghosts = 0;
  for (int i = 0; i < len; ++i) {
    int kinds = sm.argless.empty() ? 2 : 3;
    int k = std::uniform_int_distribution<int>(0, kinds - 1)(rng);
    if (k == 0 && next <= max_values) {
      w.push_back(ev(sm.insert, next++));
    } else if (k <= 1) {
      w.push_back(
          ev(sm.removal, std::uniform_int_distribution<int>(1, max_values)(rng)));
    } else {
      w.push_back(ev(sm.argless, linviol::ghost_for(ghosts++)));
    }
  }
  return w;
}

inline const std::vector<std::string>& builtin_specs() {
  static const std::vector<std::string> s = {"queue", "stack", "register", "mutex"};
  return s;
}

}  // namespace testutil
