/* monitor.cpp -- polynomial violation checks */
#include "linviol/monitor.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

namespace linviol {

namespace {

// Per-value op summary. ins is the op of the value-introducing method
// (Enq/Push/Write/Lock), rem the ops of the consuming/observing method
// (Deq/Pop/Read/Unlock) in call order. Op index order is call order.
struct VOps {
  int ins = -1;
  std::vector<int> rem;
};

std::map<Value, VOps> summarize(const History& h, const std::string& ins,
                                const std::string& rem) {
  std::map<Value, VOps> m;
  for (int i = 0; i < h.size(); ++i) {
    const Operation& o = h.ops()[i];
    if (!is_data(o.value)) continue;
    if (o.method == ins) m[o.value].ins = i;
    if (o.method == rem) m[o.value].rem.push_back(i);
  }
  return m;
}

std::vector<int> all_ops(const std::map<Value, VOps>& m, Value v) {
  std::vector<int> r;
  auto it = m.find(v);
  if (it == m.end()) return r;
  if (it->second.ins >= 0) r.push_back(it->second.ins);
  r.insert(r.end(), it->second.rem.begin(), it->second.rem.end());
  std::sort(r.begin(), r.end());
  return r;
}

// Shortest cycle through src in the graph given by succ (nodes 0..n-1,
// neighbors iterated ascending). Returns the node sequence starting at src;
// empty if none.
std::vector<int> shortest_cycle_through(int src, int n,
                                        const std::function<std::vector<int>(int)>& succ) {
  std::vector<int> parent(n, -2);
  std::deque<int> q;
  parent[src] = -1;
  q.push_back(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int w : succ(u)) {
      if (w == src) {
        std::vector<int> path;
        for (int x = u; x != -1; x = parent[x]) path.push_back(x);
        std::reverse(path.begin(), path.end());
        return path;  // src ... u, closing edge u->src implied
      }
      if (parent[w] == -2) {
        parent[w] = u;
        q.push_back(w);
      }
    }
  }
  return {};
}

// First op pair (a in ya, b in xb) with a happening before b, indices
// ascending. Both lists must be sorted.
std::optional<Edge> first_hb_edge(const History& h, const std::vector<int>& ya,
                                  const std::vector<int>& xb) {
  for (int a : ya)
    for (int b : xb)
      if (h.hb(a, b)) return Edge{a, b};
  return std::nullopt;
}

// ---- queue: enq-deq class ----

// Viability of witness x in the projection to {x, y}: enq(x) present with a
// single deq(x), nothing in the pair precedes enq(x), and no deq of the pair
// precedes deq(x). Sufficient and necessary for x to head a matching word.
bool pair_witness_works(const History& h, const std::map<Value, VOps>& sum, Value x,
                        Value y) {
  auto it = sum.find(x);
  if (it == sum.end()) return false;
  const VOps& vx = it->second;
  if (vx.ins < 0 || vx.rem.size() != 1) return false;
  std::vector<int> pair_ops = all_ops(sum, x);
  std::vector<int> yo = all_ops(sum, y);
  pair_ops.insert(pair_ops.end(), yo.begin(), yo.end());
  for (int p : pair_ops) {
    if (h.hb(p, vx.ins)) return false;
    if (h.ops()[p].method == "Deq" || h.ops()[p].method == "Pop") {
      if (p != vx.rem[0] && h.hb(p, vx.rem[0])) return false;
    }
  }
  return true;
}

std::optional<Edge> pair_witness_block(const History& h, const std::map<Value, VOps>& sum,
                                       Value x, Value y) {
  auto it = sum.find(x);
  if (it == sum.end() || it->second.ins < 0 || it->second.rem.size() != 1)
    return std::nullopt;
  const VOps& vx = it->second;
  std::vector<int> pair_ops = all_ops(sum, x);
  std::vector<int> yo = all_ops(sum, y);
  pair_ops.insert(pair_ops.end(), yo.begin(), yo.end());
  std::sort(pair_ops.begin(), pair_ops.end());
  for (int p : pair_ops)
    if (h.hb(p, vx.ins)) return Edge{p, vx.ins};
  for (int p : pair_ops) {
    const std::string& m = h.ops()[p].method;
    if ((m == "Deq" || m == "Pop") && p != vx.rem[0] && h.hb(p, vx.rem[0]))
      return Edge{p, vx.rem[0]};
  }
  return std::nullopt;
}

std::optional<Violation> queue_enqdeq(const History& h) {
  auto sum = summarize(h, "Enq", "Deq");
  for (const auto& [v, vo] : sum) {
    if (vo.rem.empty()) continue;
    if (vo.ins < 0)
      return Violation{"enq-deq", {v}, {}, "value dequeued but never enqueued"};
    if (vo.rem.size() >= 2)
      return Violation{"enq-deq", {v}, {Edge{vo.rem[0], vo.rem[1]}},
                       "value dequeued more than once"};
    if (h.hb(vo.rem[0], vo.ins))
      return Violation{"enq-deq", {v}, {Edge{vo.rem[0], vo.ins}},
                       "dequeue completed before enqueue started"};
  }
  std::vector<Value> vals;
  for (const auto& [v, vo] : sum) vals.push_back(v);
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j) {
      Value x = vals[i], y = vals[j];
      if (sum[x].rem.empty() && sum[y].rem.empty()) continue;
      if (pair_witness_works(h, sum, x, y) || pair_witness_works(h, sum, y, x)) continue;
      Violation viol{"enq-deq", {x, y}, {}, "no first-in-first-out order for the pair"};
      if (auto e = pair_witness_block(h, sum, x, y)) viol.evidence.push_back(*e);
      if (auto e = pair_witness_block(h, sum, y, x)) viol.evidence.push_back(*e);
      return viol;
    }
  return std::nullopt;
}

// ---- queue deq-empty / stack pop-empty class ----

// The left-right graph for an empty-observation op o: nodes are values with
// an insert op; an edge means "the target must be consumed only after the
// source's constraint", and a cycle through o pins some value across o's
// whole span, so o can never observe emptiness.
std::optional<Violation> empty_obs_check(const History& h, const std::string& ins,
                                         const std::string& rem,
                                         const std::string& empty_method,
                                         const std::string& rule) {
  auto sum = summarize(h, ins, rem);
  std::vector<Value> vals;
  for (const auto& [v, vo] : sum)
    if (vo.ins >= 0) vals.push_back(v);
  const int n = static_cast<int>(vals.size());

  for (int o : h.ops_of_method(empty_method)) {
    // Node 0 is o, node i+1 is vals[i].
    auto rem_min = [&](int vi) -> int {
      const VOps& vo = sum[vals[vi]];
      return vo.rem.empty() ? -1 : vo.rem[0];
    };
    auto succ = [&](int u) {
      std::vector<int> s;
      if (u == 0) {
        for (int i = 0; i < n; ++i) {
          int rm = rem_min(i);
          if (rm < 0 || h.hb(o, rm)) s.push_back(i + 1);
        }
      } else {
        int v = u - 1;
        if (h.hb(sum[vals[v]].ins, o)) s.push_back(0);
        for (int w = 0; w < n; ++w) {
          if (w == v) continue;
          int rm = rem_min(w);
          if (rm >= 0 && h.hb(sum[vals[v]].ins, rm)) s.push_back(w + 1);
        }
      }
      return s;
    };
    std::vector<int> cyc = shortest_cycle_through(0, n + 1, succ);
    if (cyc.empty()) continue;

    Violation viol{rule, {}, {}, "emptiness observed while the structure cannot be empty"};
    for (std::size_t k = 1; k < cyc.size(); ++k) viol.witnesses.push_back(vals[cyc[k] - 1]);
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
      if (a == 0) {
        int rm = rem_min(b - 1);
        viol.evidence.push_back(Edge{o, rm >= 0 ? rm : sum[vals[b - 1]].ins});
      } else if (b == 0) {
        viol.evidence.push_back(Edge{sum[vals[a - 1]].ins, o});
      } else {
        viol.evidence.push_back(Edge{sum[vals[a - 1]].ins, rem_min(b - 1)});
      }
    }
    return viol;
  }
  return std::nullopt;
}

// ---- stack: push-pop class ----

std::optional<Violation> stack_pushpop(const History& h) {
  auto sum = summarize(h, "Push", "Pop");
  for (const auto& [v, vo] : sum) {
    if (vo.rem.size() > static_cast<std::size_t>(vo.ins >= 0 ? 1 : 0)) {
      if (vo.ins < 0)
        return Violation{"push-pop", {v}, {}, "value popped but never pushed"};
      return Violation{"push-pop", {v}, {Edge{vo.rem[0], vo.rem[1]}},
                       "value popped more than once"};
    }
  }
  for (const auto& [v, vo] : sum)
    if (vo.ins >= 0 && !vo.rem.empty() && h.hb(vo.rem[0], vo.ins))
      return Violation{"push-pop", {v}, {Edge{vo.rem[0], vo.ins}},
                       "pop completed before push started"};

  // Cover search: pivot d cannot be popped while later-pushed values also
  // demand pops inside pop(d)'s span. Nodes are matched values pushed
  // strictly after push(d).
  std::vector<Value> matched;
  for (const auto& [v, vo] : sum)
    if (vo.ins >= 0 && vo.rem.size() == 1) matched.push_back(v);
  for (Value d : matched) {
    const VOps& vd = sum[d];
    std::vector<Value> nodes;
    for (Value w : matched)
      if (w != d && h.hb(vd.ins, sum[w].ins)) nodes.push_back(w);
    const int n = static_cast<int>(nodes.size());
    auto succ = [&](int u) {
      std::vector<int> s;
      if (u == 0) {
        for (int i = 0; i < n; ++i)
          if (h.hb(vd.rem[0], sum[nodes[i]].rem[0])) s.push_back(i + 1);
      } else {
        Value v = nodes[u - 1];
        if (h.hb(sum[v].ins, vd.rem[0])) s.push_back(0);
        for (int w = 0; w < n; ++w)
          if (w != u - 1 && h.hb(sum[v].ins, sum[nodes[w]].rem[0])) s.push_back(w + 1);
      }
      return s;
    };
    std::vector<int> cyc = shortest_cycle_through(0, n + 1, succ);
    if (cyc.empty()) continue;
    Violation viol{"push-pop", {d}, {}, "no last-in-first-out order around this value"};
    for (std::size_t k = 1; k < cyc.size(); ++k) viol.witnesses.push_back(nodes[cyc[k] - 1]);
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
      int from = a == 0 ? vd.rem[0] : sum[nodes[a - 1]].ins;
      int to = b == 0 ? vd.rem[0] : sum[nodes[b - 1]].rem[0];
      viol.evidence.push_back(Edge{from, to});
    }
    return viol;
  }
  return std::nullopt;
}

// ---- stack: push class ----

// A value pushed but never popped pins everything pushed earlier; a cycle
// through its push op over matched values makes every linearization order it
// below some value that is popped before it could be.
std::optional<Violation> stack_push(const History& h) {
  auto sum = summarize(h, "Push", "Pop");
  std::vector<Value> matched, unmatched;
  for (const auto& [v, vo] : sum) {
    if (vo.ins < 0) continue;
    if (vo.rem.empty())
      unmatched.push_back(v);
    else
      matched.push_back(v);
  }
  const int n = static_cast<int>(matched.size());
  for (Value y : unmatched) {
    int px = sum[y].ins;
    auto succ = [&](int u) {
      std::vector<int> s;
      if (u == 0) {
        for (int i = 0; i < n; ++i)
          if (h.hb(px, sum[matched[i]].rem[0])) s.push_back(i + 1);
      } else {
        Value v = matched[u - 1];
        if (h.hb(sum[v].ins, px)) s.push_back(0);
        for (int w = 0; w < n; ++w)
          if (w != u - 1 && h.hb(sum[v].ins, sum[matched[w]].rem[0])) s.push_back(w + 1);
      }
      return s;
    };
    std::vector<int> cyc = shortest_cycle_through(0, n + 1, succ);
    if (cyc.empty()) continue;
    Violation viol{"push", {y}, {}, "unpopped value cannot stay in the stack"};
    for (std::size_t k = 1; k < cyc.size(); ++k)
      viol.witnesses.push_back(matched[cyc[k] - 1]);
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
      int from = a == 0 ? px : sum[matched[a - 1]].ins;
      int to = b == 0 ? px : sum[matched[b - 1]].rem[0];
      viol.evidence.push_back(Edge{from, to});
    }
    return viol;
  }
  return std::nullopt;
}

// ---- register: write-read class ----

// Blocking relation: y -> x iff some y op returns before some x op starts;
// then x's write cannot head the projection to the involved values. Ground
// failures plus any blocking cycle are exactly the violations.
std::optional<Violation> register_check(const History& h) {
  auto sum = summarize(h, "Write", "Read");
  std::vector<Value> vals;
  for (const auto& [v, vo] : sum) vals.push_back(v);
  for (Value v : vals) {
    const VOps& vo = sum[v];
    if (vo.ins < 0 && !vo.rem.empty())
      return Violation{"write-read", {v}, {}, "value read but never written"};
    if (vo.ins >= 0)
      for (int r : vo.rem)
        if (h.hb(r, vo.ins))
          return Violation{"write-read", {v}, {Edge{r, vo.ins}},
                           "read completed before the write started"};
  }
  const int n = static_cast<int>(vals.size());
  auto succ = [&](int u) {
    std::vector<int> s;
    for (int w = 0; w < n; ++w) {
      if (w == u) continue;
      if (first_hb_edge(h, all_ops(sum, vals[u]), all_ops(sum, vals[w]))) s.push_back(w);
    }
    return s;
  };
  std::vector<int> best;
  for (int s0 = 0; s0 < n; ++s0) {
    std::vector<int> c = shortest_cycle_through(s0, n, succ);
    if (!c.empty() && (best.empty() || c.size() < best.size())) best = c;
  }
  if (best.empty()) return std::nullopt;
  Violation viol{"write-read", {}, {}, "stale read: no write order explains all reads"};
  for (int u : best) viol.witnesses.push_back(vals[u]);
  for (std::size_t k = 0; k < best.size(); ++k) {
    Value a = vals[best[k]], b = vals[best[(k + 1) % best.size()]];
    viol.evidence.push_back(*first_hb_edge(h, all_ops(sum, a), all_ops(sum, b)));
  }
  return viol;
}

// ---- mutex ----

std::optional<Violation> mutex_lock_unlock(const History& h) {
  auto sum = summarize(h, "Lock", "Unlock");
  std::vector<Value> vals;
  for (const auto& [v, vo] : sum) vals.push_back(v);
  for (Value v : vals) {
    const VOps& vo = sum[v];
    if (vo.rem.empty()) continue;
    if (vo.ins < 0)
      return Violation{"lock-unlock", {v}, {}, "unlock without a matching lock"};
    if (vo.rem.size() >= 2)
      return Violation{"lock-unlock", {v}, {Edge{vo.rem[0], vo.rem[1]}},
                       "lock released more than once"};
    if (h.hb(vo.rem[0], vo.ins))
      return Violation{"lock-unlock", {v}, {Edge{vo.rem[0], vo.ins}},
                       "unlock completed before the lock started"};
  }
  // Fail propagation: lock-only values can never witness; blocked values
  // (some other involved op precedes one of theirs) fail if their blocker
  // fails. A cycle is self-justifying. A failing unlock-carrying value yields
  // a violating projection.
  const int n = static_cast<int>(vals.size());
  std::vector<std::vector<int>> succ(n);
  for (int u = 0; u < n; ++u)
    for (int w = 0; w < n; ++w) {
      if (u == w) continue;
      if (first_hb_edge(h, all_ops(sum, vals[u]), all_ops(sum, vals[w])))
        succ[u].push_back(w);
    }
  std::vector<int> src;  // justified fail sources: lock-only values, cycle nodes
  std::vector<bool> is_src(n, false);
  for (int u = 0; u < n; ++u)
    if (sum[vals[u]].rem.empty()) is_src[u] = true;
  auto succ_fn = [&](int u) { return succ[u]; };
  for (int u = 0; u < n; ++u)
    if (!is_src[u] && !shortest_cycle_through(u, n, succ_fn).empty()) is_src[u] = true;
  // forward closure
  std::vector<int> dist(n, -1), parent(n, -1);
  std::deque<int> q;
  for (int u = 0; u < n; ++u)
    if (is_src[u]) {
      dist[u] = 0;
      q.push_back(u);
    }
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int w : succ[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        parent[w] = u;
        q.push_back(w);
      }
  }
  for (int u = 0; u < n; ++u) {
    if (dist[u] < 0 || sum[vals[u]].rem.empty()) continue;
    Violation viol{"lock-unlock", {}, {}, "lock held across a conflicting acquire"};
    std::vector<int> chain;
    for (int x = u; x != -1; x = parent[x]) chain.push_back(x);
    std::reverse(chain.begin(), chain.end());
    int s0 = chain.front();
    if (!sum[vals[s0]].rem.empty()) {
      // source justified by a cycle; report the full cycle first
      std::vector<int> cyc = shortest_cycle_through(s0, n, succ_fn);
      for (std::size_t k = 0; k < cyc.size(); ++k) {
        viol.witnesses.push_back(vals[cyc[k]]);
        viol.evidence.push_back(*first_hb_edge(h, all_ops(sum, vals[cyc[k]]),
                                               all_ops(sum, vals[cyc[(k + 1) % cyc.size()]])));
      }
      for (std::size_t k = 1; k < chain.size(); ++k) {
        viol.witnesses.push_back(vals[chain[k]]);
        viol.evidence.push_back(*first_hb_edge(h, all_ops(sum, vals[chain[k - 1]]),
                                               all_ops(sum, vals[chain[k]])));
      }
    } else {
      for (std::size_t k = 0; k < chain.size(); ++k) {
        viol.witnesses.push_back(vals[chain[k]]);
        if (k + 1 < chain.size())
          viol.evidence.push_back(*first_hb_edge(h, all_ops(sum, vals[chain[k]]),
                                                 all_ops(sum, vals[chain[k + 1]])));
      }
    }
    return viol;
  }
  return std::nullopt;
}

std::optional<Violation> mutex_lock(const History& h) {
  auto sum = summarize(h, "Lock", "Unlock");
  std::vector<Value> lock_only;
  for (const auto& [v, vo] : sum)
    if (vo.ins >= 0 && vo.rem.empty()) lock_only.push_back(v);
  if (lock_only.size() < 2) return std::nullopt;
  return Violation{"lock",
                   {lock_only[0], lock_only[1]},
                   {},
                   "two locks held with no release"};
}

}  // namespace

bool w_holds(const History& h, Value x, Value y) {
  auto sum = summarize(h, "Enq", "Deq");
  return pair_witness_works(h, sum, x, y);
}

std::optional<Violation> check_rule(const History& h, const Specification& s, int r) {
  const std::string& rule = s.rules[r].name;
  if (s.name == "queue") {
    if (rule == "enq-deq") return queue_enqdeq(h);
    if (rule == "deq-empty") return empty_obs_check(h, "Enq", "Deq", "DeqEmpty", rule);
    return std::nullopt;  // empty, enq: a maximal op always exists
  }
  if (s.name == "stack") {
    if (rule == "push-pop") return stack_pushpop(h);
    if (rule == "push") return stack_push(h);
    if (rule == "pop-empty") return empty_obs_check(h, "Push", "Pop", "PopEmpty", rule);
    return std::nullopt;
  }
  if (s.name == "register") {
    if (rule == "write-read") return register_check(h);
    return std::nullopt;
  }
  if (s.name == "mutex") {
    if (rule == "lock") return mutex_lock(h);
    if (rule == "lock-unlock") return mutex_lock_unlock(h);
    return std::nullopt;
  }
  throw std::out_of_range("monitor: no checks for spec " + s.name);
}

MonitorResult check(const History& h, const Specification& s) {
  for (const Operation& o : h.ops())
    if (!s.methods.count(o.method))
      throw ValidationError("unknown method for spec " + s.name + ": " + o.method);
  if (!is_differentiated(h, s.input_methods))
    throw ValidationError("monitor requires a differentiated history");
  for (int r = 0; r < static_cast<int>(s.rules.size()); ++r)
    if (auto v = check_rule(h, s, r)) return MonitorResult{false, std::move(v)};
  return MonitorResult{true, std::nullopt};
}

}  // namespace linviol
