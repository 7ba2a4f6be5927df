/* Scheduler and sequential objects for trace generation. */
#include "linviol/generate.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <vector>

namespace linviol {

namespace {

// A started operation whose return has not been emitted yet.
struct Pending {
  int op;
  std::string method;
  Value value;
};

struct Gen {
  std::mt19937 rng;
  Execution ex;
  std::vector<Pending> pending;
  int next_op = 0;
  Value next_value = 1;
  int pool = 0;  // 0: every value distinct

  Gen(unsigned seed, int value_pool) : rng(seed), pool(value_pool) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Value fresh() {
    Value v = next_value++;
    return pool > 0 ? (v - 1) % pool + 1 : v;
  }

  void call(const std::string& method, Value v) {
    int op = next_op++;
    ex.actions.push_back({Kind::Call, "o" + std::to_string(op), method, v});
    pending.push_back({op, method, v});
  }

  void retire_one() {
    int i = pick(int(pending.size()));
    const Pending& p = pending[i];
    ex.actions.push_back({Kind::Ret, "o" + std::to_string(p.op), p.method, p.value});
    pending.erase(pending.begin() + i);
  }
};

// One enabled operation: effects already applied when chosen.
struct Choice {
  std::string method;
  Value value = kNoValue;
};

void run(Gen& g, const GenOptions& o,
         const std::function<Choice(Gen&)>& step) {
  int started = 0;
  while (started < o.ops || !g.pending.empty()) {
    bool can_start = started < o.ops && int(g.pending.size()) < o.threads;
    bool must_retire = !can_start;
    if (!must_retire && !g.pending.empty() && g.pick(5) == 0) must_retire = true;
    if (must_retire && !g.pending.empty()) {
      g.retire_one();
      continue;
    }
    Choice c = step(g);
    g.call(c.method, c.value);
    started++;
  }
}

Execution gen_queue(const GenOptions& o, bool fifo_swap, bool false_empty) {
  Gen g(o.seed, o.values);
  std::deque<Value> q;
  run(g, o, [&](Gen& gg) -> Choice {
    std::vector<int> options = {0};  // 0 enq, 1 deq, 2 deq-empty
    if (!q.empty()) options.push_back(1);
    if (q.empty() || (false_empty && q.size() <= 1)) options.push_back(2);
    int pickd = options[gg.pick(int(options.size()))];
    if (pickd == 0) {
      Value v = gg.fresh();
      q.push_back(v);
      return {"Enq", v};
    }
    if (pickd == 1) {
      size_t at = fifo_swap && q.size() >= 2 ? 1 : 0;
      Value v = q[at];
      q.erase(q.begin() + at);
      return {"Deq", v};
    }
    return {"DeqEmpty", kNoValue};
  });
  return g.ex;
}

Execution gen_stack(const GenOptions& o, bool lifo_swap) {
  Gen g(o.seed, o.values);
  std::vector<Value> st;
  run(g, o, [&](Gen& gg) -> Choice {
    std::vector<int> options = {0};  // 0 push, 1 pop, 2 pop-empty
    if (!st.empty()) options.push_back(1);
    if (st.empty()) options.push_back(2);
    int pickd = options[gg.pick(int(options.size()))];
    if (pickd == 0) {
      Value v = gg.fresh();
      st.push_back(v);
      return {"Push", v};
    }
    if (pickd == 1) {
      size_t at = lifo_swap && st.size() >= 2 ? st.size() - 2 : st.size() - 1;
      Value v = st[at];
      st.erase(st.begin() + at);
      return {"Pop", v};
    }
    return {"PopEmpty", kNoValue};
  });
  return g.ex;
}

Execution gen_register(const GenOptions& o, bool stale_read) {
  Gen g(o.seed, o.values);
  Value cur = 0, old = 0;
  run(g, o, [&](Gen& gg) -> Choice {
    bool can_read = stale_read ? (old != 0 || cur != 0) : cur != 0;
    if (can_read && gg.pick(2) == 0) {
      Value v = stale_read && old != 0 ? old : cur;
      return {"Read", v};
    }
    Value v = gg.fresh();
    old = cur;
    cur = v;
    return {"Write", v};
  });
  return g.ex;
}

Execution gen_mutex(const GenOptions& o, bool no_exclusion) {
  Gen g(o.seed, o.values);
  std::vector<Value> holders;
  run(g, o, [&](Gen& gg) -> Choice {
    bool can_lock = no_exclusion || holders.empty();
    bool lock = holders.empty() || (can_lock && gg.pick(2) == 0);
    if (lock) {
      Value v = gg.fresh();
      holders.push_back(v);
      return {"Lock", v};
    }
    int i = gg.pick(int(holders.size()));
    Value v = holders[i];
    holders.erase(holders.begin() + i);
    return {"Unlock", v};
  });
  return g.ex;
}

}  // namespace

Execution generate(const GenOptions& o) {
  const std::string& mut = o.mutant;
  if (o.spec == "queue") {
    if (mut.empty()) return gen_queue(o, false, false);
    if (mut == "queue-fifo-swap") return gen_queue(o, true, false);
    if (mut == "queue-false-empty") return gen_queue(o, false, true);
  } else if (o.spec == "stack") {
    if (mut.empty()) return gen_stack(o, false);
    if (mut == "stack-lifo-swap") return gen_stack(o, true);
  } else if (o.spec == "register") {
    if (mut.empty()) return gen_register(o, false);
    if (mut == "register-stale-read") return gen_register(o, true);
  } else if (o.spec == "mutex") {
    if (mut.empty()) return gen_mutex(o, false);
    if (mut == "mutex-no-exclusion") return gen_mutex(o, true);
  } else {
    throw ValidationError("unknown spec: " + o.spec);
  }
  throw ValidationError("unknown mutant '" + mut + "' for spec " + o.spec);
}

}  // namespace linviol
