// Acceptance gate: one pass/FAIL line per criterion, nonzero exit on failure.
#include <chrono>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "linviol/automata.hpp"
#include "linviol/model.hpp"
#include "linviol/modelcheck.hpp"
#include "linviol/monitor.hpp"
#include "linviol/oracle.hpp"
#include "linviol/spec.hpp"

using namespace linviol;

namespace {

bool g_all_ok = true;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int n, bool ok, const std::string& desc, double secs) {
  std::printf("criterion %d: %s - %s (%.1fs)\n", n, ok ? "pass" : "FAIL", desc.c_str(), secs);
  std::fflush(stdout);
  if (!ok) g_all_ok = false;
}

// exists a linear extension of h derivable with rules 0..max_rule
bool extension_in_prefix(const History& h, const Specification& s, int max_rule) {
  return for_each_extension(h, [&](const std::vector<int>& order) {
    return member(word_of(h, order), s, max_rule);
  });
}

History remove_value(const History& h, Value x) {
  if (is_data(x)) {
    std::set<Value> keep = h.dom();
    keep.erase(x);
    return h.project(keep);
  }
  std::vector<int> keep;
  for (int i = 0; i < h.size(); ++i)
    if (h.ops()[i].value != x) keep.push_back(i);
  return h.restrict_to(keep);
}

// monitor verdict equals exhaustive search on random histories
void criterion1() {
  auto t0 = Clock::now();
  std::mt19937 rng(1001);
  bool ok = true;
  for (const std::string& name : testutil::builtin_specs()) {
    const Specification& s = spec_by_name(name);
    for (int i = 0; i < 2000 && ok; ++i) {
      History h = History::of(testutil::random_execution(rng, name, 7, 4));
      OracleResult o = is_linearizable(h, s);
      if (o.verdict == Verdict::Inconclusive) ok = false;
      if (check(h, s).linearizable != o.yes()) ok = false;
    }
  }
  double dt = seconds_since(t0);
  ok = ok && dt < 300.0;
  report(1, ok, "monitor agrees with exhaustive search on 2000 random histories per structure",
         dt);
}

// a fixed seven-event queue word is derivable and classified by its last rule
void criterion2() {
  auto t0 = Clock::now();
  const Specification& q = queue_spec();
  using testutil::ev;
  Word w = {ev("Enq", 3),      ev("Deq", 3), ev("DeqEmpty", ghost_for(0)), ev("Enq", 2),
            ev("Enq", 1),      ev("Deq", 2), ev("Deq", 1)};
  int want = q.rule_index("deq-empty");
  bool ok = member(w, q);
  auto d = derivation(w, q);
  ok = ok && d.has_value() && !d->empty() && d->back().rule == want;
  ok = ok && last_of(w, q) == want;
  report(2, ok, "seven-event queue word is derivable and its derivation ends in deq-empty",
         seconds_since(t0));
}

Execution empty_cover_ladder(int n) {
  Execution e;
  auto call = [&e](const std::string& op, const std::string& m, Value v) {
    e.actions.push_back({Kind::Call, op, m, v});
  };
  auto ret = [&e](const std::string& op, const std::string& m, Value v) {
    e.actions.push_back({Kind::Ret, op, m, v});
  };
  call("e1", "Enq", 1);
  ret("e1", "Enq", 1);
  call("de", "DeqEmpty", kNoValue);
  for (int i = 1; i < n; ++i) {
    std::string ei = "e" + std::to_string(i + 1);
    std::string di = "d" + std::to_string(i);
    call(ei, "Enq", i + 1);
    ret(ei, "Enq", i + 1);
    call(di, "Deq", i);
    ret(di, "Deq", i);
  }
  ret("de", "DeqEmpty", kNoValue);
  std::string dn = "d" + std::to_string(n);
  call(dn, "Deq", n);
  ret(dn, "Deq", n);
  return e;
}

// the n-pair covered-empty ladder is flagged with an (n+1)-edge cycle
void criterion3() {
  auto t0 = Clock::now();
  const Specification& q = queue_spec();
  bool ok = true;
  for (int n = 1; n <= 8 && ok; ++n) {
    MonitorResult r = check(History::of(empty_cover_ladder(n)), q);
    ok = !r.linearizable && r.violation.has_value() && r.violation->rule == "deq-empty" &&
         static_cast<int>(r.violation->evidence.size()) == n + 1;
  }
  double dt = seconds_since(t0);
  ok = ok && dt < 1.0;
  report(3, ok, "covered-empty ladder flagged for n=1..8 with n+1 evidence edges", dt);
}

// two-value projections decide enq-deq linearizability of matched histories
void criterion4() {
  auto t0 = Clock::now();
  std::mt19937 rng(1004);
  const Specification& q = queue_spec();
  int r = q.rule_index("enq-deq");
  bool ok = true;
  for (int i = 0; i < 500 && ok; ++i) {
    History h = History::of(testutil::random_matched_queue(rng, 5));
    OracleResult full = is_linearizable(h, q);
    bool pairwise = true;
    std::set<Value> ds = h.dom();
    std::vector<Value> dom(ds.begin(), ds.end());
    for (size_t a = 0; a < dom.size() && pairwise; ++a)
      for (size_t b = a; b < dom.size() && pairwise; ++b)
        pairwise = is_linearizable_wrt(h.project({dom[a], dom[b]}), q, r).yes();
    ok = full.verdict != Verdict::Inconclusive && pairwise == full.yes();
  }
  report(4, ok, "pairwise projections decide enq-deq linearizability on 500 matched histories",
         seconds_since(t0));
}

// each rule automaton matches exactly the oracle's per-rule violation class
void criterion5() {
  auto t0 = Clock::now();
  std::mt19937 rng(1005);
  bool ok = true;
  for (const std::string& name : {std::string("queue"), std::string("stack")}) {
    const Specification& s = spec_by_name(name);
    std::vector<ViolationAutomaton> autos = build_all(s);
    for (int i = 0; i < 1000 && ok; ++i) {
      Execution e = testutil::random_execution(rng, name, 7, 4);
      History h = History::of(e);
      for (int r = 0; r < static_cast<int>(s.rules.size()) && ok; ++r) {
        bool matched = match_execution(autos[r], e).has_value();
        OracleResult c = class_violation(h, s, r);
        if (c.verdict == Verdict::Inconclusive) ok = false;
        if (matched != c.yes()) ok = false;
      }
    }
  }
  report(5, ok, "queue and stack rule automata match the per-rule violation classes "
                "on 1000 executions each",
         seconds_since(t0));
}

bool lemma_elasticity(std::mt19937& rng, const std::string& name, const Specification& s) {
  for (int i = 0; i < 500; ++i) {
    Word w = testutil::random_legal_word(rng, name, 8, 4);
    if (!member(w, s)) return false;
    for (const std::set<Value>& d : testutil::subsets_of(testutil::word_values(w)))
      if (!member(testutil::word_project(w, d), s)) return false;
  }
  return true;
}

bool lemma_characterization_seq(std::mt19937& rng, const std::string& name,
                                const Specification& s) {
  for (int i = 0; i < 500; ++i) {
    Word u = (i % 2 == 0) ? testutil::random_word(rng, name, 7, 4)
                          : testutil::random_legal_word(rng, name, 7, 4);
    bool lhs = member(u, s);
    bool rhs = true;
    for (const std::set<Value>& d : testutil::subsets_of(testutil::word_values(u))) {
      Word p = testutil::word_project(u, d);
      bool any = false;
      for (int r = 0; r < static_cast<int>(s.rules.size()) && !any; ++r)
        any = !matches_rule(p, s, r).empty();
      if (!any) {
        rhs = false;
        break;
      }
    }
    if (lhs != rhs) return false;
  }
  return true;
}

bool lemma_characterization_po(std::mt19937& rng, const std::string& name,
                               const Specification& s) {
  const int nrules = static_cast<int>(s.rules.size());
  for (int i = 0; i < 500; ++i) {
    History h = History::of(testutil::random_execution(rng, name, 5, 3));
    // per projection, the smallest rule whose matching set admits it
    std::vector<int> min_rule;
    for (const History& p : extended_projections(h)) {
      int mi = INT_MAX;
      for (int r = 0; r < nrules; ++r) {
        if (is_linearizable_wrt(p, s, r).yes()) {
          mi = r;
          break;
        }
      }
      min_rule.push_back(mi);
    }
    for (int j = 0; j < nrules; ++j) {
      bool rhs = true;
      for (int mi : min_rule)
        if (mi > j) rhs = false;
      bool lhs = extension_in_prefix(h, s, j);
      if (lhs != rhs) return false;
    }
  }
  return true;
}

bool lemma_exclu(std::mt19937& rng, const std::string& name, const Specification& s) {
  for (int i = 0; i < 500; ++i) {
    History h = History::of(testutil::random_execution(rng, name, 7, 4));
    OracleResult o = is_linearizable(h, s);
    if (o.verdict == Verdict::Inconclusive) return false;
    if (check_exclu(h, s).holds != o.yes()) return false;
  }
  return true;
}

// witness-removal: a one-step match plus a derivable remainder lifts to the
// whole history, counted over premise-satisfying instances
bool lemma_monoobs(std::mt19937& rng, const std::string& name, const Specification& s,
                   int* hits_out) {
  const int nrules = static_cast<int>(s.rules.size());
  int hits = 0;
  for (int iter = 0; iter < 20000 && hits < 500; ++iter) {
    History h = History::of(testutil::random_execution(rng, name, 6, 3));
    // one sweep over the extensions collects every one-step (rule, witness)
    // pair and the prefix derivability of the whole history
    std::vector<std::set<Value>> premise(nrules);
    std::vector<char> prefix(nrules, 0);
    for_each_extension(h, [&](const std::vector<int>& order) {
      Word w = word_of(h, order);
      for (int r = 0; r < nrules; ++r) {
        for (const Match& m : matches_rule(w, s, r))
          if (m.witness != kNoValue) premise[r].insert(m.witness);
        if (!prefix[r] && member(w, s, r)) prefix[r] = 1;
      }
      return false;
    });
    for (int r = 0; r < nrules; ++r) {
      for (Value x : premise[r]) {
        if (!extension_in_prefix(remove_value(h, x), s, r)) continue;
        ++hits;
        if (!prefix[r]) {
          *hits_out = hits;
          return false;
        }
      }
    }
  }
  *hits_out = hits;
  return hits >= 500;
}

// closure, decomposition, prefix, per-projection and witness-removal lemmas
void criterion6() {
  auto t0 = Clock::now();
  bool ok = true;
  std::string note;
  const std::vector<std::string>& names = testutil::builtin_specs();
  for (size_t ni = 0; ni < names.size(); ++ni) {
    const std::string& name = names[ni];
    const Specification& s = spec_by_name(name);
    std::mt19937 rng(2000 + static_cast<int>(ni));
    if (!lemma_elasticity(rng, name, s)) {
      ok = false;
      note = "projection closure failed on " + name;
      break;
    }
    if (!lemma_characterization_seq(rng, name, s)) {
      ok = false;
      note = "sequential characterization failed on " + name;
      break;
    }
    if (!lemma_characterization_po(rng, name, s)) {
      ok = false;
      note = "prefix characterization failed on " + name;
      break;
    }
    if (!lemma_exclu(rng, name, s)) {
      ok = false;
      note = "per-projection equivalence failed on " + name;
      break;
    }
    int hits = 0;
    if (!lemma_monoobs(rng, name, s, &hits)) {
      ok = false;
      note = "witness removal failed on " + name + " after " + std::to_string(hits) + " hits";
      break;
    }
  }
  std::string desc = "closure, characterization, prefix, per-projection and witness-removal "
                     "properties hold on 500 instances per structure";
  if (!ok) desc += "; " + note;
  report(6, ok, desc, seconds_since(t0));
}

struct ModelCase {
  std::string file;
  bool expect_linearizable;
};

const std::vector<ModelCase>& model_cases() {
  static const std::vector<ModelCase> cases = {
      {"queue_ref", true},           {"stack_ref", true},
      {"register_ref", true},        {"mutex_ref", true},
      {"queue_fifo_swap", false},    {"queue_false_empty", false},
      {"stack_lifo_swap", false},    {"register_stale_read", false},
      {"mutex_no_exclusion", false},
  };
  return cases;
}

// bounded search decides every bundled model, counterexamples replay as
// monitor violations, and the coverability engine agrees
void criterion7_and_8() {
  auto t0 = Clock::now();
  const char* md = std::getenv("LINVIOL_MODELS");
  bool ok7 = md != nullptr;
  bool ok8 = md != nullptr;
  std::vector<CoverStats> stats;
  if (md) {
    for (const ModelCase& mc : model_cases()) {
      Model m = load_model(std::string(md) + "/" + mc.file + ".model");
      const Specification& s = spec_by_name(m.spec);
      auto tb = Clock::now();
      Verification b = verify_bounded(m, s);
      if (seconds_since(tb) >= 60.0) ok7 = false;
      if (mc.expect_linearizable) {
        if (b.verdict != Verdict::Yes) ok7 = false;
      } else {
        if (b.verdict != Verdict::No) ok7 = false;
        Completion c = complete(b.counterexample);
        History h = History::of(c.execution);
        if (check(h, s).linearizable) ok7 = false;
      }
      Verification cov = verify_coverability(m, s);
      if (cov.verdict != b.verdict) ok7 = false;
      stats.push_back(cov.cover);
    }
    for (const CoverStats& cs : stats)
      if (!cs.terminated || !cs.antichain_ok) ok8 = false;
  }
  double dt = seconds_since(t0);
  report(7, ok7,
         "reference models verify linearizable, mutants yield monitor-confirmed "
         "counterexamples, both engines agree",
         dt);
  report(8, ok8, "backward coverability terminates with an antichain basis on every model",
         seconds_since(t0) - dt);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7_and_8();
  return g_all_ok ? 0 : 1;
}
