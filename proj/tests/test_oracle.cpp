#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "linviol/oracle.hpp"

using namespace linviol;
using testutil::exec_of;
using testutil::seq_execution;

TEST_CASE("sequential FIFO inversion is not linearizable, concurrent enqueues are") {
  History bad = History::of(seq_execution({{"Enq", 1}, {"Enq", 2}, {"Deq", 2}, {"Deq", 1}}));
  CHECK(is_linearizable(bad, queue_spec()).no());

  // the two enqueues overlap, so Enq(2) may linearize first
  History ok = History::of(exec_of({{"Enq", 1, 0, 2},
                                    {"Enq", 2, 1, 3},
                                    {"Deq", 2, 4, 5},
                                    {"Deq", 1, 6, 7}}));
  OracleResult r = is_linearizable(ok, queue_spec());
  REQUIRE(r.yes());
  REQUIRE(r.linearization.has_value());
  CHECK(member(*r.linearization, queue_spec()));
  CHECK(testutil::queue_legal(*r.linearization));
}

TEST_CASE("empty history and op budget") {
  CHECK(is_linearizable(History(), queue_spec()).yes());
  History h = History::of(seq_execution({{"Enq", 1}, {"Enq", 2}, {"Deq", 1}}));
  CHECK(is_linearizable(h, queue_spec(), 2).verdict == Verdict::Inconclusive);
  CHECK(is_linearizable(h, queue_spec(), 3).yes());
  CHECK(to_string(Verdict::Inconclusive) == std::string("inconclusive"));
}

TEST_CASE("oracle agrees with brute force over linear extensions") {
  std::mt19937 rng(101);
  for (const std::string& name : testutil::builtin_specs()) {
    const Specification& s = spec_by_name(name);
    for (int i = 0; i < 400; ++i) {
      History h = History::of(testutil::random_execution(rng, name, 6, 3));
      bool expect = testutil::brute_linearizable(h, name);
      OracleResult o = is_linearizable(h, s);
      REQUIRE(o.verdict != Verdict::Inconclusive);
      CHECK_MESSAGE(o.yes() == expect, name << " iteration " << i);
    }
  }
}

TEST_CASE("single-step linearizability with and without a pinned witness") {
  const Specification& q = queue_spec();
  History h = History::of(seq_execution({{"Enq", 1}, {"Enq", 2}, {"Deq", 1}, {"Deq", 2}}));
  CHECK(is_linearizable_wrt(h, q, q.rule_index("enq-deq")).yes());
  CHECK(is_linearizable_wrt(h, q, q.rule_index("deq-empty")).no());
  CHECK(is_linearizable_wrt(h, q, q.rule_index("enq-deq"), 10, 1).yes());
  CHECK(is_linearizable_wrt(h, q, q.rule_index("enq-deq"), 10, 2).no());
}

TEST_CASE("extended projections split on argless ops as well as values") {
  History h = History::of(seq_execution({{"Enq", 1}, {"DeqEmpty", kNoValue}, {"Deq", 1}}));
  auto ps = extended_projections(h);
  REQUIRE(ps.size() == 4);  // {1} x {ghost}
  CHECK(ps.front().size() == 0);
  CHECK(ps.back().size() == 3);
  for (size_t i = 1; i < ps.size(); ++i) CHECK(ps[i - 1].size() <= ps[i].size());
  // plain value projections keep the argless op in every element
  for (const History& p : value_projections(h)) CHECK(p.size() >= 1);
}

TEST_CASE("check_exclu matches full linearizability and reports a failing projection") {
  const Specification& q = queue_spec();
  History bad = History::of(seq_execution({{"Enq", 1}, {"Enq", 2}, {"Deq", 2}, {"Deq", 1}}));
  ExcluResult r = check_exclu(bad, q);
  CHECK_FALSE(r.holds);
  CHECK(r.verdict == Verdict::No);
  REQUIRE(r.failing.has_value());
  CHECK(r.failing_rule == last_of(*r.failing, q));
  CHECK(is_linearizable_wrt(*r.failing, q, r.failing_rule).no());

  // the buried-pop shape is caught through the unmatched-push rule class
  History buried = History::of(seq_execution({{"Push", 1}, {"Push", 2}, {"Pop", 1}}));
  CHECK_FALSE(check_exclu(buried, stack_spec()).holds);

  std::mt19937 rng(303);
  for (const std::string& name : testutil::builtin_specs()) {
    const Specification& s = spec_by_name(name);
    for (int i = 0; i < 200; ++i) {
      History h = History::of(testutil::random_execution(rng, name, 6, 3));
      CHECK_MESSAGE(check_exclu(h, s).holds == is_linearizable(h, s).yes(),
                    name << " iteration " << i);
    }
  }
}

TEST_CASE("class_violation isolates the rule class that fails") {
  const Specification& q = queue_spec();
  History covered = History::of(seq_execution({{"Enq", 1}, {"DeqEmpty", kNoValue}}));
  CHECK(class_violation(covered, q, q.rule_index("deq-empty")).yes());
  CHECK(class_violation(covered, q, q.rule_index("enq-deq")).no());

  History fifo = History::of(seq_execution({{"Enq", 1}, {"Enq", 2}, {"Deq", 2}, {"Deq", 1}}));
  CHECK(class_violation(fifo, q, q.rule_index("enq-deq")).yes());
  CHECK(class_violation(fifo, q, q.rule_index("deq-empty")).no());

  History fine = History::of(seq_execution({{"Enq", 1}, {"Deq", 1}}));
  for (int r = 0; r < static_cast<int>(q.rules.size()); ++r)
    CHECK(class_violation(fine, q, r).no());
}

TEST_CASE("for_each_extension enumerates hb-respecting orders, least first") {
  History h = History::of(exec_of({{"Enq", 1, 0, 2}, {"Enq", 2, 1, 3}}));
  std::vector<std::vector<int>> seen;
  bool stopped = for_each_extension(h, [&](const std::vector<int>& o) {
    seen.push_back(o);
    return false;
  });
  CHECK_FALSE(stopped);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == std::vector<int>{0, 1});
  CHECK(seen[1] == std::vector<int>{1, 0});

  History seq = History::of(seq_execution({{"Enq", 1}, {"Deq", 1}}));
  int count = 0;
  for_each_extension(seq, [&](const std::vector<int>&) { return ++count, false; });
  CHECK(count == 1);
  CHECK(for_each_extension(seq, [](const std::vector<int>&) { return true; }));
}
