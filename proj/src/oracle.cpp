/* oracle.cpp -- exhaustive linearizability decision procedures */
#include "linviol/oracle.hpp"

#include <algorithm>
#include <functional>

namespace linviol {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "inconclusive";
  }
}

namespace {

bool extend(const History& h, std::vector<int>& prefix, std::vector<bool>& used,
            const std::function<bool(const std::vector<int>&)>& f) {
  const int n = h.size();
  if (static_cast<int>(prefix.size()) == n) return f(prefix);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    bool minimal = true;
    for (int j = 0; j < n && minimal; ++j)
      if (!used[j] && j != i && h.hb(j, i)) minimal = false;
    if (!minimal) continue;
    used[i] = true;
    prefix.push_back(i);
    if (extend(h, prefix, used, f)) return true;
    prefix.pop_back();
    used[i] = false;
  }
  return false;
}

}  // namespace

bool for_each_extension(const History& h,
                        const std::function<bool(const std::vector<int>&)>& f) {
  std::vector<int> prefix;
  std::vector<bool> used(h.size(), false);
  return extend(h, prefix, used, f);
}

OracleResult is_linearizable(const History& h, const Specification& s, int max_ops) {
  if (h.size() > max_ops) return {Verdict::Inconclusive, std::nullopt};
  OracleResult res{Verdict::No, std::nullopt};
  for_each_extension(h, [&](const std::vector<int>& order) {
    Word u = word_of(h, order);
    if (member(u, s)) {
      res = {Verdict::Yes, std::move(u)};
      return true;
    }
    return false;
  });
  return res;
}

OracleResult is_linearizable_wrt(const History& h, const Specification& s, int r,
                                 int max_ops, std::optional<Value> witness) {
  if (h.size() > max_ops) return {Verdict::Inconclusive, std::nullopt};
  OracleResult res{Verdict::No, std::nullopt};
  for_each_extension(h, [&](const std::vector<int>& order) {
    Word u = word_of(h, order);
    for (const Match& m : matches_rule(u, s, r)) {
      if (witness && m.witness != *witness) continue;
      res = {Verdict::Yes, std::move(u)};
      return true;
    }
    return false;
  });
  return res;
}

std::vector<History> extended_projections(const History& h) {
  std::set<Value> ds = h.dom();
  std::vector<Value> dom(ds.begin(), ds.end());
  std::vector<int> ghosts;
  for (int i = 0; i < h.size(); ++i)
    if (is_ghost(h.ops()[i].value)) ghosts.push_back(i);
  const int nd = static_cast<int>(dom.size());
  const int ng = static_cast<int>(ghosts.size());
  std::vector<History> out;
  for (std::uint64_t md = 0; md < (1ull << nd); ++md)
    for (std::uint64_t mg = 0; mg < (1ull << ng); ++mg) {
      std::set<Value> keep;
      for (int i = 0; i < nd; ++i)
        if (md & (1ull << i)) keep.insert(dom[i]);
      std::vector<int> idx;
      for (int i = 0; i < h.size(); ++i) {
        Value v = h.ops()[i].value;
        if (is_data(v) ? keep.count(v) > 0 : false) idx.push_back(i);
      }
      for (int g = 0; g < ng; ++g)
        if (mg & (1ull << g)) idx.push_back(ghosts[g]);
      std::sort(idx.begin(), idx.end());
      out.push_back(h.restrict_to(idx));
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const History& a, const History& b) { return a.size() < b.size(); });
  return out;
}

ExcluResult check_exclu(const History& h, const Specification& s, int max_ops) {
  ExcluResult res;
  for (const History& p : extended_projections(h)) {
    if (p.size() == 0) continue;
    int r = last_of(p, s);
    OracleResult o = is_linearizable_wrt(p, s, r, max_ops);
    if (o.verdict == Verdict::Inconclusive) {
      res.verdict = Verdict::Inconclusive;
      continue;
    }
    if (o.no()) {
      res.holds = false;
      res.verdict = Verdict::No;
      res.failing = p;
      res.failing_rule = r;
      return res;
    }
  }
  return res;
}

OracleResult class_violation(const History& h, const Specification& s, int r,
                             int max_ops) {
  bool inconclusive = false;
  for (const History& p : extended_projections(h)) {
    if (p.size() == 0) continue;
    if (last_of(p, s) != r) continue;
    OracleResult o = is_linearizable_wrt(p, s, r, max_ops);
    if (o.verdict == Verdict::Inconclusive) {
      inconclusive = true;
      continue;
    }
    if (o.no()) return {Verdict::Yes, std::nullopt};  // violation found
  }
  return {inconclusive ? Verdict::Inconclusive : Verdict::No, std::nullopt};
}

}  // namespace linviol
