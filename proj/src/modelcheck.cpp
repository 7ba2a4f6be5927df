/* Model language parsing and the two verification engines. */
#include "linviol/modelcheck.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "linviol/automata.hpp"

namespace linviol {

int Model::var_index(const std::string& n) const {
  for (int i = 0; i < int(vars.size()); i++)
    if (vars[i] == n) return i;
  return -1;
}

int Model::method_index(const std::string& n) const {
  for (int i = 0; i < int(methods.size()); i++)
    if (methods[i].name == n) return i;
  return -1;
}

namespace {

struct Tok {
  std::string s;
  int line;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Tok> tokenize(const std::string& text) {
  std::vector<Tok> out;
  int line = 1;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      line++;
      i++;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      i++;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') i++;
      continue;
    }
    if (word_char(c)) {
      size_t j = i;
      while (j < text.size() && word_char(text[j])) j++;
      out.push_back({text.substr(i, j - i), line});
      i = j;
      continue;
    }
    static const char* pairs[] = {":=", "==", "!=", ".."};
    bool got = false;
    for (const char* t : pairs) {
      if (text.compare(i, 2, t) == 0) {
        out.push_back({t, line});
        i += 2;
        got = true;
        break;
      }
    }
    if (got) continue;
    if (c == ':' || c == ';' || c == ',' || c == '=') {
      out.push_back({std::string(1, c), line});
      i++;
      continue;
    }
    throw ParseError("line " + std::to_string(line) + ": unexpected character '" +
                     std::string(1, c) + "'");
  }
  return out;
}

bool is_int_tok(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
           return std::isdigit(static_cast<unsigned char>(c));
         });
}

bool is_ident_tok(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), word_char);
}

bool is_keyword(const std::string& s) {
  return s == "spec" || s == "var" || s == "cell" || s == "method";
}

struct Parser {
  std::vector<Tok> toks;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    int line = pos < toks.size() ? toks[pos].line : (toks.empty() ? 1 : toks.back().line);
    throw ParseError("line " + std::to_string(line) + ": " + msg);
  }
  bool done() const { return pos >= toks.size(); }
  const std::string& peek() const {
    if (done()) fail("unexpected end of input");
    return toks[pos].s;
  }
  std::string next() {
    if (done()) fail("unexpected end of input");
    return toks[pos++].s;
  }
  void expect(const std::string& t) {
    if (done() || toks[pos].s != t) fail("expected '" + t + "'");
    pos++;
  }
  bool accept(const std::string& t) {
    if (!done() && toks[pos].s == t) {
      pos++;
      return true;
    }
    return false;
  }
  int next_int() {
    if (done() || !is_int_tok(peek())) fail("expected a number");
    return std::stoi(next());
  }
  std::string next_ident() {
    if (done() || !is_ident_tok(peek())) fail("expected a name");
    return next();
  }
};

}  // namespace

Model parse_model(const std::string& text) {
  Parser p{tokenize(text), 0};
  Model m;

  auto add_var = [&](const std::string& name, int max, int init) {
    if (m.var_index(name) >= 0) p.fail("duplicate variable '" + name + "'");
    m.vars.push_back(name);
    m.var_max.push_back(max);
    m.var_init.push_back(init);
  };
  auto var_of = [&](const std::string& name) {
    int vi = m.var_index(name);
    if (vi < 0) p.fail("unknown variable '" + name + "'");
    return vi;
  };

  while (!p.done()) {
    std::string kw = p.next();
    if (kw == "spec") {
      if (!m.spec.empty()) p.fail("duplicate spec declaration");
      m.spec = p.next_ident();
    } else if (kw == "var") {
      std::string name = p.next_ident();
      int lo = p.next_int();
      p.expect("..");
      int hi = p.next_int();
      p.expect("=");
      int init = p.next_int();
      if (lo != 0) p.fail("variable ranges must start at 0");
      if (hi < lo) p.fail("empty variable range");
      if (init < 0 || init > hi) p.fail("initial value out of range");
      add_var(name, hi, init);
    } else if (kw == "cell") {
      if (p.done() || !is_ident_tok(p.peek()) || is_keyword(p.peek()))
        p.fail("expected cell name");
      while (!p.done() && is_ident_tok(p.peek()) && !is_keyword(p.peek()))
        add_var(p.next(), kModelValues, 0);
    } else if (kw == "method") {
      Method meth;
      meth.name = p.next_ident();
      if (m.method_index(meth.name) >= 0) p.fail("duplicate method '" + meth.name + "'");
      std::string mode = p.next();
      if (mode == "arg")
        meth.mode = ValueMode::Arg;
      else if (mode == "out")
        meth.mode = ValueMode::Out;
      else if (mode == "obs")
        meth.mode = ValueMode::Obs;
      else
        p.fail("method mode must be arg, out, or obs");
      int max_loc = 0;
      while (!p.done() && is_int_tok(p.peek())) {
        MEdge e;
        e.loc = p.next_int();
        max_loc = std::max(max_loc, e.loc);
        p.expect(":");
        for (bool terminated = false; !terminated;) {
          std::string part = p.next();
          if (part == "assume") {
            do {
              Cond c;
              c.var = p.next_ident();
              int vi = var_of(c.var);
              std::string op = p.next();
              if (op == "==")
                c.equal = true;
              else if (op == "!=")
                c.equal = false;
              else
                p.fail("expected == or !=");
              if (p.accept("val")) {
                c.rhs_val = true;
              } else {
                c.rhs = p.next_int();
                if (c.rhs > m.var_max[vi])
                  p.fail("guard constant exceeds the range of '" + c.var + "'");
              }
              e.conds.push_back(std::move(c));
            } while (p.accept(","));
            p.expect(";");
          } else if (part == "set") {
            do {
              Assign a;
              a.var = p.next_ident();
              int vi = var_of(a.var);
              p.expect(":=");
              if (p.accept("val")) {
                a.rhs_val = true;
                if (m.var_max[vi] < kModelValues)
                  p.fail("variable '" + a.var + "' cannot hold operation values");
              } else if (!p.done() && is_int_tok(p.peek())) {
                a.rhs = p.next_int();
                if (a.rhs > m.var_max[vi])
                  p.fail("assigned constant exceeds the range of '" + a.var + "'");
              } else {
                a.rhs_var = true;
                a.rhs_name = p.next_ident();
                int si = var_of(a.rhs_name);
                if (m.var_max[si] > m.var_max[vi])
                  p.fail("assignment from '" + a.rhs_name + "' may exceed the range of '" +
                         a.var + "'");
              }
              e.assigns.push_back(std::move(a));
            } while (p.accept(","));
            p.expect(";");
          } else if (part == "return") {
            e.returns = true;
            terminated = true;
          } else if (part == "goto") {
            e.returns = false;
            e.goto_loc = p.next_int();
            max_loc = std::max(max_loc, e.goto_loc);
            terminated = true;
          } else {
            p.pos--;
            p.fail("expected assume, set, return, or goto");
          }
        }
        meth.edges.push_back(std::move(e));
      }
      if (meth.edges.empty()) p.fail("method '" + meth.name + "' has no edges");
      meth.num_locs = max_loc + 1;
      m.methods.push_back(std::move(meth));
    } else {
      p.pos--;
      p.fail("expected a declaration, got '" + kw + "'");
    }
  }
  if (m.spec.empty()) throw ParseError("missing spec declaration");
  if (m.methods.empty()) throw ParseError("model has no methods");
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

namespace {

void check_model(const Model& m, const Specification& s) {
  if (m.spec != s.name)
    throw ValidationError("model declares spec '" + m.spec + "', not '" + s.name + "'");
  for (const auto& meth : m.methods) {
    if (!s.methods.count(meth.name))
      throw ValidationError("method '" + meth.name + "' is not part of " + s.name);
    // argless methods carry no trace value; valued ones may declare their
    // value as a client argument or as a validated return guess
    bool ok;
    if (s.argless_methods.count(meth.name))
      ok = meth.mode == ValueMode::Obs;
    else if (s.input_methods.count(meth.name))
      ok = meth.mode == ValueMode::Arg;
    else
      ok = meth.mode == ValueMode::Arg || meth.mode == ValueMode::Out;
    if (!ok)
      throw ValidationError("method '" + meth.name + "' has the wrong value mode for " +
                            s.name);
  }
}

bool conds_hold(const Model& m, const MEdge& e, const std::vector<int>& vars, int val) {
  for (const auto& c : e.conds) {
    int lhs = vars[m.var_index(c.var)];
    int rhs = c.rhs_val ? val : c.rhs;
    if ((lhs == rhs) != c.equal) return false;
  }
  return true;
}

// assigns apply left to right, each reading the current state
std::vector<int> apply_assigns(const Model& m, const MEdge& e, std::vector<int> vars,
                               int val) {
  for (const auto& a : e.assigns) {
    int rhs = a.rhs_val ? val : a.rhs_var ? vars[m.var_index(a.rhs_name)] : a.rhs;
    vars[m.var_index(a.var)] = rhs;
  }
  return vars;
}

// turns a replayed action sequence into an execution; returns pending ops
// close in call order, obs methods carry no trace value
Execution trace_of(const Model& m,
                   const std::vector<std::tuple<Kind, int, int>>& acts) {
  Execution ex;
  std::map<std::pair<int, int>, std::deque<int>> pending;
  int nops = 0;
  for (const auto& [kind, mi, v] : acts) {
    const Method& meth = m.methods[mi];
    Value traced = meth.mode == ValueMode::Obs ? kNoValue : v;
    int op;
    if (kind == Kind::Call) {
      op = nops++;
      pending[{mi, v}].push_back(op);
    } else {
      auto& q = pending[{mi, v}];
      assert(!q.empty());
      op = q.front();
      q.pop_front();
    }
    ex.actions.push_back({kind, "o" + std::to_string(op), meth.name, traced});
  }
  return ex;
}

struct VecHash {
  size_t operator()(const std::vector<int>& v) const {
    size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

namespace {

struct BoundedResult {
  bool found = false;
  bool capped = false;
  long explored = 0;
  std::vector<std::tuple<Kind, int, int>> acts;  // witness calls and returns
};

// BFS over (vars, thread slots, automaton state set) for one branch. Running
// branches separately keeps the set component small, and configurations with
// an empty set are pruned outright: a dead run never revives, and acceptance
// needs a live one.
BoundedResult bounded_search(const Model& m, int T, const Nfa& n, long max_configs) {
  BoundedResult res;
  const int V = int(m.vars.size());
  using Slot = std::array<int, 3>;  // method (-1 idle), loc, value
  const Slot kIdle = {-1, 0, 0};

  auto encode = [&](const std::vector<int>& vars, std::vector<Slot> th,
                    const std::vector<int>& nfa) {
    std::sort(th.begin(), th.end());
    std::vector<int> key = vars;
    for (const auto& t : th) key.insert(key.end(), t.begin(), t.end());
    key.insert(key.end(), nfa.begin(), nfa.end());
    return key;
  };

  struct Stored {
    std::vector<int> key;
    long parent;
    int act_kind;  // 0 internal, 1 call, 2 ret
    int method;
    int value;
  };
  std::vector<Stored> configs;
  std::unordered_map<std::vector<int>, long, VecHash> seen;
  std::deque<long> work;
  long accept_at = -1;

  auto add = [&](std::vector<int> key, long parent, int ak, int mi, int v) {
    auto it = seen.find(key);
    if (it != seen.end()) return;
    long id = long(configs.size());
    seen.emplace(key, id);
    configs.push_back({std::move(key), parent, ak, mi, v});
    work.push_back(id);
    if (accept_at >= 0) return;
    const std::vector<int>& k = configs.back().key;
    bool quiescent = true;
    for (int t = 0; t < T; t++)
      if (k[V + 3 * t] != -1) quiescent = false;
    if (!quiescent) return;
    std::vector<int> nfa(k.begin() + V + 3 * T, k.end());
    if (n.any_accepting(nfa)) accept_at = id;
  };

  add(encode(m.var_init, std::vector<Slot>(T, kIdle), n.initial), -1, 0, -1, 0);

  while (!work.empty() && accept_at < 0) {
    if (long(configs.size()) >= max_configs) {
      res.capped = true;
      break;
    }
    long ci = work.front();
    work.pop_front();
    const std::vector<int> key = configs[ci].key;  // copy: configs may grow
    std::vector<int> vars(key.begin(), key.begin() + V);
    std::vector<Slot> th(T);
    for (int t = 0; t < T; t++)
      th[t] = {key[V + 3 * t], key[V + 3 * t + 1], key[V + 3 * t + 2]};
    std::vector<int> nfa(key.begin() + V + 3 * T, key.end());

    // calls go to one idle slot; slots are interchangeable
    int idle = -1;
    for (int t = 0; t < T && idle < 0; t++)
      if (th[t][0] == -1) idle = t;
    if (idle >= 0) {
      for (int mi = 0; mi < int(m.methods.size()); mi++) {
        for (int v = 1; v <= kModelValues; v++) {
          std::vector<int> nfa2 = n.step(nfa, Kind::Call, m.methods[mi].name, v);
          if (nfa2.empty()) continue;
          std::vector<Slot> th2 = th;
          th2[idle] = {mi, 0, v};
          add(encode(vars, th2, nfa2), ci, 1, mi, v);
        }
      }
    }

    for (int t = 0; t < T; t++) {
      if (th[t][0] < 0) continue;
      if (t > 0 && th[t] == th[t - 1]) continue;  // identical slots act identically
      const Method& meth = m.methods[th[t][0]];
      for (const MEdge& e : meth.edges) {
        if (e.loc != th[t][1]) continue;
        if (!conds_hold(m, e, vars, th[t][2])) continue;
        std::vector<int> vars2 = apply_assigns(m, e, vars, th[t][2]);
        if (e.returns) {
          std::vector<int> nfa2 = n.step(nfa, Kind::Ret, meth.name, th[t][2]);
          if (nfa2.empty()) continue;
          std::vector<Slot> th2 = th;
          th2[t] = kIdle;
          add(encode(vars2, th2, nfa2), ci, 2, th[t][0], th[t][2]);
        } else {
          std::vector<Slot> th2 = th;
          th2[t][1] = e.goto_loc;
          add(encode(vars2, th2, nfa), ci, 0, th[t][0], th[t][2]);
        }
      }
    }
  }

  res.explored = long(configs.size());
  if (accept_at >= 0) {
    res.found = true;
    std::vector<long> chain;
    for (long i = accept_at; i >= 0; i = configs[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    for (long i : chain) {
      const Stored& sc = configs[i];
      if (sc.act_kind == 0) continue;
      res.acts.emplace_back(sc.act_kind == 1 ? Kind::Call : Kind::Ret, sc.method, sc.value);
    }
  }
  return res;
}

}  // namespace

Verification verify_bounded(const Model& m, const Specification& s,
                            const VerifyOptions& opts) {
  check_model(m, s);
  Verification r;
  const int T = std::max(1, opts.threads);
  bool capped = false;
  bool found = false;
  size_t best_len = 0;
  for (const ViolationAutomaton& a : build_all(s)) {
    for (const Branch& b : a.branches) {
      BoundedResult br = bounded_search(m, T, b.nfa, opts.max_configs);
      r.explored += br.explored;
      capped = capped || br.capped;
      if (br.found && (!found || br.acts.size() < best_len)) {
        found = true;
        best_len = br.acts.size();
        r.counterexample = trace_of(m, br.acts);
        r.rule = a.rule + " (" + b.name + ")";
      }
    }
  }
  if (found) {
    r.verdict = Verdict::No;
  } else if (capped) {
    r.verdict = Verdict::Inconclusive;
    r.note = "exploration cap reached after " + std::to_string(r.explored) + " configurations";
  } else {
    r.verdict = Verdict::Yes;
    r.note = "state space exhausted for " + std::to_string(T) + " threads";
  }
  return r;
}

namespace {

// ---- coverability ----------------------------------------------------------

struct Trans {
  std::vector<std::pair<int, int>> in;   // (place, count)
  std::vector<std::pair<int, int>> out;  // (place, count)
  int act_kind = 0;                      // 0 silent, 1 call, 2 ret
  int method = -1;
  int value = 0;
};

struct Net {
  int nplaces = 0;
  std::vector<Trans> transitions;
  // place -> one-token family id, or -1. Each shared variable's value places
  // and the automaton's state places form a family that holds exactly one
  // token in every reachable marking; transitions preserve the family sums.
  std::vector<int> family;
  int nfamilies = 0;
};

void bump(std::vector<std::pair<int, int>>& side, int place) {
  for (auto& [p, c] : side)
    if (p == place) {
      c++;
      return;
    }
  side.emplace_back(place, 1);
}

struct NetLayout {
  int idle = 0;
  std::vector<int> var_base;              // var -> first place (value 0)
  std::vector<int> th_base;               // method -> first place
  int aut_base = 0;
  int nplaces = 0;

  NetLayout(const Model& m, const Nfa& n) {
    int next = 1;
    for (size_t v = 0; v < m.vars.size(); v++) {
      var_base.push_back(next);
      next += m.var_max[v] + 1;
    }
    for (const auto& meth : m.methods) {
      th_base.push_back(next);
      next += meth.num_locs * kModelValues;
    }
    aut_base = next;
    nplaces = next + int(n.states.size());
  }
  int var(int v, int k) const { return var_base[v] + k; }
  int th(const Model& m, int mi, int loc, int val) const {
    (void)m;
    return th_base[mi] + loc * kModelValues + (val - 1);
  }
  int aut(int s) const { return aut_base + s; }
};

std::set<std::tuple<int, std::string, int>> nfa_alphabet(const Nfa& n) {
  std::set<std::tuple<int, std::string, int>> out;
  for (const auto& st : n.states) {
    for (const auto& [sym, t] : st.edges)
      out.emplace(sym.kind == Kind::Call ? 0 : 1, sym.method, sym.value);
    for (const auto& sym : st.kills)
      out.emplace(sym.kind == Kind::Call ? 0 : 1, sym.method, sym.value);
  }
  return out;
}

// Builds the vector addition system for one model and one branch automaton.
// The automaton runs as a single guessed token: symbols in its alphabet are
// expanded per automaton state so caps and kills stay binding; symbols it
// never mentions leave the token alone.
Net build_net(const Model& m, const Nfa& n, const NetLayout& L) {
  Net net;
  net.nplaces = L.nplaces;
  net.family.assign(L.nplaces, -1);
  int fam = 0;
  for (size_t vi = 0; vi < m.vars.size(); vi++, fam++)
    for (int k = 0; k <= m.var_max[vi]; k++) net.family[L.var(int(vi), k)] = fam;
  for (int st = 0; st < int(n.states.size()); st++) net.family[L.aut(st)] = fam;
  net.nfamilies = fam + 1;
  auto alpha = nfa_alphabet(n);
  auto in_alpha = [&](Kind k, const std::string& name, int v) {
    return alpha.count({k == Kind::Call ? 0 : 1, name, v}) != 0;
  };

  {
    Trans spawn;
    bump(spawn.out, L.idle);
    net.transitions.push_back(std::move(spawn));
  }

  auto add_aut_variants = [&](Trans base, Kind k, const std::string& name, int v) {
    if (!in_alpha(k, name, v)) {
      net.transitions.push_back(std::move(base));
      return;
    }
    for (int st = 0; st < int(n.states.size()); st++) {
      std::vector<int> targets = n.step({st}, k, name, v);
      for (int tgt : targets) {
        Trans t = base;
        bump(t.in, L.aut(st));
        bump(t.out, L.aut(tgt));
        net.transitions.push_back(std::move(t));
      }
    }
  };

  for (int mi = 0; mi < int(m.methods.size()); mi++) {
    const Method& meth = m.methods[mi];
    for (int v = 1; v <= kModelValues; v++) {
      Trans call;
      call.act_kind = 1;
      call.method = mi;
      call.value = v;
      bump(call.in, L.idle);
      bump(call.out, L.th(m, mi, 0, v));
      add_aut_variants(std::move(call), Kind::Call, meth.name, v);

      for (const MEdge& e : meth.edges) {
        // variables the edge reads or writes; all others stay untouched
        std::vector<int> refs;
        auto ref = [&](const std::string& name) {
          int vi = m.var_index(name);
          if (std::find(refs.begin(), refs.end(), vi) == refs.end()) refs.push_back(vi);
        };
        for (const auto& c : e.conds) ref(c.var);
        for (const auto& a : e.assigns) {
          ref(a.var);
          if (a.rhs_var) ref(a.rhs_name);
        }

        std::vector<int> vals(refs.size(), 0);
        for (bool more = true; more;) {
          // conds and assigns only read referenced vars, the rest stay -1
          std::vector<int> shadow(m.vars.size(), -1);
          for (size_t i = 0; i < refs.size(); i++) shadow[refs[i]] = vals[i];
          if (conds_hold(m, e, shadow, v)) {
            std::vector<int> updated = apply_assigns(m, e, shadow, v);
            Trans t;
            bump(t.in, L.th(m, mi, e.loc, v));
            for (size_t i = 0; i < refs.size(); i++) {
              bump(t.in, L.var(refs[i], vals[i]));
              bump(t.out, L.var(refs[i], updated[refs[i]]));
            }
            if (e.returns) {
              bump(t.out, L.idle);
              t.act_kind = 2;
              t.method = mi;
              t.value = v;
              add_aut_variants(std::move(t), Kind::Ret, meth.name, v);
            } else {
              bump(t.out, L.th(m, mi, e.goto_loc, v));
              net.transitions.push_back(std::move(t));
            }
          }
          // next valuation of the referenced vars
          more = false;
          for (size_t i = 0; i < refs.size(); i++) {
            if (vals[i] < m.var_max[refs[i]]) {
              vals[i]++;
              std::fill(vals.begin(), vals.begin() + i, 0);
              more = true;
              break;
            }
          }
        }
      }
    }
  }
  return net;
}

bool leq(const std::vector<int>& a, const std::vector<int>& b) {
  for (size_t i = 0; i < a.size(); i++)
    if (a[i] > b[i]) return false;
  return true;
}

struct BackNode {
  std::vector<int> m;
  long parent;
  int trans;
  bool removed = false;
};

struct CoverOutcome {
  bool coverable = false;
  long witness = -1;  // basis node covered by the initial marking
  std::vector<int> init;
  CoverStats stats;
  std::vector<BackNode> nodes;
};

// backward coverability with a minimized basis of the upward-closed pre* set
CoverOutcome cover_query(const Net& net, const std::vector<std::vector<int>>& inits,
                         const std::vector<std::vector<int>>& targets, long max_iters) {
  CoverOutcome out;
  std::vector<BackNode>& nodes = out.nodes;
  std::deque<long> work;

  auto insert = [&](std::vector<int> mk, long parent, int trans) {
    // A marking that asks for two tokens in a one-token family is never
    // below a reachable marking, and neither is anything in its backward
    // cone (transitions preserve the family sums), so drop it outright.
    std::vector<int> fsum(net.nfamilies, 0);
    for (int p = 0; p < net.nplaces; p++) {
      if (net.family[p] < 0 || mk[p] == 0) continue;
      fsum[net.family[p]] += mk[p];
      if (fsum[net.family[p]] > 1) return;
    }
    for (const auto& n : nodes)
      if (!n.removed && leq(n.m, mk)) return;
    for (auto& n : nodes)
      if (!n.removed && leq(mk, n.m)) n.removed = true;
    long id = long(nodes.size());
    nodes.push_back({std::move(mk), parent, trans, false});
    work.push_back(id);
    if (!out.coverable) {
      for (const auto& init : inits) {
        if (leq(nodes[id].m, init)) {
          out.coverable = true;
          out.witness = id;
          out.init = init;
          break;
        }
      }
    }
  };

  for (const auto& t : targets) insert(t, -1, -1);

  out.stats.terminated = true;
  while (!work.empty() && !out.coverable) {
    if (++out.stats.iterations > max_iters) {
      out.stats.terminated = false;
      break;
    }
    long id = work.front();
    work.pop_front();
    if (nodes[id].removed) continue;
    const std::vector<int> mk = nodes[id].m;  // copy: nodes may grow
    for (int ti = 0; ti < int(net.transitions.size()); ti++) {
      const Trans& t = net.transitions[ti];
      std::vector<int> pre = mk;
      for (const auto& [p, c] : t.out) pre[p] = std::max(0, pre[p] - c);
      for (const auto& [p, c] : t.in) pre[p] += c;
      insert(std::move(pre), id, ti);
    }
  }

  for (const auto& n : nodes)
    if (!n.removed) out.stats.basis_size++;
  // the minimized basis must stay an antichain
  for (size_t i = 0; i < nodes.size() && out.stats.antichain_ok; i++) {
    if (nodes[i].removed) continue;
    for (size_t j = i + 1; j < nodes.size(); j++) {
      if (nodes[j].removed) continue;
      if (leq(nodes[i].m, nodes[j].m) || leq(nodes[j].m, nodes[i].m)) {
        out.stats.antichain_ok = false;
        break;
      }
    }
  }

  return out;
}

// forward replay of the backward chain: from a marking covering node w, each
// recorded transition stays enabled and re-covers the parent
std::vector<std::tuple<Kind, int, int>> replay(const Net& net, const CoverOutcome& out) {
  std::vector<std::tuple<Kind, int, int>> acts;
  std::vector<int> mk = out.init;
  for (long i = out.witness; out.nodes[i].trans >= 0; i = out.nodes[i].parent) {
    const Trans& t = net.transitions[out.nodes[i].trans];
    for (const auto& [p, c] : t.in) {
      assert(mk[p] >= c);
      mk[p] -= c;
    }
    for (const auto& [p, c] : t.out) mk[p] += c;
    if (t.act_kind != 0)
      acts.emplace_back(t.act_kind == 1 ? Kind::Call : Kind::Ret, t.method, t.value);
  }
  return acts;
}

}  // namespace

Verification verify_coverability(const Model& m, const Specification& s,
                                 const VerifyOptions& opts) {
  check_model(m, s);
  Verification r;
  r.cover.terminated = true;
  long budget = opts.max_configs;

  for (const auto& a : build_all(s)) {
    for (const auto& b : a.branches) {
      if (!b.prefix_sound) continue;
      NetLayout L(m, b.nfa);
      Net net = build_net(m, b.nfa, L);

      std::vector<std::vector<int>> inits;
      for (int s0 : b.nfa.initial) {
        std::vector<int> init(L.nplaces, 0);
        for (size_t v = 0; v < m.vars.size(); v++) init[L.var(int(v), m.var_init[v])] = 1;
        init[L.aut(s0)] = 1;
        inits.push_back(std::move(init));
      }
      std::vector<std::vector<int>> targets;
      for (int st = 0; st < int(b.nfa.states.size()); st++) {
        if (!b.nfa.states[st].accepting) continue;
        std::vector<int> t(L.nplaces, 0);
        t[L.aut(st)] = 1;
        targets.push_back(std::move(t));
      }
      if (targets.empty()) continue;

      CoverOutcome out = cover_query(net, inits, targets, budget);
      r.cover.iterations += out.stats.iterations;
      r.cover.basis_size += out.stats.basis_size;
      r.cover.antichain_ok = r.cover.antichain_ok && out.stats.antichain_ok;
      budget -= out.stats.iterations;
      r.explored = r.cover.iterations;

      if (!out.stats.terminated) {
        r.cover.terminated = false;
        r.verdict = Verdict::Inconclusive;
        r.note = "iteration cap reached on " + a.rule + " (" + b.name + ")";
        return r;
      }
      if (out.coverable) {
        std::vector<std::tuple<Kind, int, int>> acts = replay(net, out);
        r.counterexample = trace_of(m, acts);
        r.rule = a.rule + " (" + b.name + ")";
        r.verdict = Verdict::No;
        return r;
      }
    }
  }
  r.verdict = Verdict::Yes;
  r.note = "no violation pattern coverable with unbounded concurrent operations";
  return r;
}

}  // namespace linviol
