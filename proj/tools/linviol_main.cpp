/* Command-line surface: check / oracle / match / gen / verify / explain. */
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "linviol/automata.hpp"
#include "linviol/generate.hpp"
#include "linviol/model.hpp"
#include "linviol/modelcheck.hpp"
#include "linviol/monitor.hpp"
#include "linviol/oracle.hpp"
#include "linviol/spec.hpp"
#include "linviol/trace_io.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

linviol::Execution read_input(const std::string& path) {
  if (path.empty() || path == "-") return linviol::read_trace(std::cin);
  return linviol::read_trace_file(path);
}

// Completes pending operations in place, warning on stderr so piped JSON
// output stays clean.
linviol::Execution completed_input(const std::string& path) {
  linviol::Completion c = linviol::complete(read_input(path));
  if (!c.completed.empty())
    std::cerr << "warning: completed " << c.completed.size()
              << " pending operation(s) using their recorded values\n";
  if (!c.dropped.empty())
    std::cerr << "warning: dropped " << c.dropped.size()
              << " pending operation(s) with unknown results\n";
  return std::move(c.execution);
}

// All analysis guarantees are stated for differentiated histories: for
// data-independent implementations it suffices to check those, so value
// reuse is rejected rather than repaired by renaming.
void require_differentiated(const linviol::History& h, const linviol::Specification& s) {
  if (linviol::is_differentiated(h, s.input_methods)) return;
  throw linviol::ValidationError(
      "trace is not differentiated: some value is inserted more than once; "
      "for data-independent implementations it suffices to check traces with "
      "distinct values, so rename the reused values and retry");
}

int data_value_count(const linviol::History& h) {
  std::set<linviol::Value> vals;
  for (const linviol::Operation& op : h.ops())
    if (linviol::is_data(op.value)) vals.insert(op.value);
  return static_cast<int>(vals.size());
}

std::string value_label(const linviol::History& h, linviol::Value v) {
  if (linviol::is_data(v)) return std::to_string(v);
  for (const linviol::Operation& op : h.ops())
    if (op.value == v) return op.name + " (" + op.method + ")";
  return std::to_string(v);
}

std::string op_label(const linviol::History& h, int i) {
  const linviol::Operation& op = h.ops()[i];
  std::string s = op.name + " " + op.method;
  if (linviol::is_data(op.value)) s += "(" + std::to_string(op.value) + ")";
  return s;
}

json violation_json(const linviol::History& h, const linviol::Violation& v) {
  json out;
  out["verdict"] = "violation";
  out["rule"] = v.rule;
  out["witnesses"] = v.witnesses;
  json ev = json::array();
  for (const linviol::Edge& e : v.evidence)
    ev.push_back({{"from_op", h.ops()[e.from].name}, {"to_op", h.ops()[e.to].name}});
  out["evidence"] = ev;
  if (!v.note.empty()) out["note"] = v.note;
  return out;
}

int run_check(const std::string& spec_name, const std::string& trace_path) {
  const linviol::Specification& s = linviol::spec_by_name(spec_name);
  linviol::Execution e = completed_input(trace_path);
  linviol::History h = linviol::History::of(e);
  require_differentiated(h, s);
  linviol::MonitorResult r = linviol::check(h, s);
  json out;
  if (r.linearizable) {
    out["verdict"] = "linearizable";
  } else {
    out = violation_json(h, *r.violation);
  }
  out["ops"] = h.size();
  out["values"] = data_value_count(h);
  std::cout << out.dump() << "\n";
  return r.linearizable ? kExitOk : kExitViolation;
}

int run_oracle(const std::string& spec_name, const std::string& trace_path, int max_ops) {
  const linviol::Specification& s = linviol::spec_by_name(spec_name);
  linviol::Execution e = completed_input(trace_path);
  linviol::History h = linviol::History::of(e);
  require_differentiated(h, s);
  linviol::OracleResult r = linviol::is_linearizable(h, s, max_ops);
  json out;
  out["ops"] = h.size();
  out["values"] = data_value_count(h);
  switch (r.verdict) {
    case linviol::Verdict::Yes:
      out["verdict"] = "linearizable";
      if (r.linearization) out["linearization"] = linviol::to_string(*r.linearization);
      std::cout << out.dump() << "\n";
      return kExitOk;
    case linviol::Verdict::No:
      out["verdict"] = "violation";
      std::cout << out.dump() << "\n";
      return kExitViolation;
    case linviol::Verdict::Inconclusive:
      out["verdict"] = "inconclusive";
      out["note"] = "history exceeds the exhaustive-search bound of " +
                    std::to_string(max_ops) + " operations";
      std::cout << out.dump() << "\n";
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

int run_match(const std::string& spec_name, const std::string& trace_path,
              const std::string& rule_name) {
  const linviol::Specification& s = linviol::spec_by_name(spec_name);
  linviol::Execution e = completed_input(trace_path);
  linviol::History h = linviol::History::of(e);
  require_differentiated(h, s);
  std::optional<linviol::MatchEvidence> m;
  if (rule_name.empty()) {
    m = linviol::match_execution(s, e);
  } else {
    m = linviol::match_execution(linviol::build(s, s.rule_index(rule_name)), e);
  }
  json out;
  out["ops"] = h.size();
  out["values"] = data_value_count(h);
  if (!m) {
    out["verdict"] = "linearizable";
    out["match"] = false;
    std::cout << out.dump() << "\n";
    return kExitOk;
  }
  out["verdict"] = "violation";
  out["match"] = true;
  out["rule"] = m->rule;
  out["branch"] = m->branch;
  json ren = json::object();
  for (const auto& [from, role] : m->renaming) ren[std::to_string(from)] = role;
  out["renaming"] = ren;
  out["dropped"] = m->dropped_ops;
  std::cout << out.dump() << "\n";
  return kExitViolation;
}

int run_gen(const linviol::GenOptions& o, const std::string& out_path) {
  linviol::Execution e = linviol::generate(o);
  if (out_path.empty() || out_path == "-") {
    linviol::write_trace(std::cout, e);
  } else {
    linviol::write_trace_file(out_path, e);
  }
  return kExitOk;
}

int run_verify(const std::string& model_path, const std::string& spec_name, int threads,
               bool unbounded, long max_states, const std::string& out_path) {
  linviol::Model m = linviol::load_model(model_path);
  if (!spec_name.empty() && spec_name != m.spec)
    throw linviol::ValidationError("model declares specification \"" + m.spec +
                                   "\" but --spec requested \"" + spec_name + "\"");
  const linviol::Specification& s = linviol::spec_by_name(m.spec);
  linviol::VerifyOptions opts;
  opts.threads = threads;
  opts.max_configs = max_states;
  linviol::Verification v =
      unbounded ? linviol::verify_coverability(m, s, opts) : linviol::verify_bounded(m, s, opts);
  json out;
  out["spec"] = m.spec;
  out["engine"] = unbounded ? "coverability" : "bounded";
  if (!unbounded) out["threads"] = threads;
  out["explored"] = v.explored;
  if (unbounded) {
    out["iterations"] = v.cover.iterations;
    out["basis"] = v.cover.basis_size;
    out["antichain"] = v.cover.antichain_ok;
  }
  if (!v.note.empty()) out["note"] = v.note;
  int code = kExitInconclusive;
  switch (v.verdict) {
    case linviol::Verdict::Yes:
      out["verdict"] = "linearizable";
      code = kExitOk;
      break;
    case linviol::Verdict::No:
      out["verdict"] = "violation";
      out["rule"] = v.rule;
      code = kExitViolation;
      break;
    case linviol::Verdict::Inconclusive:
      out["verdict"] = "inconclusive";
      code = kExitInconclusive;
      break;
  }
  std::cout << out.dump() << "\n";
  if (v.verdict == linviol::Verdict::No) {
    if (out_path.empty()) {
      linviol::write_trace(std::cout, v.counterexample);
    } else {
      linviol::write_trace_file(out_path, v.counterexample);
      std::cerr << "counterexample written to " << out_path << "\n";
    }
  }
  return code;
}

std::string render_expr(const linviol::Rule& r) {
  if (r.expr.empty()) return "(empty word)";
  std::string s;
  for (const linviol::ExprAtom& a : r.expr) {
    if (!s.empty()) s += " . ";
    switch (a.type) {
      case linviol::ExprAtom::Segment:
        s += "S" + std::to_string(a.seg);
        break;
      case linviol::ExprAtom::Literal:
        s += a.method + "(x)";
        break;
      case linviol::ExprAtom::Star:
        s += a.method + "(x)*";
        break;
    }
  }
  return s;
}

std::string render_guards(const linviol::Rule& r) {
  std::string s;
  for (const linviol::GuardAtom& g : r.guards) {
    if (!s.empty()) s += "; ";
    if (g.type == linviol::GuardAtom::Alphabet) {
      s += "S" + std::to_string(g.seg) + " over {";
      bool first = true;
      for (const std::string& m : g.methods) {
        if (!first) s += ", ";
        s += m;
        first = false;
      }
      s += "}";
    } else {
      s += "every " + g.method + " in S" + std::to_string(g.seg) + " matched";
    }
  }
  return s;
}

int run_explain(const std::string& spec_name, const std::string& trace_path,
                const std::string& emit_rule) {
  const linviol::Specification& s = linviol::spec_by_name(spec_name);
  if (!emit_rule.empty()) {
    const linviol::Rule& r = s.rule(emit_rule);
    std::cout << "rule " << r.name << ": " << render_expr(r);
    std::string g = render_guards(r);
    if (!g.empty()) std::cout << "   [" << g << "]";
    std::cout << "\n\n";
    std::cout << linviol::describe(linviol::build(s, s.rule_index(emit_rule)));
    return kExitOk;
  }
  if (trace_path.empty())
    throw linviol::ValidationError("explain needs a trace (or --emit-automaton <rule>)");
  linviol::Execution e = completed_input(trace_path);
  linviol::History h = linviol::History::of(e);
  require_differentiated(h, s);
  linviol::MonitorResult r = linviol::check(h, s);
  if (r.linearizable) {
    std::cout << "The trace is linearizable with respect to " << s.name << " ("
              << h.size() << " operations).\n";
    return kExitOk;
  }
  const linviol::Violation& v = *r.violation;
  std::cout << "The trace violates the " << v.rule << " class of " << s.name << ".\n";
  if (!v.witnesses.empty()) {
    std::cout << "Witness values: ";
    for (size_t i = 0; i < v.witnesses.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << value_label(h, v.witnesses[i]);
    }
    std::cout << "\n";
  }
  if (!v.note.empty()) std::cout << v.note << "\n";
  if (!v.evidence.empty()) {
    std::cout << "No linearization order can satisfy all of these constraints "
                 "at once:\n";
    for (const linviol::Edge& ed : v.evidence)
      std::cout << "  " << op_label(h, ed.from) << " before " << op_label(h, ed.to) << "\n";
  }
  return kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linviol: linearizability monitoring and model verification"};
  app.require_subcommand(1);

  std::string spec_name;
  std::string trace_path = "-";
  std::string rule_name;
  std::string model_path;
  std::string out_path;
  std::string emit_rule;
  int max_ops = 10;
  int threads = 2;
  bool unbounded = false;
  long max_states = 4'000'000;
  linviol::GenOptions gen_opts;

  const std::string spec_help = "specification: queue, stack, register or mutex";

  CLI::App* check = app.add_subcommand("check", "monitor a recorded trace");
  check->add_option("--spec", spec_name, spec_help)->required();
  check->add_option("trace", trace_path, "trace file (JSON lines; - for stdin)");

  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive linearizability search");
  oracle->add_option("--spec", spec_name, spec_help)->required();
  oracle->add_option("trace", trace_path, "trace file (JSON lines; - for stdin)");
  oracle->add_option("--max-ops", max_ops, "exhaustive-search operation bound");

  CLI::App* match = app.add_subcommand("match", "run the violation automata");
  match->add_option("--spec", spec_name, spec_help)->required();
  match->add_option("trace", trace_path, "trace file (JSON lines; - for stdin)");
  match->add_option("--rule", rule_name, "restrict to one rule's automaton");

  CLI::App* gen = app.add_subcommand("gen", "generate a trace");
  gen->add_option("--spec", gen_opts.spec, spec_help);
  gen->add_option("--mutant", gen_opts.mutant,
                  "buggy variant: queue-fifo-swap, queue-false-empty, "
                  "stack-lifo-swap, register-stale-read, mutex-no-exclusion");
  gen->add_option("--ops", gen_opts.ops, "number of operations");
  gen->add_option("--threads", gen_opts.threads, "concurrent operation bound");
  gen->add_option("--seed", gen_opts.seed, "scheduler seed");
  gen->add_option("--values", gen_opts.values,
                  "value pool size (0: all inserted values distinct)");
  gen->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "decide linearizability of a model");
  verify->add_option("--model", model_path, "model description file")->required();
  verify->add_option("--spec", spec_name, "expected specification (must match the model)");
  CLI::Option* t = verify->add_option("--threads", threads, "client thread count (bounded engine)");
  verify->add_flag("--unbounded", unbounded, "coverability engine, unbounded clients")
      ->excludes(t);
  verify->add_option("--max-states", max_states, "exploration / iteration cap");
  verify->add_option("--out", out_path, "counterexample trace file (default stdout)");

  CLI::App* explain = app.add_subcommand("explain", "narrate a violation");
  explain->add_option("--spec", spec_name, spec_help)->required();
  explain->add_option("trace", trace_path, "trace file (JSON lines; - for stdin)");
  explain->add_option("--emit-automaton", emit_rule,
                      "print the violation automaton of this rule and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return run_check(spec_name, trace_path);
    if (*oracle) return run_oracle(spec_name, trace_path, max_ops);
    if (*match) return run_match(spec_name, trace_path, rule_name);
    if (*gen) return run_gen(gen_opts, out_path);
    if (*verify) return run_verify(model_path, spec_name, threads, unbounded, max_states, out_path);
    if (*explain) return run_explain(spec_name, trace_path, emit_rule);
  } catch (const linviol::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const linviol::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
