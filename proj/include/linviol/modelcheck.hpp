/* modelcheck.hpp -- finite-state implementation models and verification engines */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "linviol/model.hpp"
#include "linviol/oracle.hpp"
#include "linviol/spec.hpp"

namespace linviol {

// distinct data values used during verification; with renaming closure this
// suffices for all candidate shapes of the built-in specifications
inline constexpr int kModelValues = 3;

// how a method treats its operation value
enum class ValueMode {
  Arg,  // chosen by the caller, recorded on the call action
  Out,  // guessed at the call, validated by the method body before return
  Obs,  // internal tag only; the trace carries no value
};

// guard atom: VAR ==/!= (constant | operation value)
struct Cond {
  std::string var;
  bool equal = true;
  bool rhs_val = false;
  int rhs = 0;
};

// update atom: VAR := constant | operation value | other VAR
struct Assign {
  std::string var;
  bool rhs_val = false;
  bool rhs_var = false;
  int rhs = 0;
  std::string rhs_name;
};

// one guarded atomic step of a method body
struct MEdge {
  int loc = 0;
  std::vector<Cond> conds;
  std::vector<Assign> assigns;
  bool returns = false;
  int goto_loc = 0;
};

struct Method {
  std::string name;
  ValueMode mode = ValueMode::Arg;
  int num_locs = 1;
  std::vector<MEdge> edges;
};

struct Model {
  std::string spec;  // specification the model claims to implement
  std::vector<std::string> vars;
  std::vector<int> var_init;
  std::vector<int> var_max;
  std::vector<Method> methods;

  int var_index(const std::string& n) const;
  int method_index(const std::string& n) const;
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

Model parse_model(const std::string& text);
Model load_model(const std::string& path);

struct VerifyOptions {
  int threads = 2;               // bounded engine only
  long max_configs = 4'000'000;  // exploration / iteration cap
};

struct CoverStats {
  long iterations = 0;
  long basis_size = 0;
  bool antichain_ok = true;
  bool terminated = false;
};

struct Verification {
  Verdict verdict = Verdict::Inconclusive;
  Execution counterexample;  // may contain pending operations
  std::string rule;          // violated class, when verdict is No
  long explored = 0;
  CoverStats cover;
  std::string note;
};

// explicit-state search over a fixed number of client threads; complete for
// that thread count, violations judged on quiescent configurations
Verification verify_bounded(const Model& m, const Specification& s,
                            const VerifyOptions& opts = {});

// unbounded clients via coverability of a vector addition system; verdict No
// is definite, verdict Yes means no prefix-sound violation pattern is
// reachable with any number of concurrent operations
Verification verify_coverability(const Model& m, const Specification& s,
                                 const VerifyOptions& opts = {});

}  // namespace linviol
