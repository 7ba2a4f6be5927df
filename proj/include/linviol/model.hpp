/* model.hpp -- call/return executions, operations, histories, projections */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace linviol {

// Data values are non-negative integers. kNoValue marks an absent value on an
// action (argumentless method, or a pending op whose result was never seen).
// Each completed argumentless op is assigned a unique internal ghost value
// (<= kGhostBase) so projections can distinguish ops the trace format cannot.
using Value = int;
constexpr Value kNoValue = -1;
constexpr Value kGhostBase = -2;

inline bool is_data(Value v) { return v >= 0; }
inline bool is_ghost(Value v) { return v <= kGhostBase; }
inline Value ghost_for(int op_index) { return kGhostBase - op_index; }

enum class Kind { Call, Ret };

struct Action {
  Kind kind;
  std::string op;      // operation identifier, e.g. "o3"
  std::string method;  // e.g. "Enq"
  Value value = kNoValue;
};

// A raw recorded execution: a finite sequence of call/return actions.
struct Execution {
  std::vector<Action> actions;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One operation of a completed execution. value is the data value, or the
// op's ghost value when the trace carried none.
struct Operation {
  std::string name;
  std::string method;
  Value value = kNoValue;
  int call = -1;  // index of call action
  int ret = -1;   // index of ret action
};

// Result of completing an execution that had pending calls.
struct Completion {
  Execution execution;
  std::vector<std::string> completed;  // pending ops that got a synthesized ret
  std::vector<std::string> dropped;    // pending ops removed (result value unknown)
};

// Checks well-formedness: every ret is preceded by a matching call of the same
// op and method, op ids are not reused, values on call and ret of one op agree.
// Throws ValidationError otherwise. Pending calls are allowed.
void validate(const Execution& e);

// Completes an execution: pending calls whose value is already known get a ret
// appended (in call order); pending calls with unknown result value are
// dropped. Input must be well-formed.
Completion complete(const Execution& e);

// A history of a completed execution: operations with their action intervals.
// happens-before: a precedes b iff a returned before b was called. Interval
// orders of this shape are 2+2-free by construction.
class History {
 public:
  History() = default;

  // Builds the history of a completed well-formed execution and assigns ghost
  // values to argumentless ops. Throws ValidationError on pending calls.
  static History of(const Execution& e);

  const std::vector<Operation>& ops() const { return ops_; }
  int size() const { return static_cast<int>(ops_.size()); }

  bool hb(int a, int b) const { return ops_[a].ret < ops_[b].call; }

  // Set of data values occurring in the history (ghosts excluded).
  std::set<Value> dom() const;

  // Sub-history keeping ops whose data value lies in keep; argumentless ops
  // are always kept. This is projection by value in the spec sense.
  History project(const std::set<Value>& keep) const;

  // Sub-history keeping exactly the ops at the given indices.
  History restrict_to(const std::vector<int>& op_indices) const;

  // Indices of ops with the given value (data or ghost).
  std::vector<int> ops_of_value(Value v) const;
  // Indices of ops with the given method.
  std::vector<int> ops_of_method(const std::string& m) const;

 private:
  std::vector<Operation> ops_;
};

// True iff every value used by an input method occurs on at most one op of
// that method. Differentiated executions are the canonical representatives
// under data independence.
bool is_differentiated(const History& h, const std::set<std::string>& input_methods);

// True iff the relation hb over ops is an interval order (2+2-free). Always
// true for histories built from intervals; exposed for property tests.
bool is_interval_order(const History& h);

// Applies a value renaming to an execution. Values not in the map are kept.
Execution rename(const Execution& e, const std::map<Value, Value>& r);

// All value-subset projections of h (by subsets of dom), smallest first.
std::vector<History> value_projections(const History& h);

// A sequential word: method events in one total order.
struct Event {
  std::string method;
  Value value = kNoValue;
  int op = -1;  // originating op index in the history, -1 if free-standing
};

using Word = std::vector<Event>;

// The word induced by listing h's ops in the given order.
Word word_of(const History& h, const std::vector<int>& order);

std::string to_string(const Event& ev);
std::string to_string(const Word& w);
std::string to_string(const Action& a);

}  // namespace linviol
