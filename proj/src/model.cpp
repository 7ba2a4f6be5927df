/* model.cpp -- executions, histories, projections */
#include "linviol/model.hpp"

#include <algorithm>
#include <sstream>

namespace linviol {

void validate(const Execution& e) {
  std::map<std::string, int> open;    // op -> call index
  std::set<std::string> closed;
  for (int i = 0; i < static_cast<int>(e.actions.size()); ++i) {
    const Action& a = e.actions[i];
    if (a.op.empty()) throw ValidationError("action without op id");
    if (a.method.empty()) throw ValidationError("action without method: " + a.op);
    if (a.kind == Kind::Call) {
      if (open.count(a.op) || closed.count(a.op))
        throw ValidationError("op id reused: " + a.op);
      open.emplace(a.op, i);
    } else {
      auto it = open.find(a.op);
      if (it == open.end())
        throw ValidationError("ret without matching call: " + a.op);
      const Action& c = e.actions[it->second];
      if (c.method != a.method)
        throw ValidationError("method mismatch between call and ret: " + a.op);
      if (c.value != kNoValue && a.value != kNoValue && c.value != a.value)
        throw ValidationError("value mismatch between call and ret: " + a.op);
      open.erase(it);
      closed.insert(a.op);
    }
  }
}

Completion complete(const Execution& e) {
  validate(e);
  Completion out;
  std::map<std::string, const Action*> open;
  std::vector<std::string> open_order;
  for (const Action& a : e.actions) {
    if (a.kind == Kind::Call) {
      open.emplace(a.op, &a);
      open_order.push_back(a.op);
    } else {
      open.erase(a.op);
    }
  }
  std::set<std::string> drop;
  for (const std::string& op : open_order) {
    auto it = open.find(op);
    if (it == open.end()) continue;
    if (it->second->value == kNoValue) {
      // Result value unknown; the op may not have taken effect. Remove it.
      drop.insert(op);
      out.dropped.push_back(op);
    }
  }
  for (const Action& a : e.actions)
    if (!drop.count(a.op)) out.execution.actions.push_back(a);
  for (const std::string& op : open_order) {
    auto it = open.find(op);
    if (it == open.end() || drop.count(op)) continue;
    const Action& c = *it->second;
    out.execution.actions.push_back(Action{Kind::Ret, c.op, c.method, c.value});
    out.completed.push_back(op);
  }
  return out;
}

History History::of(const Execution& e) {
  validate(e);
  History h;
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(e.actions.size()); ++i) {
    const Action& a = e.actions[i];
    if (a.kind == Kind::Call) {
      index.emplace(a.op, static_cast<int>(h.ops_.size()));
      h.ops_.push_back(Operation{a.op, a.method, a.value, i, -1});
    } else {
      Operation& o = h.ops_[index.at(a.op)];
      o.ret = i;
      if (o.value == kNoValue) o.value = a.value;
    }
  }
  for (auto& o : h.ops_) {
    if (o.ret < 0) throw ValidationError("pending call, complete first: " + o.name);
  }
  for (int i = 0; i < h.size(); ++i)
    if (h.ops_[i].value == kNoValue) h.ops_[i].value = ghost_for(i);
  return h;
}

std::set<Value> History::dom() const {
  std::set<Value> d;
  for (const auto& o : ops_)
    if (is_data(o.value)) d.insert(o.value);
  return d;
}

History History::project(const std::set<Value>& keep) const {
  std::vector<int> idx;
  for (int i = 0; i < size(); ++i)
    if (is_ghost(ops_[i].value) || keep.count(ops_[i].value)) idx.push_back(i);
  return restrict_to(idx);
}

History History::restrict_to(const std::vector<int>& op_indices) const {
  History h;
  for (int i : op_indices) h.ops_.push_back(ops_[i]);
  // Action indices keep their relative order; hb is inherited unchanged.
  return h;
}

std::vector<int> History::ops_of_value(Value v) const {
  std::vector<int> r;
  for (int i = 0; i < size(); ++i)
    if (ops_[i].value == v) r.push_back(i);
  return r;
}

std::vector<int> History::ops_of_method(const std::string& m) const {
  std::vector<int> r;
  for (int i = 0; i < size(); ++i)
    if (ops_[i].method == m) r.push_back(i);
  return r;
}

bool is_differentiated(const History& h, const std::set<std::string>& input_methods) {
  std::set<std::pair<std::string, Value>> seen;
  for (const auto& o : h.ops()) {
    if (!input_methods.count(o.method)) continue;
    if (!is_data(o.value)) continue;
    if (!seen.insert({o.method, o.value}).second) return false;
  }
  return true;
}

bool is_interval_order(const History& h) {
  const int n = h.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (!h.hb(a, b)) continue;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (!h.hb(c, d)) continue;
          if (!h.hb(a, d) && !h.hb(c, b)) return false;
        }
    }
  return true;
}

Execution rename(const Execution& e, const std::map<Value, Value>& r) {
  Execution out = e;
  for (Action& a : out.actions) {
    auto it = r.find(a.value);
    if (it != r.end()) a.value = it->second;
  }
  return out;
}

std::vector<History> value_projections(const History& h) {
  std::set<Value> ds = h.dom();
  std::vector<Value> dom(ds.begin(), ds.end());
  std::vector<History> out;
  const int n = static_cast<int>(dom.size());
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::set<Value> keep;
    for (int i = 0; i < n; ++i)
      if (mask & (1ull << i)) keep.insert(dom[i]);
    out.push_back(h.project(keep));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const History& a, const History& b) { return a.size() < b.size(); });
  return out;
}

Word word_of(const History& h, const std::vector<int>& order) {
  Word w;
  for (int i : order) w.push_back(Event{h.ops()[i].method, h.ops()[i].value, i});
  return w;
}

std::string to_string(const Event& ev) {
  std::ostringstream os;
  os << ev.method;
  if (is_data(ev.value))
    os << '(' << ev.value << ')';
  else if (is_ghost(ev.value))
    os << "(#" << (kGhostBase - ev.value) << ')';
  return os.str();
}

std::string to_string(const Word& w) {
  std::string s;
  for (const Event& ev : w) {
    if (!s.empty()) s += ' ';
    s += to_string(ev);
  }
  return s;
}

std::string to_string(const Action& a) {
  std::ostringstream os;
  os << (a.kind == Kind::Call ? "call " : "ret ") << a.method;
  if (is_data(a.value)) os << '(' << a.value << ')';
  os << ' ' << a.op;
  return os.str();
}

}  // namespace linviol
