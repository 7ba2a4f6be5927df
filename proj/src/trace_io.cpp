/* JSONL trace serialization. */
#include "linviol/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace linviol {

using nlohmann::json;

Execution read_trace(std::istream& in) {
  Execution e;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + ex.what());
    }
    auto bad = [&](const std::string& what) {
      return ValidationError("line " + std::to_string(lineno) + ": " + what);
    };
    if (!j.is_object()) throw bad("expected a JSON object");
    if (!j.contains("a") || !j["a"].is_string()) throw bad("missing action field \"a\"");
    if (!j.contains("op") || !j["op"].is_string()) throw bad("missing op field \"op\"");
    if (!j.contains("m") || !j["m"].is_string()) throw bad("missing method field \"m\"");
    std::string a = j["a"].get<std::string>();
    Action act;
    if (a == "call")
      act.kind = Kind::Call;
    else if (a == "ret")
      act.kind = Kind::Ret;
    else
      throw bad("action must be \"call\" or \"ret\"");
    act.op = j["op"].get<std::string>();
    act.method = j["m"].get<std::string>();
    if (j.contains("v")) {
      if (!j["v"].is_number_integer()) throw bad("value field \"v\" must be an integer");
      act.value = j["v"].get<int>();
      if (act.value < 0) throw bad("value must be non-negative");
    }
    e.actions.push_back(std::move(act));
  }
  validate(e);
  return e;
}

Execution read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file: " + path);
  return read_trace(in);
}

void write_trace(std::ostream& out, const Execution& e) {
  for (const Action& a : e.actions) {
    json j;
    j["a"] = a.kind == Kind::Call ? "call" : "ret";
    j["op"] = a.op;
    j["m"] = a.method;
    if (a.value != kNoValue) j["v"] = a.value;
    out << j.dump() << "\n";
  }
}

void write_trace_file(const std::string& path, const Execution& e) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  write_trace(out, e);
}

}  // namespace linviol
