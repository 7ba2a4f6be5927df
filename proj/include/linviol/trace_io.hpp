/* trace_io.hpp -- JSONL trace reading and writing */
#pragma once

#include <iosfwd>
#include <string>

#include "linviol/model.hpp"

namespace linviol {

// One JSON object per line: {"a":"call"|"ret","op":"o3","m":"Enq","v":7}.
// "v" is omitted for argumentless methods and unknown results. Throws
// ValidationError with a line number on malformed input; the returned
// execution is well-formed but may contain pending calls.
Execution read_trace(std::istream& in);
Execution read_trace_file(const std::string& path);

void write_trace(std::ostream& out, const Execution& e);
void write_trace_file(const std::string& path, const Execution& e);

}  // namespace linviol
