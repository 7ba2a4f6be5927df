/* generate.hpp -- randomized trace generation against reference and mutant objects */
#pragma once

#include <string>

#include "linviol/model.hpp"

namespace linviol {

struct GenOptions {
  std::string spec = "queue";
  std::string mutant;  // empty: faithful reference behavior
  int ops = 20;
  int threads = 3;
  unsigned seed = 1;
  int values = 0;  // value pool size; 0 means every inserted value is distinct
};

// Produces a completed execution by running a sequential object with atomic
// effects at call time and randomly delayed returns; with an empty mutant the
// result is linearizable by construction. Mutants run the same scheduler
// against a deliberately wrong object: queue-fifo-swap, queue-false-empty,
// stack-lifo-swap, register-stale-read, mutex-no-exclusion. Throws
// ValidationError on unknown spec or mutant names.
Execution generate(const GenOptions& o);

}  // namespace linviol
