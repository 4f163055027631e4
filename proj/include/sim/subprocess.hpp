#pragma once

#include <string>

namespace sim {

// One request/response exchange with a child process: write request_line to
// its stdin, read a single newline-terminated line from its stdout. The child
// is killed when the deadline passes.
struct ExchangeResult {
  std::string line;
  bool timed_out = false;
  bool failed = false;     // no usable output (exec failure, early exit, ...)
  std::string detail;
};

ExchangeResult run_line_exchange(const std::string& command,
                                 const std::string& request_line,
                                 double timeout_seconds);

}  // namespace sim
