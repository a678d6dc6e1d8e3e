#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

namespace prbslice {

/// The process could not be started (pipe/fork/exec failure).
class ProcessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProcessResult {
  int exit_code = -1;    // valid when exited normally
  int term_signal = 0;   // nonzero when killed by a signal
  bool timed_out = false;
  std::string out;
  std::string err;
  double wall_time = 0.0;  // seconds
};

/// Runs `command` through /bin/sh -c, feeding `input` on stdin. The whole
/// process group is killed once `timeout` elapses. The first call sets
/// SIGPIPE to ignored for the whole process, so a child that exits before
/// reading its input surfaces as a write error instead of a signal.
ProcessResult run_shell(const std::string& command, const std::string& input, std::chrono::duration<double> timeout);

}  // namespace prbslice
