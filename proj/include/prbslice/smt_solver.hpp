#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace prbslice {

/// The solver process could not run or ended abnormally without a verdict.
class SolverProcessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solver ran but its output could not be understood.
class SolverParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverStatus { sat, unsat, unknown, timeout };

const char* to_string(SolverStatus status);

using ModelValue = std::variant<std::int64_t, bool>;
using Model = std::map<std::string, ModelValue>;

struct SolverVerdict {
  SolverStatus status = SolverStatus::unknown;
  std::optional<Model> model;  // present iff status == sat
  double wall_time = 0.0;      // seconds
};

/// Command used when neither --solver-cmd nor PRBSLICE_SOLVER is given.
inline constexpr const char* kDefaultSolverCommand = "z3 -in -smt2";
inline constexpr const char* kSolverEnvVar = "PRBSLICE_SOLVER";

/// `explicit_cmd` if non-empty, else $PRBSLICE_SOLVER, else the default.
std::string resolve_solver_command(const std::string& explicit_cmd = {});

/// Runs the solver on `script`. The command is a shell template: if it
/// contains "{file}" the script is written to a temporary file whose path
/// replaces the placeholder, otherwise the script goes to stdin. The solver
/// must print its check-sat answer first, followed by the get-model output.
///
/// Throws SolverProcessError when the command cannot be run, is killed by a
/// signal, or exits nonzero without a verdict; SolverParseError when the
/// verdict or model is malformed. Expiry of `timeout_seconds` is a verdict.
SolverVerdict solve(const std::string& script, double timeout_seconds, const std::string& command);

/// Parses solver stdout. Exposed for testing.
SolverVerdict parse_solver_output(const std::string& out);

}  // namespace prbslice
