#include "prbslice/smt_solver.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "prbslice/sexpr.hpp"
#include "prbslice/subprocess.hpp"

namespace prbslice {

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::sat: return "sat";
    case SolverStatus::unsat: return "unsat";
    case SolverStatus::unknown: return "unknown";
    case SolverStatus::timeout: return "timeout";
  }
  return "?";
}

std::string resolve_solver_command(const std::string& explicit_cmd) {
  if (!explicit_cmd.empty()) return explicit_cmd;
  if (const char* env = std::getenv(kSolverEnvVar); env != nullptr && *env != '\0') return env;
  return kDefaultSolverCommand;
}

namespace {

std::int64_t parse_int(const SExpr& e) {
  auto numeral = [](const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
      throw SolverParseError("expected a numeral, got '" + text + "'");
    }
    try {
      return static_cast<std::int64_t>(std::stoll(text));
    } catch (const std::out_of_range&) {
      throw SolverParseError("numeral out of range: " + text);
    }
  };
  if (!e.is_list) return numeral(e.atom);
  if (e.items.size() == 2 && e.items[0].is_atom("-") && !e.items[1].is_list) return -numeral(e.items[1].atom);
  throw SolverParseError("unsupported integer value " + e.to_string());
}

ModelValue parse_value(const SExpr& sort, const SExpr& value) {
  if (sort.is_atom("Bool")) {
    if (value.is_atom("true")) return true;
    if (value.is_atom("false")) return false;
    throw SolverParseError("unsupported Bool value " + value.to_string());
  }
  if (sort.is_atom("Int")) return parse_int(value);
  throw SolverParseError("unsupported sort " + sort.to_string());
}

Model parse_model(const SExpr& doc) {
  if (!doc.is_list) throw SolverParseError("model is not a list: " + doc.to_string());
  std::size_t first = 0;
  if (!doc.items.empty() && doc.items[0].is_atom("model")) first = 1;
  Model model;
  for (std::size_t n = first; n < doc.items.size(); ++n) {
    const SExpr& def = doc.items[n];
    if (!def.is_list || def.items.size() != 5 || !def.items[0].is_atom("define-fun") || def.items[1].is_list ||
        !def.items[2].is_list) {
      throw SolverParseError("unexpected model entry " + def.to_string());
    }
    if (!def.items[2].items.empty()) continue;  // functions with arguments are not part of the encoding
    model[def.items[1].atom] = parse_value(def.items[3], def.items[4]);
  }
  return model;
}

std::filesystem::path temp_script_path() {
  static std::atomic<unsigned> counter{0};
  return std::filesystem::temp_directory_path() /
         ("prbslice_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".smt2");
}

}  // namespace

SolverVerdict parse_solver_output(const std::string& out) {
  std::vector<SExpr> exprs;
  try {
    exprs = parse_sexprs(out);
  } catch (const SExprParseError& e) {
    throw SolverParseError(std::string("malformed solver output: ") + e.what());
  }
  if (exprs.empty()) throw SolverParseError("solver printed nothing");
  const SExpr& head = exprs.front();
  SolverVerdict v;
  if (head.is_atom("sat")) {
    v.status = SolverStatus::sat;
  } else if (head.is_atom("unsat")) {
    v.status = SolverStatus::unsat;
  } else if (head.is_atom("unknown")) {
    v.status = SolverStatus::unknown;
  } else if (head.is_atom("timeout")) {
    v.status = SolverStatus::timeout;
  } else {
    throw SolverParseError("expected sat/unsat/unknown, got " + head.to_string());
  }
  if (v.status == SolverStatus::sat) {
    if (exprs.size() < 2) throw SolverParseError("sat answer without a model");
    v.model = parse_model(exprs[1]);
  }
  return v;
}

SolverVerdict solve(const std::string& script, double timeout_seconds, const std::string& command) {
  if (!(timeout_seconds > 0.0)) throw std::invalid_argument("solver timeout must be positive");
  std::string cmd = command;
  std::string input = script;
  std::filesystem::path file;
  if (const auto at = cmd.find("{file}"); at != std::string::npos) {
    file = temp_script_path();
    std::ofstream(file) << script;
    while (cmd.find("{file}") != std::string::npos) cmd.replace(cmd.find("{file}"), 6, file.string());
    input.clear();
  }
  ProcessResult run;
  try {
    run = run_shell(cmd, input, std::chrono::duration<double>(timeout_seconds));
  } catch (const ProcessError& e) {
    if (!file.empty()) std::filesystem::remove(file);
    throw SolverProcessError(e.what());
  }
  if (!file.empty()) std::filesystem::remove(file);

  if (run.timed_out) {
    SolverVerdict v;
    v.status = SolverStatus::timeout;
    v.wall_time = run.wall_time;
    return v;
  }
  if (run.term_signal != 0) {
    throw SolverProcessError("solver '" + cmd + "' killed by signal " + std::to_string(run.term_signal));
  }
  if (run.exit_code == 126 || run.exit_code == 127) {
    throw SolverProcessError("solver '" + cmd + "' could not be executed: " + run.err);
  }
  SolverVerdict v;
  try {
    v = parse_solver_output(run.out);
  } catch (const SolverParseError&) {
    if (run.exit_code != 0) {
      throw SolverProcessError("solver '" + cmd + "' exited with " + std::to_string(run.exit_code) + ": " +
                               run.err + run.out);
    }
    throw;
  }
  // Solvers may complain about get-model after unsat and exit nonzero; the
  // verdict has already been printed at that point.
  if (v.status == SolverStatus::sat && run.exit_code != 0) {
    throw SolverProcessError("solver '" + cmd + "' exited with " + std::to_string(run.exit_code) + " after sat: " +
                             run.err);
  }
  v.wall_time = run.wall_time;
  return v;
}

}  // namespace prbslice
