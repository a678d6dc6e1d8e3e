#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prbslice/metrics.hpp"
#include "prbslice/oracle.hpp"
#include "prbslice/properties.hpp"
#include "prbslice/smt_solver.hpp"
#include "prbslice/trace_io.hpp"

namespace prbslice {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,       // bad arguments, unreadable or unwritable files
  kExitValidation = 2,  // config, scenario or baseline fraction rejected
  kExitProperty = 3,    // a property failed or the oracle aborted
  kExitSolver = 4,      // solver failed, or answered unsat/unknown/timeout
  kExitDiff = 5,        // solver trace differs from the oracle trace
};

enum class RunMode { oracle, smt, differential };
const char* to_string(RunMode mode);
RunMode parse_run_mode(const std::string& text);

struct RunManifest {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> scenario_path;  // pinned scenario; otherwise generated from `seed`
  std::uint64_t seed = 1;
  RunMode mode = RunMode::oracle;
  std::filesystem::path out_dir = "out";
  std::string solver_cmd;  // resolved through resolve_solver_command when empty
  double timeout = 120.0;  // seconds per solver call
  std::optional<std::int64_t> total_prbs;
  std::optional<int> horizon;

  /// Throws ValidationError when the manifest is inconsistent.
  void check() const;
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& doc);
};

/// Loads a config file applying the T_P / T overrides before validation.
NetworkConfig load_config_with(const std::filesystem::path& path, std::optional<std::int64_t> total_prbs,
                               std::optional<int> horizon);

/// Pinned scenario if given, otherwise one generated from the config file's
/// "scenario" block and the manifest seed.
ScenarioTrace scenario_for(const RunManifest& manifest, const NetworkConfig& config);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::optional<AllocationTrace> oracle_trace;
  std::optional<AllocationTrace> smt_trace;
  std::optional<SolverVerdict> verdict;
  std::size_t assertion_count = 0;
  std::vector<TraceDifference> diff;
  std::optional<PropertyReport> properties;      // of the primary trace (oracle unless mode is smt)
  std::optional<PropertyReport> smt_properties;  // differential mode only
  std::optional<MetricsBundle> metrics;

  const AllocationTrace* primary() const;
};

/// Runs one (config, scenario) pair in the given mode without touching the
/// filesystem. Errors are mapped onto `exit_code`, never thrown.
RunOutcome execute(const NetworkConfig& config, const ScenarioTrace& scenario, RunMode mode,
                   const std::string& solver_cmd, double timeout);

/// `run`: executes the manifest and writes its artifacts into out_dir.
int cmd_run(const RunManifest& manifest, std::ostream& log);

struct SweepOptions {
  std::vector<std::filesystem::path> configs;
  std::vector<std::uint64_t> seeds;
  std::vector<std::int64_t> total_prbs;  // empty: each config's own value
  std::vector<int> horizons;             // empty: each config's own value
  RunMode mode = RunMode::oracle;
  std::string solver_cmd;
  double timeout = 120.0;
  unsigned jobs = 1;
  std::filesystem::path out_dir = "out";
  bool cell_artifacts = true;  // per-cell subdirectory with trace, metrics and properties
};

struct SweepRow {
  std::string config;
  std::int64_t total_prbs = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  int exit_code = kExitOk;
  std::string note;
  std::int64_t final_residual_prbs = 0;
  double final_residual_fraction = 0.0;
  std::int64_t topups = 0;
  std::int64_t rampdowns = 0;
  std::int64_t blocked_entries = 0;
  double premium_share_min = 0.0;
  double premium_share_mean = 0.0;
  double premium_share_max = 0.0;
  bool properties_passed = false;
  std::string solver_status;
  double solver_wall_time = 0.0;
  std::size_t assertions = 0;
  std::size_t diff_count = 0;
};

struct SweepSkip {
  std::string config;
  std::int64_t total_prbs = 0;
  int horizon = 0;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (config, T_P, T, seed)
  std::vector<SweepSkip> skipped;
  int exit_code = kExitOk;     // first nonzero row code in row order, else 0
};

/// Runs every (config, T_P, T, seed) cell; configs that fail validation for
/// a given T_P / T are skipped with a note. Cells run on `jobs` threads.
/// Writes sweep.csv and skipped.csv into out_dir.
SweepResult cmd_sweep(const SweepOptions& options, std::ostream& log);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> sweep_from_csv(const std::string& text);

struct CompareRow {
  int j = 0;
  double dynamic_pct = 0.0;
  double baseline_pct = 0.0;
  double gap = 0.0;  // baseline - dynamic
};

/// Per-timestep premium share of the dynamic run against the static
/// baseline. `fraction` defaults to default_baseline_fraction.
std::vector<CompareRow> compare_premium(const AllocationTrace& dynamic, const AllocationTrace& baseline);

/// `compare`: writes compare.csv plus both traces; exits with kExitProperty
/// if the baseline falls below the dynamic share at any timestep.
int cmd_compare(const RunManifest& manifest, std::optional<Ratio> fraction, std::ostream& log);

std::string compare_to_csv(const std::vector<CompareRow>& rows);
std::vector<CompareRow> compare_from_csv(const std::string& text);

/// `gen-scenario`: writes the scenario JSON to `out_file`.
int cmd_gen_scenario(const RunManifest& manifest, const std::filesystem::path& out_file, std::ostream& log);

/// `validate-config`: prints a summary of the config or the first broken rule.
int cmd_validate_config(const RunManifest& manifest, std::ostream& log);

/// Maps an in-flight exception onto an exit code and writes it to `log`.
int exit_code_for_current_exception(std::ostream& log);

}  // namespace prbslice
