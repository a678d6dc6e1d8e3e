#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "prbslice/config_io.hpp"
#include "prbslice/harness.hpp"
#include "prbslice/oracle.hpp"
#include "prbslice/trace_io.hpp"
#include "support.hpp"

using namespace prbslice;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("prbslice_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunManifest manifest_for(const std::string& config, const fs::path& out, RunMode mode = RunMode::oracle) {
  RunManifest m;
  m.config_path = config_path(config);
  m.out_dir = out;
  m.mode = mode;
  m.seed = 1;
  return m;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text_file(p)); }

int cli(const std::string& args) {
  const std::string cmd = std::string(PRBSLICE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool have_z3() { return std::system("command -v z3 >/dev/null 2>&1") == 0; }

}  // namespace

TEST_CASE("run modes") {
  CHECK(parse_run_mode("differential") == RunMode::differential);
  CHECK(std::string(to_string(RunMode::smt)) == "smt");
  CHECK_THROWS_AS(parse_run_mode("fast"), ValidationError);
}

TEST_CASE("manifest checks") {
  RunManifest m;
  CHECK_THROWS_AS(m.check(), ValidationError);
  m.config_path = config_path("3-2-4");
  CHECK_NOTHROW(m.check());
  m.timeout = 0;
  CHECK_THROWS_AS(m.check(), ValidationError);
  m.timeout = 5;
  m.mode = RunMode::differential;
  m.solver_cmd = "my-solver";
  m.total_prbs = 300;
  const RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
}

TEST_CASE("config overrides are applied before validation") {
  CHECK(load_config_with(config_path("3-2-4"), 300, 50).total_prbs == 300);
  CHECK(load_config_with(config_path("3-2-4"), std::nullopt, 50).horizon == 50);
  CHECK_THROWS_AS(load_config_with(config_path("5-4-13"), 100, std::nullopt), ValidationError);
  CHECK(load_config_with(config_path("5-4-13"), std::nullopt, std::nullopt).name == "5-4-13");
}

TEST_CASE("oracle run artifacts can be read back") {
  TempDir tmp;
  const RunManifest m = manifest_for("3-2-4", tmp.path);
  std::ostringstream log;
  REQUIRE(cmd_run(m, log) == kExitOk);
  const fs::path& d = tmp.path;

  const NetworkConfig c = config_from_json(read_json(d / "config.json"));
  CHECK(config_to_json(c) == config_to_json(load_config(config_path("3-2-4"))));
  const ScenarioTrace s = scenario_from_json(read_json(d / "scenario.json"));
  CHECK(s == default_scenario("3-2-4", c, 1));
  CHECK(RunManifest::from_json(read_json(d / "manifest.json")).to_json() == m.to_json());

  const AllocationTrace from_json = trace_from_json(read_json(d / "trace.json"));
  CHECK(from_json.states == states_from_csv(read_text_file(d / "trace.csv"), c));
  CHECK(from_json.states.size() == 31);

  const MetricsBundle metrics = metrics_from_json(read_json(d / "metrics.json"));
  CHECK(metrics.residual_share.size() == 31);
  CHECK(metrics_from_csv(read_text_file(d / "metrics.csv")).size() == 31 * 4);
  const PropertyReport props = report_from_json(read_json(d / "properties.json"));
  CHECK(props.all_passed());
  CHECK(report_from_csv(read_text_file(d / "properties.csv")) == props);
  CHECK(read_json(d / "summary.json")["exit_code"] == 0);
  CHECK_FALSE(fs::exists(d / "encoding.smt2"));
  CHECK(log.str().find("ok") != std::string::npos);
}

TEST_CASE("differential run gives an empty diff") {
  if (!have_z3()) {
    MESSAGE("z3 not found; skipping");
    return;
  }
  TempDir tmp;
  RunManifest m = manifest_for("3-2-4", tmp.path, RunMode::differential);
  m.solver_cmd = "z3 -in -smt2";
  std::ostringstream log;
  REQUIRE(cmd_run(m, log) == kExitOk);
  CHECK(diff_from_csv(read_text_file(tmp.path / "diff.csv")).empty());
  const NetworkConfig c = load_config(config_path("3-2-4"));
  CHECK(states_from_csv(read_text_file(tmp.path / "trace_smt.csv"), c) ==
        states_from_csv(read_text_file(tmp.path / "trace.csv"), c));
  CHECK(read_json(tmp.path / "solver.json")["status"] == "sat");
  CHECK(report_from_json(read_json(tmp.path / "properties_smt.json")).all_passed());
  CHECK(fs::exists(tmp.path / "encoding.smt2"));
}

TEST_CASE("a tampered model is reported as a diff") {
  if (!have_z3()) return;
  const NetworkConfig c = load_config(config_path("3-2-4"));
  const std::string bump =
      "z3 -in -smt2 | python3 -c \"import re,sys; t=sys.stdin.read(); "
      "print(re.sub(r'(rp_shr_3 \\(\\) Int\\s+)(\\d+)', lambda m: m.group(1)+str(int(m.group(2))+1), t))\"";
  const RunOutcome out = execute(c, default_scenario("3-2-4", c, 1), RunMode::differential, bump, 60);
  CHECK(out.exit_code == kExitDiff);
  REQUIRE(out.diff.size() == 1);
  CHECK(out.diff[0].j == 3);
  CHECK(out.diff[0].variable == "rp_shr");
  CHECK(diff_from_csv(diff_to_csv(out.diff)) == out.diff);
}

TEST_CASE("solver failures map to the solver exit code") {
  const NetworkConfig c = load_config(config_path("3-2-4"));
  const ScenarioTrace s = default_scenario("3-2-4", c, 1);
  CHECK(execute(c, s, RunMode::smt, "exit 9", 5).exit_code == kExitSolver);
  CHECK(execute(c, s, RunMode::smt, "cat >/dev/null; echo unsat", 5).exit_code == kExitSolver);
  CHECK(execute(c, s, RunMode::smt, "cat >/dev/null; echo unknown", 5).exit_code == kExitSolver);
  const RunOutcome slow = execute(c, s, RunMode::differential, "sleep 5", 0.2);
  CHECK(slow.exit_code == kExitSolver);
  REQUIRE(slow.verdict.has_value());
  CHECK(slow.verdict->status == SolverStatus::timeout);
  CHECK(execute(c, s, RunMode::smt, "echo nonsense", 5).exit_code == kExitSolver);
}

TEST_CASE("an inadmissible scenario aborts the oracle") {
  const NetworkConfig c = small_shared();
  ScenarioTrace s = ScenarioTrace::empty(c);
  s.departures[0][0] = true;
  const RunOutcome out = execute(c, s, RunMode::oracle, "", 5);
  CHECK(out.exit_code == kExitValidation);
  CHECK_FALSE(out.message.empty());

  std::ostringstream log;
  try {
    throw SimulationError(4, "residual partition share went negative");
  } catch (...) {
    CHECK(exit_code_for_current_exception(log) == kExitProperty);
  }
  try {
    throw ScenarioError("departure from an empty slice");
  } catch (...) {
    CHECK(exit_code_for_current_exception(log) == kExitValidation);
  }
}

TEST_CASE("infeasible config is rejected before solving") {
  TempDir tmp;
  RunManifest m = manifest_for("5-4-13", tmp.path, RunMode::smt);
  m.total_prbs = 100;
  m.solver_cmd = "exit 9";
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_run(m, log), ValidationError);
  CHECK_FALSE(fs::exists(tmp.path / "encoding.smt2"));
}

TEST_CASE("sweep over a single cell") {
  TempDir tmp;
  SweepOptions o;
  o.configs = {config_path("3-2-4")};
  o.seeds = {7};
  o.out_dir = tmp.path;
  std::ostringstream log;
  const SweepResult r = cmd_sweep(o, log);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.rows[0].seed == 7);
  CHECK(r.rows[0].total_prbs == 200);
  CHECK(r.rows[0].properties_passed);
  CHECK(r.rows[0].final_residual_fraction >= 0.5);
  CHECK(fs::exists(tmp.path / "cells" / "3-2-4_tp200_T30_s7" / "trace.csv"));
  const auto back = sweep_from_csv(read_text_file(tmp.path / "sweep.csv"));
  REQUIRE(back.size() == 1);
  CHECK(back[0].topups == r.rows[0].topups);
  CHECK(back[0].final_residual_prbs == r.rows[0].final_residual_prbs);
  CHECK(back[0].premium_share_mean == doctest::Approx(r.rows[0].premium_share_mean));
}

TEST_CASE("full sweep matrix skips the infeasible pair") {
  TempDir tmp;
  SweepOptions o;
  for (const auto& n : reference_configs()) o.configs.push_back(config_path(n));
  for (std::uint64_t seed = 1; seed <= 30; ++seed) o.seeds.push_back(seed);
  o.total_prbs = {100, 200, 300};
  o.jobs = 4;
  o.cell_artifacts = false;
  o.out_dir = tmp.path;
  std::ostringstream log;
  const SweepResult r = cmd_sweep(o, log);
  CHECK(r.rows.size() == 330);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].config == "5-4-13");
  CHECK(r.skipped[0].total_prbs == 100);
  for (const SweepRow& row : r.rows) {
    CHECK_FALSE((row.config == "5-4-13" && row.total_prbs == 100));
  }
  CHECK(sweep_from_csv(read_text_file(tmp.path / "sweep.csv")).size() == 330);
  CHECK_FALSE(fs::exists(tmp.path / "cells"));
  // Rows come back in matrix order regardless of the job count.
  CHECK(r.rows.front().config == "3-2-4");
  CHECK(r.rows.front().total_prbs == 100);
  CHECK(r.rows.front().seed == 1);
  CHECK(r.rows.back().config == "5-4-13");
  CHECK(r.rows.back().seed == 30);
}

TEST_CASE("premium comparison") {
  TempDir tmp;
  const RunManifest m = manifest_for("3-2-4", tmp.path);
  std::ostringstream log;
  REQUIRE(cmd_compare(m, std::nullopt, log) == kExitOk);
  const auto rows = compare_from_csv(read_text_file(tmp.path / "compare.csv"));
  REQUIRE(rows.size() == 31);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    CHECK(rows[j].j == static_cast<int>(j));
    CHECK(rows[j].gap >= 0.0);
    CHECK(rows[j].gap == doctest::Approx(rows[j].baseline_pct - rows[j].dynamic_pct));
  }
  const NetworkConfig c = load_config(config_path("3-2-4"));
  CHECK(states_from_csv(read_text_file(tmp.path / "baseline_trace.csv"), c).size() == 31);
  CHECK(read_json(tmp.path / "compare.json").contains("baseline_fraction"));
}

TEST_CASE("comparison against the initial share with no traffic") {
  TempDir tmp;
  const NetworkConfig c = load_config(config_path("3-2-4"));
  const fs::path scen = tmp.path / "empty.json";
  write_text_file(scen, scenario_to_json(ScenarioTrace::empty(c)).dump());
  RunManifest m = manifest_for("3-2-4", tmp.path / "out");
  m.scenario_path = scen;
  std::ostringstream log;
  // Premium slices start with 5 + 5 PRBs.
  REQUIRE(cmd_compare(m, Ratio(10, 200), log) == kExitProperty);
  const auto rows = compare_from_csv(read_text_file(tmp.path / "out" / "compare.csv"));
  REQUIRE(rows.size() == 31);
  // Idle premium slices (t_win 10) are topped up at j = 10 and 30 and
  // released at j = 20, so the dynamic share exceeds the initial one there.
  for (const CompareRow& r : rows) {
    CAPTURE(r.j);
    if ((r.j / 10) % 2 == 1 || r.j == 30) {
      CHECK(r.gap < 0.0);
    } else {
      CHECK(r.gap == 0.0);
    }
  }
  CHECK(compare_to_csv(rows) == read_text_file(tmp.path / "out" / "compare.csv"));
}

TEST_CASE("pinned scenarios reproduce generated runs") {
  TempDir tmp;
  RunManifest m = manifest_for("3-3-7", tmp.path / "gen");
  m.seed = 12;
  std::ostringstream log;
  REQUIRE(cmd_gen_scenario(m, tmp.path / "s.json", log) == kExitOk);
  REQUIRE(cmd_run(m, log) == kExitOk);
  RunManifest pinned = manifest_for("3-3-7", tmp.path / "pinned");
  pinned.scenario_path = tmp.path / "s.json";
  REQUIRE(cmd_run(pinned, log) == kExitOk);
  CHECK(read_text_file(tmp.path / "gen" / "trace.csv") == read_text_file(tmp.path / "pinned" / "trace.csv"));
  CHECK(cmd_validate_config(m, log) == kExitOk);
}

TEST_CASE("command-line exit codes") {
  TempDir tmp;
  const std::string cfg = config_path("3-2-4").string();
  const std::string out = " --out " + tmp.path.string();
  CHECK(cli("") == kExitUsage);
  CHECK(cli("run --config /nonexistent.json") == kExitUsage);
  CHECK(cli("run --config " + cfg + " --mode bogus") == kExitUsage);
  CHECK(cli("validate-config --config " + cfg) == kExitOk);
  CHECK(cli("validate-config --config " + config_path("5-4-13").string() + " --total-prbs 100") == kExitValidation);
  CHECK(cli("run --config " + cfg + out + "/a") == kExitOk);
  CHECK(cli("run --config " + cfg + " --mode smt --solver-cmd 'exit 9'" + out + "/b") == kExitSolver);
  CHECK(cli("run --config " + config_path("5-4-13").string() + " --mode smt --total-prbs 100" + out + "/c") ==
        kExitValidation);
  CHECK(cli("compare --config " + cfg + " --baseline-fraction 0.99" + out + "/d") == kExitValidation);
  CHECK(cli("gen-scenario --config " + cfg + " --seed 3 --out " + (tmp.path / "s.json").string()) == kExitOk);
  CHECK(fs::exists(tmp.path / "s.json"));
  CHECK(cli("sweep --config " + cfg + " --seeds 1-2 --jobs 2" + out + "/e") == kExitOk);
  CHECK(sweep_from_csv(read_text_file(tmp.path / "e" / "sweep.csv")).size() == 2);
  CHECK(cli("sweep --config " + cfg + " --seeds x" + out + "/f") == kExitUsage);
  if (have_z3()) {
    CHECK(cli("run --config " + cfg + " --mode differential" + out + "/g") == kExitOk);
    const std::string env = std::string("PRBSLICE_SOLVER='exit 9' ");
    const int status = std::system((env + PRBSLICE_CLI + " run --config " + cfg + " --mode smt" + out + "/h >/dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == kExitSolver);
  }
}
