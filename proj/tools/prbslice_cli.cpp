#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "prbslice/config_io.hpp"
#include "prbslice/harness.hpp"

using namespace prbslice;

namespace {

struct CommonFlags {
  std::string config;
  std::string scenario;
  std::uint64_t seed = 1;
  std::string mode = "oracle";
  std::string solver_cmd;
  double timeout = 120.0;
  std::string out = "out";
  std::int64_t total_prbs = 0;
  int horizon = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_mode) {
  cmd->add_option("--config", f.config, "network config JSON")->required()->check(CLI::ExistingFile);
  auto* scen = cmd->add_option("--scenario", f.scenario, "pinned scenario JSON")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "scenario seed when no --scenario is given")->excludes(scen);
  if (with_mode) {
    cmd->add_option("--mode", f.mode, "oracle | smt | differential")
        ->check(CLI::IsMember({"oracle", "smt", "differential"}));
    cmd->add_option("--solver-cmd", f.solver_cmd,
                    "solver command template; {file} selects temp-file mode (default: $PRBSLICE_SOLVER or '" +
                        std::string(kDefaultSolverCommand) + "')");
    cmd->add_option("--timeout", f.timeout, "solver timeout in seconds")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--out", f.out, "output directory or file");
  cmd->add_option("--total-prbs", f.total_prbs, "override total_prbs")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", f.horizon, "override horizon")->check(CLI::NonNegativeNumber);
}

RunManifest manifest_from(const CommonFlags& f) {
  RunManifest m;
  m.config_path = f.config;
  if (!f.scenario.empty()) m.scenario_path = f.scenario;
  m.seed = f.seed;
  m.mode = parse_run_mode(f.mode);
  m.solver_cmd = f.solver_cmd;
  m.timeout = f.timeout;
  m.out_dir = f.out;
  if (f.total_prbs > 0) m.total_prbs = f.total_prbs;
  if (f.horizon >= 0) m.horizon = f.horizon;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PRB allocation engine for 3-layer RAN slicing"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "run one (config, scenario) in oracle, smt or differential mode");
  add_common(run, run_flags, true);

  CommonFlags gen_flags;
  gen_flags.out = "scenario.json";
  auto* gen = app.add_subcommand("gen-scenario", "generate a scenario from the config's scenario block");
  add_common(gen, gen_flags, false);

  CommonFlags val_flags;
  auto* val = app.add_subcommand("validate-config", "check a config and print its derived quantities");
  add_common(val, val_flags, false);

  CommonFlags cmp_flags;
  std::string fraction;
  auto* cmp = app.add_subcommand("compare", "premium PRB share against the static over-provisioning baseline");
  add_common(cmp, cmp_flags, false);
  cmp->add_option("--baseline-fraction", fraction, "premium fraction of T_P for the baseline, e.g. 0.3 or 3/10");

  SweepOptions sweep_opt;
  std::string sweep_mode = "oracle";
  std::vector<std::string> sweep_configs;
  std::string seeds_text = "1-30";
  auto* sweep = app.add_subcommand("sweep", "run a (config x T_P x T x seed) matrix");
  sweep->add_option("--config", sweep_configs, "config JSON files")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", seeds_text, "seed list: 'a-b' range or comma-separated values");
  sweep->add_option("--total-prbs", sweep_opt.total_prbs, "T_P values")->delimiter(',');
  sweep->add_option("--horizon", sweep_opt.horizons, "horizon values")->delimiter(',');
  sweep->add_option("--mode", sweep_mode, "oracle | smt | differential")
      ->check(CLI::IsMember({"oracle", "smt", "differential"}));
  sweep->add_option("--solver-cmd", sweep_opt.solver_cmd, "solver command template");
  sweep->add_option("--timeout", sweep_opt.timeout, "solver timeout in seconds")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", sweep_opt.jobs, "parallel cells")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_opt.out_dir, "output directory");
  sweep->add_flag("!--no-cell-artifacts", sweep_opt.cell_artifacts, "skip the per-cell output directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(manifest_from(run_flags), std::cerr);
    if (*gen) return cmd_gen_scenario(manifest_from(gen_flags), gen_flags.out, std::cerr);
    if (*val) return cmd_validate_config(manifest_from(val_flags), std::cout);
    if (*cmp) {
      std::optional<Ratio> f;
      if (!fraction.empty()) {
        try {
          f = Ratio::parse(fraction);
        } catch (const std::invalid_argument& e) {
          throw ValidationError(std::string("bad --baseline-fraction: ") + e.what());
        }
      }
      return cmd_compare(manifest_from(cmp_flags), f, std::cerr);
    }
    if (*sweep) {
      sweep_opt.mode = parse_run_mode(sweep_mode);
      for (const auto& c : sweep_configs) sweep_opt.configs.emplace_back(c);
      if (const auto dash = seeds_text.find('-'); dash != std::string::npos) {
        const std::uint64_t lo = std::stoull(seeds_text.substr(0, dash));
        const std::uint64_t hi = std::stoull(seeds_text.substr(dash + 1));
        for (std::uint64_t s = lo; s <= hi; ++s) sweep_opt.seeds.push_back(s);
      } else {
        std::istringstream in(seeds_text);
        for (std::string tok; std::getline(in, tok, ',');) sweep_opt.seeds.push_back(std::stoull(tok));
      }
      return cmd_sweep(sweep_opt, std::cerr).exit_code;
    }
  } catch (...) {
    return exit_code_for_current_exception(std::cerr);
  }
  return kExitUsage;
}
