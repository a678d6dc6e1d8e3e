#include "prbslice/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "prbslice/config_io.hpp"
#include "prbslice/smt_decoder.hpp"
#include "prbslice/smt_encoder.hpp"

namespace prbslice {

using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::oracle: return "oracle";
    case RunMode::smt: return "smt";
    case RunMode::differential: return "differential";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& text) {
  if (text == "oracle") return RunMode::oracle;
  if (text == "smt") return RunMode::smt;
  if (text == "differential") return RunMode::differential;
  throw ValidationError("unknown mode '" + text + "' (expected oracle, smt or differential)");
}

void RunManifest::check() const {
  if (config_path.empty()) throw ValidationError("a config path is required");
  if (mode != RunMode::oracle && resolve_solver_command(solver_cmd).empty()) {
    throw ValidationError(std::string(to_string(mode)) + " mode requires a solver command");
  }
  if (!(timeout > 0.0)) throw ValidationError("timeout must be positive");
}

json RunManifest::to_json() const {
  json doc{{"config", config_path.string()},
           {"mode", to_string(mode)},
           {"out_dir", out_dir.string()},
           {"timeout", timeout}};
  if (scenario_path) {
    doc["scenario"] = scenario_path->string();
  } else {
    doc["seed"] = seed;
  }
  if (mode != RunMode::oracle) doc["solver_cmd"] = resolve_solver_command(solver_cmd);
  if (total_prbs) doc["total_prbs"] = *total_prbs;
  if (horizon) doc["horizon"] = *horizon;
  return doc;
}

RunManifest RunManifest::from_json(const json& doc) {
  RunManifest m;
  try {
    m.config_path = doc.at("config").get<std::string>();
    m.mode = parse_run_mode(doc.at("mode").get<std::string>());
    m.out_dir = doc.at("out_dir").get<std::string>();
    m.timeout = doc.at("timeout").get<double>();
    if (doc.contains("scenario")) m.scenario_path = doc.at("scenario").get<std::string>();
    if (doc.contains("seed")) m.seed = doc.at("seed").get<std::uint64_t>();
    m.solver_cmd = doc.value("solver_cmd", std::string{});
    if (doc.contains("total_prbs")) m.total_prbs = doc.at("total_prbs").get<std::int64_t>();
    if (doc.contains("horizon")) m.horizon = doc.at("horizon").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad run manifest: ") + e.what());
  }
  return m;
}

NetworkConfig load_config_with(const std::filesystem::path& path, std::optional<std::int64_t> total_prbs,
                               std::optional<int> horizon) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (total_prbs) doc["total_prbs"] = *total_prbs;
  if (horizon) doc["horizon"] = *horizon;
  NetworkConfig config = config_from_json(doc);
  if (config.name.empty()) config.name = path.stem().string();
  return config;
}

ScenarioTrace scenario_for(const RunManifest& manifest, const NetworkConfig& config) {
  if (manifest.scenario_path) {
    ScenarioTrace s;
    try {
      s = scenario_from_json(json::parse(read_text_file(*manifest.scenario_path)));
    } catch (const json::parse_error& e) {
      throw ValidationError(manifest.scenario_path->string() + ": " + e.what());
    }
    s.check_dimensions(config);
    return s;
  }
  const ScenarioSettings settings = load_scenario_settings(manifest.config_path);
  return gen_scenario(config, settings.per_service, settings.departure_rate, manifest.seed);
}

const AllocationTrace* RunOutcome::primary() const {
  if (oracle_trace) return &*oracle_trace;
  if (smt_trace) return &*smt_trace;
  return nullptr;
}

RunOutcome execute(const NetworkConfig& config, const ScenarioTrace& scenario, RunMode mode,
                   const std::string& solver_cmd, double timeout) {
  RunOutcome out;
  std::ostringstream msg;
  try {
    if (mode != RunMode::smt) out.oracle_trace = simulate(config, scenario);
    if (mode != RunMode::oracle) {
      const ConstraintSet cs = encode(config, scenario);
      out.assertion_count = cs.assertion_count();
      out.verdict = solve(emit_smtlib(cs), timeout, resolve_solver_command(solver_cmd));
      if (out.verdict->status != SolverStatus::sat) {
        out.exit_code = kExitSolver;
        out.message = std::string("solver answered ") + to_string(out.verdict->status);
        return out;
      }
      out.smt_trace = extract_trace(*out.verdict, config, scenario);
    }
  } catch (...) {
    out.exit_code = exit_code_for_current_exception(msg);
    out.message = msg.str();
    while (!out.message.empty() && out.message.back() == '\n') out.message.pop_back();
    return out;
  }

  const AllocationTrace& primary = *out.primary();
  out.properties = check_all(primary, config);
  out.metrics = compute_metrics(primary, config);
  if (mode == RunMode::differential) {
    out.smt_properties = check_all(*out.smt_trace, config);
    out.diff = diff_states(out.oracle_trace->states, out.smt_trace->states);
    if (!out.diff.empty()) {
      out.exit_code = kExitDiff;
      const TraceDifference& d = out.diff.front();
      out.message = std::to_string(out.diff.size()) + " differences, first at j=" + std::to_string(d.j) + " on " +
                    d.variable + " (oracle " + d.left + ", solver " + d.right + ")";
      return out;
    }
  }
  std::vector<std::string> failed = out.properties->failed_names();
  if (out.smt_properties) {
    for (const auto& name : out.smt_properties->failed_names()) failed.push_back("smt:" + name);
  }
  if (!failed.empty()) {
    out.exit_code = kExitProperty;
    out.message = "property failures:";
    for (const auto& f : failed) out.message += " " + f;
  }
  return out;
}

namespace {

void write_json(const std::filesystem::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

void write_trace_artifacts(const std::filesystem::path& dir, const std::string& stem, const AllocationTrace& trace) {
  write_text_file(dir / (stem + ".csv"), trace_to_csv(trace));
  write_json(dir / (stem + ".json"), trace_to_json(trace));
}

void write_outcome(const std::filesystem::path& dir, const RunOutcome& out, bool full) {
  if (const AllocationTrace* p = out.primary()) {
    if (full) write_trace_artifacts(dir, "trace", *p);
    else write_text_file(dir / "trace.csv", trace_to_csv(*p));
  }
  if (out.smt_trace && out.oracle_trace && full) write_trace_artifacts(dir, "trace_smt", *out.smt_trace);
  if (out.metrics) {
    write_json(dir / "metrics.json", metrics_to_json(*out.metrics));
    if (full) write_text_file(dir / "metrics.csv", metrics_to_csv(*out.metrics, *out.primary()));
  }
  if (out.properties) {
    write_json(dir / "properties.json", report_to_json(*out.properties));
    if (full) write_text_file(dir / "properties.csv", report_to_csv(*out.properties));
  }
  if (out.smt_properties && full) write_json(dir / "properties_smt.json", report_to_json(*out.smt_properties));
  if (out.oracle_trace && out.smt_trace) write_text_file(dir / "diff.csv", diff_to_csv(out.diff));
  if (out.verdict) {
    write_json(dir / "solver.json", {{"status", to_string(out.verdict->status)},
                                     {"wall_time", out.verdict->wall_time},
                                     {"assertions", out.assertion_count}});
  }
}

json summary_json(const RunOutcome& out, const NetworkConfig& config) {
  json doc{{"exit_code", out.exit_code}, {"message", out.message}};
  doc["timestep_minutes"] = ratio_to_json(config.timestep_minutes);
  doc["horizon_minutes"] = config.timestep_minutes.to_double() * config.horizon;
  return doc;
}

}  // namespace

int cmd_run(const RunManifest& manifest, std::ostream& log) {
  manifest.check();
  const NetworkConfig config = load_config_with(manifest.config_path, manifest.total_prbs, manifest.horizon);
  const ScenarioTrace scenario = scenario_for(manifest, config);
  const auto& dir = manifest.out_dir;
  write_json(dir / "manifest.json", manifest.to_json());
  write_json(dir / "config.json", config_to_json(config));
  write_json(dir / "scenario.json", scenario_to_json(scenario));
  if (manifest.mode != RunMode::oracle) write_text_file(dir / "encoding.smt2", emit_smtlib(encode(config, scenario)));

  const RunOutcome out = execute(config, scenario, manifest.mode, manifest.solver_cmd, manifest.timeout);
  write_outcome(dir, out, true);
  json summary = summary_json(out, config);
  write_json(dir / "summary.json", summary);

  log << to_string(manifest.mode) << " run of " << config.name << " (T_P=" << config.total_prbs
      << ", T=" << config.horizon << ", seed=" << scenario.seed << "): ";
  if (out.exit_code == kExitOk) {
    log << "ok";
    if (out.verdict) log << ", solver " << out.verdict->wall_time << " s";
    if (out.metrics) log << ", final residual " << out.metrics->residual_share.back().fraction;
    log << "\n";
  } else {
    log << out.message << "\n";
  }
  return out.exit_code;
}

namespace {

struct Cell {
  std::size_t config_index;
  std::int64_t total_prbs;
  int horizon;
  std::uint64_t seed;
  NetworkConfig config;
};

SweepRow run_cell(const SweepOptions& opt, const Cell& cell) {
  SweepRow row;
  row.config = cell.config.name;
  row.total_prbs = cell.config.total_prbs;
  row.horizon = cell.config.horizon;
  row.seed = cell.seed;
  RunOutcome out;
  try {
    RunManifest m;
    m.config_path = opt.configs[cell.config_index];
    m.seed = cell.seed;
    const ScenarioTrace scenario = scenario_for(m, cell.config);
    out = execute(cell.config, scenario, opt.mode, opt.solver_cmd, opt.timeout);
  } catch (...) {
    std::ostringstream msg;
    row.exit_code = exit_code_for_current_exception(msg);
    row.note = msg.str();
    while (!row.note.empty() && row.note.back() == '\n') row.note.pop_back();
    return row;
  }
  row.exit_code = out.exit_code;
  row.note = out.message;
  row.assertions = out.assertion_count;
  row.diff_count = out.diff.size();
  if (out.verdict) {
    row.solver_status = to_string(out.verdict->status);
    row.solver_wall_time = out.verdict->wall_time;
  }
  if (out.metrics) {
    const MetricsBundle& m = *out.metrics;
    row.final_residual_prbs = m.residual_share.back().prbs;
    row.final_residual_fraction = m.residual_share.back().fraction;
    row.topups = m.topup_total;
    row.rampdowns = m.rampdown_total;
    row.blocked_entries = m.blocked_entries;
    const auto [lo, hi] = std::minmax_element(m.premium_share_pct.begin(), m.premium_share_pct.end());
    row.premium_share_min = *lo;
    row.premium_share_max = *hi;
    double sum = 0.0;
    for (double v : m.premium_share_pct) sum += v;
    row.premium_share_mean = sum / static_cast<double>(m.premium_share_pct.size());
  }
  row.properties_passed = out.properties && out.properties->all_passed() &&
                          (!out.smt_properties || out.smt_properties->all_passed());
  if (opt.cell_artifacts) {
    const auto dir = opt.out_dir / "cells" /
                     (row.config + "_tp" + std::to_string(row.total_prbs) + "_T" + std::to_string(row.horizon) +
                      "_s" + std::to_string(row.seed));
    write_outcome(dir, out, false);
    write_json(dir / "summary.json", summary_json(out, cell.config));
  }
  return row;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

const std::vector<std::string> kSweepColumns = {
    "config",           "total_prbs",        "horizon",          "seed",
    "exit_code",        "final_residual_prbs", "final_residual_fraction", "topups",
    "rampdowns",        "blocked_entries",   "premium_share_min", "premium_share_mean",
    "premium_share_max", "properties_passed", "solver_status",    "solver_wall_time",
    "assertions",       "diff_count",        "note"};

}  // namespace

SweepResult cmd_sweep(const SweepOptions& opt, std::ostream& log) {
  if (opt.configs.empty()) throw ValidationError("sweep needs at least one config");
  if (opt.seeds.empty()) throw ValidationError("sweep needs at least one seed");
  if (opt.mode != RunMode::oracle && resolve_solver_command(opt.solver_cmd).empty()) {
    throw ValidationError("sweep in solver mode requires a solver command");
  }
  SweepResult result;
  std::vector<Cell> cells;
  for (std::size_t c = 0; c < opt.configs.size(); ++c) {
    const NetworkConfig base = load_config_with(opt.configs[c], std::nullopt, std::nullopt);
    const std::vector<std::int64_t> tps = opt.total_prbs.empty() ? std::vector<std::int64_t>{base.total_prbs} : opt.total_prbs;
    const std::vector<int> hs = opt.horizons.empty() ? std::vector<int>{base.horizon} : opt.horizons;
    for (std::int64_t tp : tps) {
      for (int h : hs) {
        NetworkConfig config;
        try {
          config = load_config_with(opt.configs[c], tp, h);
        } catch (const ValidationError& e) {
          result.skipped.push_back({base.name, tp, h, e.what()});
          log << "skipping " << base.name << " at T_P=" << tp << ", T=" << h << ": " << e.what() << "\n";
          continue;
        }
        for (std::uint64_t seed : opt.seeds) cells.push_back({c, tp, h, seed, config});
      }
    }
  }

  result.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t n = next++; n < cells.size(); n = next++) {
      result.rows[n] = run_cell(opt, cells[n]);
      if (result.rows[n].exit_code != kExitOk) {
        const std::lock_guard lock(log_mutex);
        log << result.rows[n].config << " T_P=" << result.rows[n].total_prbs << " T=" << result.rows[n].horizon
            << " seed=" << result.rows[n].seed << ": exit " << result.rows[n].exit_code << ": " << result.rows[n].note
            << "\n";
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const SweepRow& r : result.rows) {
    if (r.exit_code != kExitOk) {
      result.exit_code = r.exit_code;
      break;
    }
  }
  write_text_file(opt.out_dir / "sweep.csv", sweep_to_csv(result.rows));
  std::ostringstream skipped;
  skipped << "config,total_prbs,horizon,reason\n";
  for (const auto& s : result.skipped) {
    skipped << csv::cell(s.config) << ',' << s.total_prbs << ',' << s.horizon << ',' << csv::cell(s.reason) << "\n";
  }
  write_text_file(opt.out_dir / "skipped.csv", skipped.str());
  log << "sweep: " << result.rows.size() << " rows, " << result.skipped.size() << " skipped (config, T_P, T) cells\n";
  return result;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < kSweepColumns.size(); ++c) out << (c ? "," : "") << kSweepColumns[c];
  out << "\n";
  for (const SweepRow& r : rows) {
    out << csv::cell(r.config) << ',' << r.total_prbs << ',' << r.horizon << ',' << r.seed << ',' << r.exit_code << ','
        << r.final_residual_prbs << ',' << fmt(r.final_residual_fraction) << ',' << r.topups << ',' << r.rampdowns
        << ',' << r.blocked_entries << ',' << fmt(r.premium_share_min) << ',' << fmt(r.premium_share_mean) << ','
        << fmt(r.premium_share_max) << ',' << (r.properties_passed ? 1 : 0) << ',' << r.solver_status << ','
        << fmt(r.solver_wall_time) << ',' << r.assertions << ',' << r.diff_count << ',' << csv::cell(r.note) << "\n";
  }
  return out.str();
}

std::vector<SweepRow> sweep_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0] != kSweepColumns) throw ValidationError("sweep CSV header does not match");
  std::vector<SweepRow> out;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto& c = rows[n];
    if (c.size() != kSweepColumns.size()) throw ValidationError("sweep CSV row " + std::to_string(n + 1) + " is short");
    SweepRow r;
    try {
      r.config = c[0];
      r.total_prbs = std::stoll(c[1]);
      r.horizon = std::stoi(c[2]);
      r.seed = std::stoull(c[3]);
      r.exit_code = std::stoi(c[4]);
      r.final_residual_prbs = std::stoll(c[5]);
      r.final_residual_fraction = std::stod(c[6]);
      r.topups = std::stoll(c[7]);
      r.rampdowns = std::stoll(c[8]);
      r.blocked_entries = std::stoll(c[9]);
      r.premium_share_min = std::stod(c[10]);
      r.premium_share_mean = std::stod(c[11]);
      r.premium_share_max = std::stod(c[12]);
      r.properties_passed = c[13] == "1";
      r.solver_status = c[14];
      r.solver_wall_time = std::stod(c[15]);
      r.assertions = std::stoull(c[16]);
      r.diff_count = std::stoull(c[17]);
      r.note = c[18];
    } catch (const std::exception&) {
      throw ValidationError("sweep CSV row " + std::to_string(n + 1) + " has a malformed cell");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CompareRow> compare_premium(const AllocationTrace& dynamic, const AllocationTrace& baseline) {
  if (dynamic.states.size() != baseline.states.size()) throw ValidationError("traces have different lengths");
  std::vector<CompareRow> rows;
  for (std::size_t n = 0; n < dynamic.states.size(); ++n) {
    CompareRow r;
    r.j = dynamic.states[n].j;
    r.dynamic_pct = premium_share_pct(dynamic.config, dynamic.states[n]);
    r.baseline_pct = premium_share_pct(baseline.config, baseline.states[n]);
    r.gap = r.baseline_pct - r.dynamic_pct;
    rows.push_back(r);
  }
  return rows;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "j,dynamic_premium_pct,baseline_premium_pct,gap\n";
  for (const CompareRow& r : rows) {
    out << r.j << ',' << fmt(r.dynamic_pct) << ',' << fmt(r.baseline_pct) << ',' << fmt(r.gap) << "\n";
  }
  return out.str();
}

std::vector<CompareRow> compare_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty() ||
      rows[0] != std::vector<std::string>{"j", "dynamic_premium_pct", "baseline_premium_pct", "gap"}) {
    throw ValidationError("compare CSV header does not match");
  }
  std::vector<CompareRow> out;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto& c = rows[n];
    if (c.size() != 4) throw ValidationError("compare CSV row " + std::to_string(n + 1) + " is short");
    out.push_back({std::stoi(c[0]), std::stod(c[1]), std::stod(c[2]), std::stod(c[3])});
  }
  return out;
}

int cmd_compare(const RunManifest& manifest, std::optional<Ratio> fraction, std::ostream& log) {
  manifest.check();
  const NetworkConfig config = load_config_with(manifest.config_path, manifest.total_prbs, manifest.horizon);
  const ScenarioTrace scenario = scenario_for(manifest, config);
  const AllocationTrace dynamic = simulate(config, scenario);
  const Ratio f = fraction.value_or(default_baseline_fraction(dynamic));
  const AllocationTrace baseline = baseline_overprovision(dynamic, f);
  const std::vector<CompareRow> rows = compare_premium(dynamic, baseline);

  const auto& dir = manifest.out_dir;
  write_json(dir / "manifest.json", manifest.to_json());
  write_json(dir / "scenario.json", scenario_to_json(scenario));
  write_text_file(dir / "trace.csv", trace_to_csv(dynamic));
  write_text_file(dir / "baseline_trace.csv", trace_to_csv(baseline));
  write_text_file(dir / "compare.csv", compare_to_csv(rows));

  double min_gap = rows.front().gap;
  double max_gap = rows.front().gap;
  for (const auto& r : rows) {
    min_gap = std::min(min_gap, r.gap);
    max_gap = std::max(max_gap, r.gap);
  }
  write_json(dir / "compare.json", {{"baseline_fraction", ratio_to_json(f)},
                                    {"min_gap_pct", min_gap},
                                    {"max_gap_pct", max_gap},
                                    {"final_gap_pct", rows.back().gap}});
  log << "compare " << config.name << ": baseline fraction " << f.to_string() << ", gap min " << min_gap << " max "
      << max_gap << " (percentage points)\n";
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (premium_share_pct(config, baseline.states[n]) < premium_share_pct(config, dynamic.states[n])) {
      log << "baseline premium share falls below the dynamic share at j=" << rows[n].j << "\n";
      return kExitProperty;
    }
  }
  return kExitOk;
}

int cmd_gen_scenario(const RunManifest& manifest, const std::filesystem::path& out_file, std::ostream& log) {
  const NetworkConfig config = load_config_with(manifest.config_path, manifest.total_prbs, manifest.horizon);
  const ScenarioTrace scenario = scenario_for(manifest, config);
  write_json(out_file, scenario_to_json(scenario));
  log << "wrote " << out_file.string() << " (S=" << config.num_services() << ", N=" << config.num_slices()
      << ", T=" << config.horizon << ", seed=" << scenario.seed << ")\n";
  return kExitOk;
}

int cmd_validate_config(const RunManifest& manifest, std::ostream& log) {
  const NetworkConfig config = load_config_with(manifest.config_path, manifest.total_prbs, manifest.horizon);
  log << config.name << ": S=" << config.num_services() << " K=" << config.num_partitions()
      << " N=" << config.num_slices() << " T_P=" << config.total_prbs << " T=" << config.horizon
      << " initial allocation " << config.initial_allocation() << " residual floor " << config.residual_floor()
      << " constraint bound " << constraint_count_bound(config) << "\n";
  return kExitOk;
}

int exit_code_for_current_exception(std::ostream& log) {
  try {
    throw;
  } catch (const ValidationError& e) {
    log << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ScenarioError& e) {
    log << "scenario error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SimulationError& e) {
    log << "simulation aborted: " << e.what() << "\n";
    return kExitProperty;
  } catch (const SolverProcessError& e) {
    log << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SolverParseError& e) {
    log << "solver output error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DecodeError& e) {
    log << "decode error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace prbslice
