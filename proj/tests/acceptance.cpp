#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "prbslice/metrics.hpp"
#include "prbslice/oracle.hpp"
#include "prbslice/properties.hpp"
#include "prbslice/smt_decoder.hpp"
#include "prbslice/smt_encoder.hpp"
#include "prbslice/smt_solver.hpp"
#include "support.hpp"

using namespace prbslice;
using namespace testing_support;

namespace {

struct Cell {
  std::string config;
  std::uint64_t seed = 0;
  AllocationTrace oracle;
  std::optional<AllocationTrace> smt;
  SolverStatus status = SolverStatus::unknown;
  double solve_seconds = 0.0;
  std::string error;
};

struct Batch {
  std::string config;
  std::vector<Cell> cells;
  double seconds = 0.0;
};

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++failures;
}

Batch run_batch(const std::string& name, const std::string& solver) {
  Batch b;
  b.config = name;
  const NetworkConfig c = load_config(config_path(name));
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Cell cell;
    cell.config = name;
    cell.seed = seed;
    const ScenarioTrace s = default_scenario(name, c, seed);
    cell.oracle = simulate(c, s);
    try {
      const SolverVerdict v = solve(emit_smtlib(encode(c, s)), 600.0, solver);
      cell.status = v.status;
      cell.solve_seconds = v.wall_time;
      if (v.status == SolverStatus::sat) cell.smt = extract_trace(v, c, s);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    b.cells.push_back(std::move(cell));
  }
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return b;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

SliceState& at(AllocationTrace& t, int j, int i) {
  return t.states[static_cast<std::size_t>(j)].slices[static_cast<std::size_t>(i - 1)];
}

// One corruption per step invariant; each must be flagged by its property.
std::vector<std::pair<std::string, std::function<void(AllocationTrace&)>>> injected_faults() {
  return {
      {"conservation", [](AllocationTrace& t) { t.states[5].rp_shr += 1; }},
      {"partition_consistency",
       [](AllocationTrace& t) {
         t.states[7].pt_shr[0] += 1;
         t.states[7].rp_shr -= 1;
       }},
      {"slice_accounting", [](AllocationTrace& t) { at(t, 3, 2).usg += 1; }},
      {"share_immobility",
       [](AllocationTrace& t) {
         for (std::size_t j = 4; j < t.states.size(); ++j) {
           at(t, static_cast<int>(j), 1).shr += 5;
           at(t, static_cast<int>(j), 1).resi += 5;
           t.states[j].pt_shr[0] += 5;
           t.states[j].rp_shr -= 5;
         }
       }},
      {"share_quantization",
       [](AllocationTrace& t) {
         for (std::size_t j = 10; j < t.states.size(); ++j) {
           at(t, static_cast<int>(j), 1).shr += 1;
           at(t, static_cast<int>(j), 1).resi += 1;
           t.states[j].pt_shr[0] += 1;
           t.states[j].rp_shr -= 1;
         }
       }},
      {"signal_exclusion",
       [](AllocationTrace& t) {
         at(t, 9, 2).top = true;
         at(t, 9, 2).ramp = true;
       }},
      {"fairness",
       [](AllocationTrace& t) {
         SliceState& s = at(t, 6, 2);
         s.usg += s.resi + 1;
         s.resi = -1;
       }},
      {"optimality_band",
       [](AllocationTrace& t) {
         // Force a ramp-down of slice 1 at j = 20 that leaves resi = 2W.
         const std::int64_t w = t.config.window_usage(1);
         for (std::size_t j = 20; j < t.states.size(); ++j) {
           at(t, static_cast<int>(j), 1).shr = at(t, 19, 1).shr - w;
           at(t, static_cast<int>(j), 1).resi = 2 * w;
         }
       }},
      {"topup_gating",
       [](AllocationTrace& t) {
         t.states[10].rp_ovr = true;
         at(t, 10, 1).top = true;
       }},
      {"argmin_assignment",
       [](AllocationTrace& t) {
         for (int i : t.config.slices_of_service(1)) at(t, 1, i).en = true;
       }},
  };
}

}  // namespace

int main() {
  const std::string solver = resolve_solver_command();
  std::cout << "solver: " << solver << std::endl;

  std::vector<Batch> batches;
  for (const auto& name : reference_configs()) batches.push_back(run_batch(name, solver));

  // 1
  {
    bool ok = true;
    std::ostringstream detail;
    for (const Batch& b : batches) {
      int equal = 0;
      for (const Cell& c : b.cells) {
        if (c.smt && c.smt->states == c.oracle.states) ++equal;
        else if (!c.error.empty()) std::cerr << b.config << " seed " << c.seed << ": " << c.error << "\n";
      }
      ok = ok && equal == 30 && b.seconds < 600.0;
      detail << b.config << " " << equal << "/30 in " << fixed(b.seconds, 1) << " s; ";
    }
    report(1, ok, "solver traces equal oracle traces", detail.str());
  }

  // 2
  {
    int sat = 0;
    for (const Batch& b : batches) {
      for (const Cell& c : b.cells) sat += c.status == SolverStatus::sat ? 1 : 0;
    }
    bool rejected = false;
    try {
      NetworkConfig c = load_config(config_path("5-4-13"));
      c.total_prbs = 100;
      validate(c);
    } catch (const ValidationError&) {
      rejected = true;
    }
    report(2, sat == 120 && rejected, "every encoding is sat and (5,4,13) at T_P=100 is rejected",
           std::to_string(sat) + "/120 sat, rejected=" + (rejected ? "yes" : "no"));
  }

  // 3
  {
    const ThroughputParams p;
    const double per_prb = nominal_throughput(p, 1);
    const double per_prb_large = nominal_throughput(p, 1000) / 1000.0;
    const bool ok = std::abs(per_prb - 4163.798) <= 0.001 && std::abs(per_prb_large - 4163.798) <= 0.001;
    report(3, ok, "throughput coefficient 4163.798 Mbps per PRB", fixed(per_prb, 6));
  }

  // 4
  {
    const std::int64_t a = max_window_usage(28, 2);
    const std::int64_t b = max_window_usage(40, 3);
    report(4, a == 14 && b == 14, "window usage examples", std::to_string(a) + ", " + std::to_string(b));
  }

  // 5
  {
    const std::int64_t tu[] = {10};
    const std::int64_t rd[] = {15};
    const std::int64_t net = partition_net_change(tu, rd);
    const std::int64_t before[] = {20, 20};
    const std::int64_t after[] = {15, 28};  // partition 1 releases 5, partition 2 draws 8
    const std::int64_t rp = residual_adjust(before, after, 50) - 50;
    report(5, net == -5 && rp == -3, "worked partition and residual adjustments",
           "net " + std::to_string(net) + ", rp " + std::to_string(rp));
  }

  // 6
  {
    double worst = 1.0;
    std::ostringstream detail;
    for (const Batch& b : batches) {
      double m = 1.0;
      for (const Cell& c : b.cells) {
        const SystemState& last = c.oracle.states.back();
        m = std::min(m, static_cast<double>(last.rp_shr) / static_cast<double>(c.oracle.config.total_prbs));
      }
      worst = std::min(worst, m);
      detail << b.config << " min " << fixed(m) << "; ";
    }
    report(6, worst >= 0.5, "final residual fraction >= 0.5", detail.str());
  }

  // 7
  {
    int passed = 0;
    int total = 0;
    for (const Batch& b : batches) {
      for (const Cell& c : b.cells) {
        ++total;
        bool ok = check_all(c.oracle, c.oracle.config).all_passed();
        if (c.smt) ok = ok && check_all(*c.smt, c.oracle.config).all_passed();
        else ok = false;
        passed += ok ? 1 : 0;
      }
    }
    const AllocationTrace& base = batches[1].cells[0].oracle;  // (3,3,7), seed 1
    int caught = 0;
    std::string missed;
    const auto faults = injected_faults();
    for (const auto& [name, inject] : faults) {
      AllocationTrace t = base;
      inject(t);
      if (!check_all(t, t.config).at(name).passed) ++caught;
      else missed += name + " ";
    }
    report(7, passed == total && caught == static_cast<int>(faults.size()),
           "property suite passes on all traces and catches every injected fault",
           std::to_string(passed) + "/" + std::to_string(total) + " traces, " + std::to_string(caught) + "/" +
               std::to_string(faults.size()) + " faults" + (missed.empty() ? "" : ", missed " + missed));
  }

  // 8
  {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& name : reference_configs()) {
      for (int T : {30, 50, 70}) {
        NetworkConfig c = load_config(config_path(name));
        c.horizon = T;
        const std::size_t n = encode(c, ScenarioTrace::empty(c)).assertion_count();
        const std::uint64_t bound = constraint_count_bound(c);
        ok = ok && n <= kAssertionBoundFactor * bound;
        if (T == 70) detail << name << " " << n << "/" << bound << "; ";
      }
    }
    report(8, ok, "assertion count <= " + std::to_string(kAssertionBoundFactor) + " x bound",
           "T=70: " + detail.str());
  }

  // 9
  {
    double worst = 0.0;
    for (const Cell& c : batches[0].cells) worst = std::max(worst, c.solve_seconds);
    std::ostringstream detail;
    detail << "(3,2,4) max " << fixed(worst) << " s";
    for (std::size_t n = 1; n < batches.size(); ++n) {
      double m = 0.0;
      for (const Cell& c : batches[n].cells) m = std::max(m, c.solve_seconds);
      detail << ", " << batches[n].config << " max " << fixed(m) << " s";
    }
    report(9, worst > 0.0 && worst < 120.0, "(3,2,4) solves in under 120 s", detail.str());
  }

  // 10
  {
    bool ok = true;
    double gap_sum = 0.0;
    int points = 0;
    for (const Cell& c : batches[0].cells) {
      const AllocationTrace& d = c.oracle;
      const Ratio f = default_baseline_fraction(d);
      std::int64_t peak = 0;
      for (const SystemState& s : d.states) {
        std::int64_t p = 0;
        for (int i = 1; i <= d.config.num_slices(); ++i) {
          if (d.config.is_premium_slice(i)) p += s.slice(i).shr;
        }
        peak = std::max(peak, p);
      }
      ok = ok && f.floor_mul(d.config.total_prbs) >= peak;
      const AllocationTrace b = baseline_overprovision(d, f);
      for (std::size_t j = 0; j < d.states.size(); ++j) {
        const double gap = premium_share_pct(d.config, b.states[j]) - premium_share_pct(d.config, d.states[j]);
        ok = ok && gap >= 0.0;
        gap_sum += gap;
        ++points;
      }
    }
    report(10, ok, "baseline premium share dominates at every timestep",
           "mean gap " + fixed(gap_sum / points, 2) + " percentage points");
  }

  return failures == 0 ? 0 : 1;
}
