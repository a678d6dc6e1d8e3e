#include "prbslice/properties.hpp"

#include <functional>
#include <sstream>

#include "csv.hpp"

namespace prbslice {

using nlohmann::json;

const std::vector<std::string> kPropertyNames = {
    "conservation",     "partition_consistency", "slice_accounting",        "share_immobility",
    "share_quantization", "signal_exclusion",    "fairness",                "optimality_band",
    "topup_gating",     "argmin_assignment",     "non_negativity",          "residual_floor_tracking",
    "initial_state",
};

namespace {

struct Violation {
  int j;
  std::string details;
};

using States = std::vector<SystemState>;
using Check = std::function<std::optional<Violation>(const NetworkConfig&, const AllocationTrace&)>;

std::string sl(int i) { return "slice " + std::to_string(i) + ": "; }

bool boundary(int j, int t_win) { return j >= 1 && j % t_win == 0; }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Residual after the Layer-1 updates and before the partition step. The
// partition step moves shr and resi by the same amount.
std::int64_t pre_adjust_residual(const SystemState& prev, const SystemState& cur, int i) {
  return cur.slice(i).resi - (cur.slice(i).shr - prev.slice(i).shr);
}

std::optional<Violation> conservation(const NetworkConfig& c, const AllocationTrace& t) {
  for (const SystemState& s : t.states) {
    std::int64_t sum = s.rp_shr;
    for (std::int64_t p : s.pt_shr) sum += p;
    if (sum != c.total_prbs) {
      return Violation{s.j, "sum(pt_shr) + rp_shr = " + std::to_string(sum) + ", T_P = " + std::to_string(c.total_prbs)};
    }
  }
  return std::nullopt;
}

std::optional<Violation> partition_consistency(const NetworkConfig& c, const AllocationTrace& t) {
  for (const SystemState& s : t.states) {
    for (const auto& [k, members] : c.partitions) {
      std::int64_t sum = 0;
      for (int i : members) sum += s.slice(i).shr;
      if (sum != s.partition_share(k)) {
        return Violation{s.j, "partition " + std::to_string(k) + ": pt_shr = " + std::to_string(s.partition_share(k)) +
                                  ", sum of slice shares = " + std::to_string(sum)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> slice_accounting(const NetworkConfig& c, const AllocationTrace& t) {
  for (const SystemState& s : t.states) {
    for (int i = 1; i <= c.num_slices(); ++i) {
      const SliceState& x = s.slice(i);
      if (x.shr != x.usg + x.resi) {
        return Violation{s.j, sl(i) + "shr = " + std::to_string(x.shr) + ", usg + resi = " +
                                  std::to_string(x.usg + x.resi)};
      }
      const std::int64_t want = ceil_div(x.usr, c.slice(i).m);
      if (x.usg != want) {
        return Violation{s.j, sl(i) + "usg = " + std::to_string(x.usg) + ", ceil(usr/m) = " + std::to_string(want)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> share_immobility(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 1; n < t.states.size(); ++n) {
    const SystemState& prev = t.states[n - 1];
    const SystemState& cur = t.states[n];
    for (int i = 1; i <= c.num_slices(); ++i) {
      if (!boundary(cur.j, c.slice(i).t_win) && cur.slice(i).shr != prev.slice(i).shr) {
        return Violation{cur.j, sl(i) + "shr moved mid-window from " + std::to_string(prev.slice(i).shr) + " to " +
                                    std::to_string(cur.slice(i).shr)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> share_quantization(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 1; n < t.states.size(); ++n) {
    for (int i = 1; i <= c.num_slices(); ++i) {
      const std::int64_t d = t.states[n].slice(i).shr - t.states[n - 1].slice(i).shr;
      const std::int64_t w = c.window_usage(i);
      if (d != 0 && d != w && d != -w) {
        return Violation{t.states[n].j, sl(i) + "shr changed by " + std::to_string(d) + ", W = " + std::to_string(w)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> signal_exclusion(const NetworkConfig& c, const AllocationTrace& t) {
  for (const SystemState& s : t.states) {
    for (int i = 1; i <= c.num_slices(); ++i) {
      if (s.slice(i).top && s.slice(i).ramp) return Violation{s.j, sl(i) + "top and ramp both set"};
    }
  }
  return std::nullopt;
}

std::optional<Violation> fairness(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 0; n < t.states.size(); ++n) {
    const SystemState& cur = t.states[n];
    for (int i = 1; i <= c.num_slices(); ++i) {
      if (cur.slice(i).resi < 0) return Violation{cur.j, sl(i) + "resi = " + std::to_string(cur.slice(i).resi)};
      if (n == 0 || !boundary(cur.j, c.slice(i).t_win) || cur.rp_ovr) continue;
      const SystemState& prev = t.states[n - 1];
      const std::int64_t w = c.window_usage(i);
      const std::int64_t before = pre_adjust_residual(prev, cur, i);
      const std::int64_t d = cur.slice(i).shr - prev.slice(i).shr;
      if (before <= w && d != w) {
        return Violation{cur.j, sl(i) + "top-up condition held (resi before adjustment " + std::to_string(before) +
                                    " <= W " + std::to_string(w) + ") but shr changed by " + std::to_string(d)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> optimality_band(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 1; n < t.states.size(); ++n) {
    const SystemState& cur = t.states[n];
    for (int i = 1; i <= c.num_slices(); ++i) {
      const std::int64_t w = c.window_usage(i);
      if (cur.slice(i).shr - t.states[n - 1].slice(i).shr != -w) continue;
      const std::int64_t r = cur.slice(i).resi;
      if (r < w || r >= 2 * w) {
        return Violation{cur.j, sl(i) + "resi after ramp-down = " + std::to_string(r) + ", band [" +
                                    std::to_string(w) + ", " + std::to_string(2 * w) + ")"};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> topup_gating(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 1; n < t.states.size(); ++n) {
    const SystemState& cur = t.states[n];
    for (int i = 1; i <= c.num_slices(); ++i) {
      const bool grew = cur.slice(i).shr - t.states[n - 1].slice(i).shr > 0;
      if ((cur.slice(i).top || grew) && cur.rp_ovr) {
        return Violation{cur.j, sl(i) + "top-up while the residual partition is overused"};
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> argmin_assignment(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 1; n < t.states.size(); ++n) {
    const SystemState& prev = t.states[n - 1];
    const SystemState& cur = t.states[n];
    for (int mu = 1; mu <= c.num_services(); ++mu) {
      const std::vector<int> owned = c.slices_of_service(mu);
      int chosen = 0;
      for (int x : owned) {
        if (!cur.slice(x).en) continue;
        if (chosen != 0) {
          return Violation{cur.j, "service " + std::to_string(mu) + ": slices " + std::to_string(chosen) + " and " +
                                      std::to_string(x) + " both admitted a user"};
        }
        chosen = x;
      }
      if (chosen == 0 || owned.size() < 2) continue;
      for (int y : owned) {
        if (y == chosen) continue;
        const std::int64_t ux = prev.slice(chosen).usr;
        const std::int64_t uy = prev.slice(y).usr;
        if (ux > uy || (ux == uy && y < chosen)) {
          return Violation{cur.j, "service " + std::to_string(mu) + ": chose slice " + std::to_string(chosen) +
                                      " (usr " + std::to_string(ux) + ") over slice " + std::to_string(y) + " (usr " +
                                      std::to_string(uy) + ")"};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Violation> non_negativity(const NetworkConfig& c, const AllocationTrace& t) {
  for (const SystemState& s : t.states) {
    for (int i = 1; i <= c.num_slices(); ++i) {
      const SliceState& x = s.slice(i);
      if (x.usr < 0 || x.shr < 0 || x.usg < 0 || x.resi < 0 || x.entries < 0) {
        return Violation{s.j, sl(i) + "negative value (usr " + std::to_string(x.usr) + ", shr " +
                                  std::to_string(x.shr) + ", usg " + std::to_string(x.usg) + ", resi " +
                                  std::to_string(x.resi) + ", E " + std::to_string(x.entries) + ")"};
      }
    }
    for (std::size_t k = 0; k < s.pt_shr.size(); ++k) {
      if (s.pt_shr[k] < 0) return Violation{s.j, "partition " + std::to_string(k + 1) + ": negative pt_shr"};
    }
    if (s.rp_shr < 0) return Violation{s.j, "rp_shr = " + std::to_string(s.rp_shr)};
  }
  return std::nullopt;
}

std::optional<Violation> residual_floor_tracking(const NetworkConfig& c, const AllocationTrace& t) {
  for (std::size_t n = 0; n < t.states.size(); ++n) {
    const SystemState& cur = t.states[n];
    const bool want = n > 0 && residual_overused(c, t.states[n - 1].rp_shr);
    if (cur.rp_ovr != want) {
      return Violation{cur.j, "rp_ovr = " + std::to_string(cur.rp_ovr) + ", expected " + std::to_string(want) +
                                  " (floor " + std::to_string(c.residual_floor()) + ")"};
    }
  }
  return std::nullopt;
}

std::optional<Violation> initial_state_check(const NetworkConfig& c, const AllocationTrace& t) {
  if (t.states.empty()) return Violation{0, "trace has no states"};
  if (!(t.states.front() == initial_state(c))) {
    return Violation{0, "state 0 differs from the canonical initial state"};
  }
  return std::nullopt;
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      conservation,     partition_consistency, slice_accounting, share_immobility,        share_quantization,
      signal_exclusion, fairness,              optimality_band,  topup_gating,            argmin_assignment,
      non_negativity,   residual_floor_tracking, initial_state_check,
  };
  return all;
}

std::optional<Violation> shape_problem(const NetworkConfig& c, const AllocationTrace& t) {
  if (t.states.size() != static_cast<std::size_t>(c.horizon) + 1) {
    return Violation{0, "trace has " + std::to_string(t.states.size()) + " states, expected " +
                            std::to_string(c.horizon + 1)};
  }
  for (std::size_t n = 0; n < t.states.size(); ++n) {
    const SystemState& s = t.states[n];
    if (s.j != static_cast<int>(n) || s.slices.size() != static_cast<std::size_t>(c.num_slices()) ||
        s.pt_shr.size() != static_cast<std::size_t>(c.num_partitions())) {
      return Violation{static_cast<int>(n), "state shape does not match the config"};
    }
  }
  return std::nullopt;
}

}  // namespace

bool PropertyReport::all_passed() const {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

const PropertyResult& PropertyReport::at(const std::string& name) const {
  for (const auto& r : results) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no property named " + name);
}

std::vector<std::string> PropertyReport::failed_names() const {
  std::vector<std::string> out;
  for (const auto& r : results) {
    if (!r.passed) out.push_back(r.name);
  }
  return out;
}

PropertyReport check_all(const AllocationTrace& trace, const NetworkConfig& config) {
  PropertyReport report;
  const std::optional<Violation> shape = shape_problem(config, trace);
  for (std::size_t n = 0; n < kPropertyNames.size(); ++n) {
    PropertyResult r;
    r.name = kPropertyNames[n];
    const std::optional<Violation> v = shape ? shape : checks()[n](config, trace);
    if (v) {
      r.passed = false;
      r.first_violation_timestep = v->j;
      r.details = v->details;
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

json report_to_json(const PropertyReport& report) {
  json props = json::array();
  for (const auto& r : report.results) {
    props.push_back({{"name", r.name},
                     {"passed", r.passed},
                     {"first_violation_timestep", r.first_violation_timestep ? json(*r.first_violation_timestep) : json()},
                     {"details", r.details}});
  }
  return {{"all_passed", report.all_passed()}, {"properties", props}};
}

PropertyReport report_from_json(const json& doc) {
  PropertyReport report;
  try {
    for (const json& p : doc.at("properties")) {
      PropertyResult r;
      r.name = p.at("name").get<std::string>();
      r.passed = p.at("passed").get<bool>();
      if (!p.at("first_violation_timestep").is_null()) r.first_violation_timestep = p.at("first_violation_timestep").get<int>();
      r.details = p.value("details", std::string{});
      report.results.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad property report: ") + e.what());
  }
  return report;
}

std::string report_to_csv(const PropertyReport& report) {
  std::ostringstream out;
  out << "property,passed,first_violation_timestep,details\n";
  for (const auto& r : report.results) {
    out << r.name << ',' << (r.passed ? 1 : 0) << ','
        << (r.first_violation_timestep ? std::to_string(*r.first_violation_timestep) : std::string{}) << ','
        << csv::cell(r.details) << "\n";
  }
  return out.str();
}

PropertyReport report_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"property", "passed", "first_violation_timestep", "details"}) {
    throw ValidationError("property CSV header does not match");
  }
  PropertyReport report;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto& row = rows[n];
    if (row.size() != 4) throw ValidationError("property CSV row " + std::to_string(n + 1) + " needs 4 cells");
    PropertyResult r;
    r.name = row[0];
    r.passed = row[1] == "1";
    if (!row[2].empty()) r.first_violation_timestep = std::stoi(row[2]);
    r.details = row[3];
    report.results.push_back(std::move(r));
  }
  return report;
}

}  // namespace prbslice
