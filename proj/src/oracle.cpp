#include "prbslice/oracle.hpp"

#include <numeric>
#include <sstream>

namespace prbslice {

namespace {

bool congruent(std::int64_t value, std::int64_t residue, std::int64_t modulus) {
  return ((value - residue) % modulus + modulus) % modulus == 0;
}

}  // namespace

SystemState initial_state(const NetworkConfig& config) {
  SystemState s;
  s.j = 0;
  s.slices.resize(static_cast<std::size_t>(config.num_slices()));
  for (int i = 1; i <= config.num_slices(); ++i) {
    SliceState& sl = s.slices[static_cast<std::size_t>(i - 1)];
    sl.shr = config.window_usage(i);
    sl.resi = sl.shr;
  }
  for (const auto& [k, members] : config.partitions) {
    std::int64_t share = 0;
    for (int i : members) share += config.window_usage(i);
    s.pt_shr.push_back(share);
  }
  s.rp_shr = config.total_prbs - config.initial_allocation();
  s.rp_ovr = false;
  return s;
}

bool residual_overused(const NetworkConfig& config, std::int64_t prev_rp_shr) {
  return prev_rp_shr < config.residual_floor();
}

std::vector<bool> assign_users(const NetworkConfig& config, const SystemState& prev, const std::vector<bool>& arrivals,
                               bool rp_ovr) {
  std::vector<bool> en(static_cast<std::size_t>(config.num_slices()), false);
  if (rp_ovr) return en;
  for (int mu = 1; mu <= config.num_services(); ++mu) {
    if (!arrivals[static_cast<std::size_t>(mu - 1)]) continue;
    const std::vector<int> owned = config.slices_of_service(mu);
    // Ascending ids with a strict comparison keep the lowest id on ties.
    int chosen = owned.front();
    for (int i : owned) {
      if (prev.slice(i).usr < prev.slice(chosen).usr) chosen = i;
    }
    en[static_cast<std::size_t>(chosen - 1)] = true;
  }
  return en;
}

std::int64_t step_user_count(std::int64_t prev_usr, bool en, bool lv) {
  if (lv && prev_usr == 0) throw ScenarioError("departure from an empty slice");
  if (en && !lv) return prev_usr + 1;
  if (!en && lv) return prev_usr - 1;
  return prev_usr;
}

std::int64_t step_window_entries(std::int64_t prev_entries, bool en, int j, int t_win) {
  if (congruent(j, 1, t_win)) return en ? 1 : 0;
  return en ? prev_entries + 1 : prev_entries;
}

UsageResidual step_usage_residual(std::int64_t prev_usg, std::int64_t prev_resi, std::int64_t usr, bool en, bool lv,
                                  std::int64_t m) {
  if (en && !lv && congruent(usr, 1, m)) return {prev_usg + 1, prev_resi - 1};
  if (!en && lv && congruent(usr, 0, m)) return {prev_usg - 1, prev_resi + 1};
  return {prev_usg, prev_resi};
}

Signals eval_signals(std::int64_t resi, std::int64_t entries, int j, int t_win, std::int64_t m, bool rp_ovr) {
  if (j < 1 || !congruent(j, 0, t_win)) return {};
  const std::int64_t quantum = max_window_usage(t_win, m);
  Signals s;
  s.top = !rp_ovr && resi <= quantum;
  s.ramp = resi - quantum >= quantum && entries == 0;
  return s;
}

std::int64_t partition_net_change(std::span<const std::int64_t> topup_quanta,
                                  std::span<const std::int64_t> rampdown_quanta) {
  const std::int64_t eta1 = std::accumulate(topup_quanta.begin(), topup_quanta.end(), std::int64_t{0});
  const std::int64_t eta2 = std::accumulate(rampdown_quanta.begin(), rampdown_quanta.end(), std::int64_t{0});
  if (eta1 > eta2) return eta1 - eta2;
  if (eta2 > eta1) return -(eta2 - eta1);
  return 0;
}

std::int64_t partition_adjust(const NetworkConfig& config, int k, std::vector<SliceState>& slices,
                              std::int64_t prev_pt_shr) {
  std::vector<std::int64_t> topups;
  std::vector<std::int64_t> rampdowns;
  for (int i : config.partition(k)) {
    SliceState& sl = slices[static_cast<std::size_t>(i - 1)];
    const std::int64_t quantum = config.window_usage(i);
    if (sl.top) {
      topups.push_back(quantum);
      sl.shr += quantum;
      sl.resi += quantum;
    } else if (sl.ramp) {
      rampdowns.push_back(quantum);
      sl.shr -= quantum;
      sl.resi -= quantum;
      if (sl.resi < 0) {
        throw std::logic_error("ramp-down drove the residual of slice " + std::to_string(i) + " negative");
      }
    }
  }
  return prev_pt_shr + partition_net_change(topups, rampdowns);
}

std::int64_t residual_adjust(std::span<const std::int64_t> prev_pt_shr, std::span<const std::int64_t> pt_shr,
                             std::int64_t prev_rp_shr, int j) {
  std::int64_t zeta1 = 0;  // PRBs drawn by top-up partitions
  std::int64_t zeta2 = 0;  // PRBs released by ramp-down partitions
  for (std::size_t k = 0; k < pt_shr.size(); ++k) {
    if (pt_shr[k] > prev_pt_shr[k]) zeta1 += pt_shr[k] - prev_pt_shr[k];
    if (pt_shr[k] < prev_pt_shr[k]) zeta2 += prev_pt_shr[k] - pt_shr[k];
  }
  std::int64_t rp = prev_rp_shr;
  if (zeta1 > zeta2) rp = prev_rp_shr - (zeta1 - zeta2);
  if (zeta2 > zeta1) rp = prev_rp_shr + (zeta2 - zeta1);
  if (rp < 0) {
    throw SimulationError(j, "residual partition share went negative (" + std::to_string(rp) + ") at j=" +
                                 std::to_string(j) + "; the PRB budget cannot cover the requested top-ups");
  }
  return rp;
}

SystemState advance(const NetworkConfig& config, const SystemState& prev, const std::vector<bool>& arrivals,
                    const std::vector<bool>& departures) {
  SystemState next;
  next.j = prev.j + 1;
  const int j = next.j;

  next.rp_ovr = residual_overused(config, prev.rp_shr);
  const std::vector<bool> en = assign_users(config, prev, arrivals, next.rp_ovr);

  next.slices.resize(prev.slices.size());
  for (int i = 1; i <= config.num_slices(); ++i) {
    const SliceSpec& spec = config.slice(i);
    const SliceState& before = prev.slice(i);
    SliceState& after = next.slices[static_cast<std::size_t>(i - 1)];
    after.en = en[static_cast<std::size_t>(i - 1)];
    after.lv = departures[static_cast<std::size_t>(i - 1)];
    try {
      after.usr = step_user_count(before.usr, after.en, after.lv);
    } catch (const ScenarioError& e) {
      throw ScenarioError(std::string(e.what()) + ": slice " + std::to_string(i) + " at j=" + std::to_string(j));
    }
    after.entries = step_window_entries(before.entries, after.en, j, spec.t_win);
    const UsageResidual ur = step_usage_residual(before.usg, before.resi, after.usr, after.en, after.lv, spec.m);
    after.usg = ur.usg;
    after.resi = ur.resi;
    after.shr = before.shr;
    const Signals sig = eval_signals(after.resi, after.entries, j, spec.t_win, spec.m, next.rp_ovr);
    after.top = sig.top;
    after.ramp = sig.ramp;
  }

  for (const auto& [k, members] : config.partitions) {
    next.pt_shr.push_back(partition_adjust(config, k, next.slices, prev.partition_share(k)));
  }
  next.rp_shr = residual_adjust(prev.pt_shr, next.pt_shr, prev.rp_shr, j);
  return next;
}

std::string state_violation(const NetworkConfig& config, const SystemState& state) {
  std::int64_t allocated = 0;
  for (int i = 1; i <= config.num_slices(); ++i) {
    const SliceState& s = state.slice(i);
    const std::string tag = "slice " + std::to_string(i) + ": ";
    if (s.usr < 0 || s.shr < 0 || s.usg < 0 || s.resi < 0 || s.entries < 0) {
      return tag + "negative quantity (fairness violation when resi < 0)";
    }
    if (s.shr != s.usg + s.resi) return tag + "shr != usg + resi";
    if (s.usg != (s.usr + config.slice(i).m - 1) / config.slice(i).m) return tag + "usg != ceil(usr / m)";
    if (s.top && s.ramp) return tag + "top-up and ramp-down signalled together";
  }
  for (const auto& [k, members] : config.partitions) {
    std::int64_t sum = 0;
    for (int i : members) sum += state.slice(i).shr;
    if (sum != state.partition_share(k)) return "partition " + std::to_string(k) + ": share != sum of slice shares";
    if (state.partition_share(k) < 0) return "partition " + std::to_string(k) + ": negative share";
    allocated += state.partition_share(k);
  }
  if (state.rp_shr < 0) return "negative residual share";
  if (allocated + state.rp_shr != config.total_prbs) return "partition shares + residual share != total_prbs";
  return {};
}

std::string describe_state(const NetworkConfig& config, const SystemState& state) {
  std::ostringstream out;
  out << "j=" << state.j << " rp_shr=" << state.rp_shr << " rp_ovr=" << state.rp_ovr << "\n";
  for (int k = 1; k <= config.num_partitions(); ++k) {
    out << "  partition " << k << " pt_shr=" << state.partition_share(k) << "\n";
  }
  for (int i = 1; i <= config.num_slices(); ++i) {
    const SliceState& s = state.slice(i);
    out << "  slice " << i << " usr=" << s.usr << " shr=" << s.shr << " usg=" << s.usg << " resi=" << s.resi
        << " E=" << s.entries << " en=" << s.en << " lv=" << s.lv << " top=" << s.top << " ramp=" << s.ramp << "\n";
  }
  return out.str();
}

std::vector<bool> arrivals_at(const ScenarioTrace& scenario, int j) {
  std::vector<bool> out;
  out.reserve(scenario.arrivals.size());
  for (const auto& row : scenario.arrivals) out.push_back(row[static_cast<std::size_t>(j - 1)]);
  return out;
}

std::vector<bool> departures_at(const ScenarioTrace& scenario, int j) {
  std::vector<bool> out;
  out.reserve(scenario.departures.size());
  for (const auto& row : scenario.departures) out.push_back(row[static_cast<std::size_t>(j - 1)]);
  return out;
}

AllocationTrace simulate(const NetworkConfig& config, const ScenarioTrace& scenario) {
  validate(config);
  scenario.check_dimensions(config);
  AllocationTrace trace{config, scenario, {}};
  trace.states.reserve(static_cast<std::size_t>(config.horizon) + 1);
  trace.states.push_back(initial_state(config));
  for (int j = 1; j <= config.horizon; ++j) {
    SystemState next = advance(config, trace.states.back(), arrivals_at(scenario, j), departures_at(scenario, j));
    if (const std::string why = state_violation(config, next); !why.empty()) {
      throw SimulationError(j, "invariant breach at j=" + std::to_string(j) + ": " + why + "\n" +
                                   describe_state(config, next));
    }
    trace.states.push_back(std::move(next));
  }
  return trace;
}

}  // namespace prbslice
