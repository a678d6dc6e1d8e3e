#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prbslice/model.hpp"
#include "prbslice/scenario.hpp"

namespace prbslice {

/// Scenario input the semantics cannot accept (a departure from an empty slice).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state invariant failed during forward execution. `what()` carries the
/// timestep and a dump of the offending state.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(int timestep, const std::string& message)
      : std::runtime_error(message), timestep_(timestep) {}
  int timestep() const { return timestep_; }

 private:
  int timestep_;
};

struct SliceState {
  std::int64_t usr = 0;
  std::int64_t shr = 0;
  std::int64_t usg = 0;
  std::int64_t resi = 0;
  std::int64_t entries = 0;  // users entered since the window began
  bool en = false;
  bool lv = false;
  bool top = false;
  bool ramp = false;

  friend bool operator==(const SliceState&, const SliceState&) = default;
};

struct SystemState {
  int j = 0;
  std::vector<SliceState> slices;   // index i - 1
  std::vector<std::int64_t> pt_shr; // index k - 1
  std::int64_t rp_shr = 0;
  bool rp_ovr = false;

  const SliceState& slice(int slice_id) const { return slices[static_cast<std::size_t>(slice_id - 1)]; }
  std::int64_t partition_share(int k) const { return pt_shr[static_cast<std::size_t>(k - 1)]; }

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct AllocationTrace {
  NetworkConfig config;
  ScenarioTrace scenario;
  std::vector<SystemState> states;  // j = 0..T
};

struct Signals {
  bool top = false;
  bool ramp = false;
  friend bool operator==(const Signals&, const Signals&) = default;
};

struct UsageResidual {
  std::int64_t usg = 0;
  std::int64_t resi = 0;
  friend bool operator==(const UsageResidual&, const UsageResidual&) = default;
};

/// usr = 0, usg = 0, shr = resi = W per slice, rp_shr = T_P - sum(W).
SystemState initial_state(const NetworkConfig& config);

/// True when the residual share of the previous step is below ceil(x * T_P).
bool residual_overused(const NetworkConfig& config, std::int64_t prev_rp_shr);

/// Entry flags per slice (index i - 1) for the arrivals at one timestep.
/// `arrivals[mu - 1]` is the arrival flag of service mu.
std::vector<bool> assign_users(const NetworkConfig& config, const SystemState& prev, const std::vector<bool>& arrivals,
                               bool rp_ovr);

/// User-count transition. Throws ScenarioError on a departure from an empty slice.
std::int64_t step_user_count(std::int64_t prev_usr, bool en, bool lv);

/// Entries since the window began; resets on j == 1 (mod t_win).
std::int64_t step_window_entries(std::int64_t prev_entries, bool en, int j, int t_win);

/// PRB usage/residual transition driven by the new user count. The residual
/// is not clamped: a negative value is reported by the caller's invariant check.
UsageResidual step_usage_residual(std::int64_t prev_usg, std::int64_t prev_resi, std::int64_t usr, bool en, bool lv,
                                  std::int64_t m);

/// Top-up / ramp-down signals; both false away from window boundaries.
Signals eval_signals(std::int64_t resi, std::int64_t entries, int j, int t_win, std::int64_t m, bool rp_ovr);

/// eta1 - eta2 for a partition given the quanta of its top-up and ramp-down slices.
std::int64_t partition_net_change(std::span<const std::int64_t> topup_quanta,
                                  std::span<const std::int64_t> rampdown_quanta);

/// Applies the signalled slice actions of partition k to `slices` (shr and
/// resi move by +-W) and returns the new partition share.
std::int64_t partition_adjust(const NetworkConfig& config, int k, std::vector<SliceState>& slices,
                              std::int64_t prev_pt_shr);

/// New residual share from the partition share deltas of one timestep.
/// Throws SimulationError if the residual share would go negative.
std::int64_t residual_adjust(std::span<const std::int64_t> prev_pt_shr, std::span<const std::int64_t> pt_shr,
                             std::int64_t prev_rp_shr, int j = 0);

/// One full timestep j from `prev`. Arrival and departure flags are given
/// per service / per slice for this timestep only.
SystemState advance(const NetworkConfig& config, const SystemState& prev, const std::vector<bool>& arrivals,
                    const std::vector<bool>& departures);

/// Checks the per-state invariants; returns an empty string when they hold,
/// otherwise a description of the first violation.
std::string state_violation(const NetworkConfig& config, const SystemState& state);

/// Human-readable dump of one state.
std::string describe_state(const NetworkConfig& config, const SystemState& state);

/// Forward execution for j = 1..T. Throws SimulationError on any invariant
/// breach and ScenarioError on an inadmissible scenario.
AllocationTrace simulate(const NetworkConfig& config, const ScenarioTrace& scenario);

/// Per-timestep flag slices of a scenario.
std::vector<bool> arrivals_at(const ScenarioTrace& scenario, int j);
std::vector<bool> departures_at(const ScenarioTrace& scenario, int j);

}  // namespace prbslice
