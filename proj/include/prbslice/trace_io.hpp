#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prbslice/oracle.hpp"

namespace prbslice {

/// Column order of the trace CSV, one row per (j, slice):
///   j,slice_id,partition_id,usr,shr,usg,resi,E,en,lv,top,ramp,pt_shr,rp_shr,rp_ovr
/// pt_shr is the share of the slice's own partition; rp_shr and rp_ovr repeat
/// on every row of a timestep. Booleans are written as 0/1.
extern const std::vector<std::string> kTraceCsvColumns;

std::string trace_to_csv(const AllocationTrace& trace);
/// Rebuilds the states from CSV text; `config` supplies the topology.
std::vector<SystemState> states_from_csv(const std::string& text, const NetworkConfig& config);

nlohmann::json state_to_json(const SystemState& state);
SystemState state_from_json(const nlohmann::json& doc);

/// {"config": ..., "scenario": ..., "states": [...]}
nlohmann::json trace_to_json(const AllocationTrace& trace);
AllocationTrace trace_from_json(const nlohmann::json& doc);

struct TraceDifference {
  int j = 0;
  std::string variable;  // e.g. "sl_resi_2" or "rp_shr"
  std::string left;
  std::string right;

  friend bool operator==(const TraceDifference&, const TraceDifference&) = default;
};

/// Every field-level mismatch between two state sequences, in (j, variable)
/// order. A length mismatch is reported as a difference on "length".
std::vector<TraceDifference> diff_states(const std::vector<SystemState>& left, const std::vector<SystemState>& right);

/// Columns: j,variable,left,right
std::string diff_to_csv(const std::vector<TraceDifference>& diff);
std::vector<TraceDifference> diff_from_csv(const std::string& text);

}  // namespace prbslice
