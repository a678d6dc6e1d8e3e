#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prbslice/oracle.hpp"

namespace prbslice {

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::optional<int> first_violation_timestep;  // set iff !passed
  std::string details;                          // offending values of the first violation

  friend bool operator==(const PropertyResult&, const PropertyResult&) = default;
};

struct PropertyReport {
  std::vector<PropertyResult> results;

  bool all_passed() const;
  /// Throws std::out_of_range for an unknown property name.
  const PropertyResult& at(const std::string& name) const;
  std::vector<std::string> failed_names() const;

  friend bool operator==(const PropertyReport&, const PropertyReport&) = default;
};

/// Names in report order. The first ten are the per-trace invariants of the
/// step semantics; the rest are additional consistency checks.
extern const std::vector<std::string> kPropertyNames;

/// Evaluates every property over the states of `trace`. Never throws on a
/// violating trace; violations become report entries.
PropertyReport check_all(const AllocationTrace& trace, const NetworkConfig& config);

nlohmann::json report_to_json(const PropertyReport& report);
PropertyReport report_from_json(const nlohmann::json& doc);
/// Columns: property,passed,first_violation_timestep,details
std::string report_to_csv(const PropertyReport& report);
PropertyReport report_from_csv(const std::string& text);

}  // namespace prbslice
