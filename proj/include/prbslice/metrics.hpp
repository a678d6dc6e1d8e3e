#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "prbslice/oracle.hpp"

namespace prbslice {

struct ResidualPoint {
  std::int64_t prbs = 0;
  double fraction = 0.0;  // of T_P

  friend bool operator==(const ResidualPoint&, const ResidualPoint&) = default;
};

struct MetricsBundle {
  std::vector<ResidualPoint> residual_share;            // index j
  std::vector<std::int64_t> topup_count;                 // index i - 1
  std::vector<std::int64_t> rampdown_count;              // index i - 1
  std::int64_t topup_total = 0;
  std::int64_t rampdown_total = 0;
  std::vector<std::vector<double>> throughput_offered;  // [j][i - 1], Mbps
  std::vector<double> premium_share_pct;                 // index j
  std::int64_t blocked_entries = 0;  // arrivals dropped because the residual partition was overused

  friend bool operator==(const MetricsBundle&, const MetricsBundle&) = default;
};

MetricsBundle compute_metrics(const AllocationTrace& trace, const NetworkConfig& config,
                              const ThroughputParams& params = {});

/// 100 * (PRBs held by premium slices) / T_P.
double premium_share_pct(const NetworkConfig& config, const SystemState& state);

/// Static over-provisioning stand-in for the comparison baseline.
///
/// floor(fraction * T_P) PRBs go to the premium slices at j = 0 (W each plus
/// the surplus spread evenly, remainder to the lowest slice ids); other
/// slices keep W. Shares never change afterwards. Users enter and leave
/// exactly as in the dynamic run of the same scenario, so residuals may go
/// negative when demand outgrows the fixed share.
/// Throws ValidationError when the premium slices would get less than their
/// W or the non-premium slices no longer fit.
AllocationTrace baseline_overprovision(const NetworkConfig& config, const ScenarioTrace& scenario,
                                       const Ratio& premium_share_fraction);
/// Same, replaying the user dynamics of an existing dynamic trace.
AllocationTrace baseline_overprovision(const AllocationTrace& dynamic, const Ratio& premium_share_fraction);

/// Largest fraction (with denominator T_P) the baseline accepts.
Ratio max_baseline_fraction(const NetworkConfig& config);

/// Over-provisioning factor applied to the dynamic run's peak premium share
/// when no baseline fraction is given.
inline const Ratio kDefaultOverprovision{14445, 10000};

/// kDefaultOverprovision times the peak premium share of `dynamic`, rounded
/// up to whole PRBs and capped at max_baseline_fraction.
Ratio default_baseline_fraction(const AllocationTrace& dynamic);

nlohmann::json metrics_to_json(const MetricsBundle& metrics);
MetricsBundle metrics_from_json(const nlohmann::json& doc);

/// Per-(j, slice) rows:
///   j,slice_id,usg,throughput_mbps,rp_shr,residual_fraction,premium_share_pct
std::string metrics_to_csv(const MetricsBundle& metrics, const AllocationTrace& trace);

struct MetricsCsvRow {
  int j = 0;
  int slice_id = 0;
  std::int64_t usg = 0;
  double throughput_mbps = 0.0;
  std::int64_t rp_shr = 0;
  double residual_fraction = 0.0;
  double premium_share_pct = 0.0;
};
std::vector<MetricsCsvRow> metrics_from_csv(const std::string& text);

}  // namespace prbslice
