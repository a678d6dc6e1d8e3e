#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "prbslice/ratio.hpp"

namespace prbslice {

/// Thrown when a configuration, scenario or parameter set is rejected.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServiceSpec {
  int service_id = 0;
  std::string name;
  int priority_rank = 0;  // lower = higher priority
  bool provision = false; // owns slices in more than one partition
};

struct SliceSpec {
  int slice_id = 0;
  int service_id = 0;
  int partition_id = 0;
  int t_win = 1;  // timesteps between allocation decisions
  int m = 1;      // users sharing one PRB
};

/// The (services, partitions, slices) topology plus the PRB budget.
///
/// All ids are 1-based and contiguous; `slices[i - 1]` is slice `i`, and the
/// same holds for services. `partitions` maps a partition id to its ordered
/// slice-id list.
struct NetworkConfig {
  std::string name;
  std::vector<ServiceSpec> services;
  std::vector<SliceSpec> slices;
  std::map<int, std::vector<int>> partitions;
  std::int64_t total_prbs = 0;
  int horizon = 0;
  Ratio overuse_fraction{1, 2};
  Ratio timestep_minutes{1, 1};

  int num_services() const { return static_cast<int>(services.size()); }
  int num_slices() const { return static_cast<int>(slices.size()); }
  int num_partitions() const { return static_cast<int>(partitions.size()); }

  const SliceSpec& slice(int slice_id) const { return slices.at(static_cast<std::size_t>(slice_id - 1)); }
  const ServiceSpec& service(int service_id) const {
    return services.at(static_cast<std::size_t>(service_id - 1));
  }
  const std::vector<int>& partition(int k) const { return partitions.at(k); }

  /// Per-window PRB quantum of a slice, ceil(t_win / m).
  std::int64_t window_usage(int slice_id) const;
  /// Slice ids owned by a service, ascending.
  std::vector<int> slices_of_service(int service_id) const;
  /// Smallest residual share that is not overuse: ceil(x * T_P).
  std::int64_t residual_floor() const { return overuse_fraction.ceil_mul(total_prbs); }
  /// Sum of the initial slice shares.
  std::int64_t initial_allocation() const;
  /// Services at the highest priority rank are the premium services.
  bool is_premium_service(int service_id) const;
  bool is_premium_slice(int slice_id) const { return is_premium_service(slice(slice_id).service_id); }
};

/// Checks every structural rule, including the budget feasibility rule
/// sum(W) + ceil(x * T_P) <= T_P. Throws ValidationError naming the first
/// broken rule.
void validate(const NetworkConfig& config);
/// Derives `provision` from slice ownership, then validates.
NetworkConfig normalized(NetworkConfig config);

/// Maximum PRB usage a slice can accumulate within one window: ceil(t_win / m).
std::int64_t max_window_usage(std::int64_t t_win, std::int64_t m);

struct ThroughputParams {
  int mimo_layers = 8;
  double modulation = 64.0;
  double scaling = 1.0;
  double r_max = 948.0 / 1024.0;
  int numerology = 1;
  int n_prb_bw = 38;
  double overhead = 0.14;
  double derate = 0.8;
};

namespace detail {

constexpr double per_prb_throughput(const ThroughputParams& p) {
  const double symbol_duration = 1e-3 / (14.0 * static_cast<double>(1 << p.numerology));
  const double per_prb = static_cast<double>(p.mimo_layers) * p.modulation * p.scaling * p.r_max *
                         (static_cast<double>(p.n_prb_bw) * 12.0 / symbol_duration) * (1.0 - p.overhead);
  return 1e-6 * per_prb * p.derate;
}

}  // namespace detail

/// Mbps per used PRB under the default parameters (about 4163.798).
inline constexpr double kThroughputPerPrb = detail::per_prb_throughput(ThroughputParams{});

/// Derated peak throughput for `prbs` used PRBs, in Mbps.
double nominal_throughput(const ThroughputParams& params, std::int64_t prbs);
/// Shorthand for nominal_throughput with default parameters.
double throughput(std::int64_t prbs);

/// T * (6N + sum_k 3^{r_k} + 3^K + sum_mu 2 n_mu). Throws std::overflow_error
/// when the value does not fit in 64 bits.
std::uint64_t constraint_count_bound(const NetworkConfig& config);

}  // namespace prbslice
