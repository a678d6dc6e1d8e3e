#include "prbslice/model.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace prbslice {

namespace {

[[noreturn]] void reject(const std::string& what) { throw ValidationError(what); }

std::uint64_t add_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("constraint count bound overflows 64 bits");
  return out;
}

std::uint64_t mul_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("constraint count bound overflows 64 bits");
  return out;
}

std::uint64_t pow3_checked(std::uint64_t exponent) {
  std::uint64_t out = 1;
  for (std::uint64_t e = 0; e < exponent; ++e) out = mul_checked(out, 3);
  return out;
}

}  // namespace

std::int64_t max_window_usage(std::int64_t t_win, std::int64_t m) {
  if (t_win < 1 || m < 1) {
    throw std::invalid_argument("max_window_usage requires t_win >= 1 and m >= 1");
  }
  return (t_win + m - 1) / m;
}

std::int64_t NetworkConfig::window_usage(int slice_id) const {
  const SliceSpec& s = slice(slice_id);
  return max_window_usage(s.t_win, s.m);
}

std::vector<int> NetworkConfig::slices_of_service(int service_id) const {
  std::vector<int> out;
  for (const SliceSpec& s : slices) {
    if (s.service_id == service_id) out.push_back(s.slice_id);
  }
  return out;
}

std::int64_t NetworkConfig::initial_allocation() const {
  std::int64_t sum = 0;
  for (const SliceSpec& s : slices) sum += max_window_usage(s.t_win, s.m);
  return sum;
}

bool NetworkConfig::is_premium_service(int service_id) const {
  int best = std::numeric_limits<int>::max();
  for (const ServiceSpec& s : services) best = std::min(best, s.priority_rank);
  return service(service_id).priority_rank == best;
}

void validate(const NetworkConfig& config) {
  const int S = config.num_services();
  const int N = config.num_slices();
  const int K = config.num_partitions();
  if (S == 0) reject("config has no services");
  if (N == 0) reject("config has no slices");
  if (K == 0) reject("config has no partitions");

  for (int mu = 1; mu <= S; ++mu) {
    if (config.services[static_cast<std::size_t>(mu - 1)].service_id != mu) {
      reject("service ids must be contiguous 1..S in order; position " + std::to_string(mu) + " holds id " +
             std::to_string(config.services[static_cast<std::size_t>(mu - 1)].service_id));
    }
  }

  for (int i = 1; i <= N; ++i) {
    const SliceSpec& s = config.slices[static_cast<std::size_t>(i - 1)];
    const std::string tag = "slice " + std::to_string(i);
    if (s.slice_id != i) reject("slice ids must be contiguous 1..N in order; position " + std::to_string(i) +
                                " holds id " + std::to_string(s.slice_id));
    if (s.service_id < 1 || s.service_id > S) reject(tag + " references unknown service " + std::to_string(s.service_id));
    if (!config.partitions.contains(s.partition_id)) {
      reject(tag + " references unknown partition " + std::to_string(s.partition_id));
    }
    if (s.t_win < 1) reject(tag + ": t_win must be >= 1");
    if (s.m < 1) reject(tag + ": m must be >= 1");
  }

  int expected_k = 1;
  std::set<int> seen;
  for (const auto& [k, members] : config.partitions) {
    if (k != expected_k++) reject("partition ids must be contiguous 1..K");
    if (members.empty()) reject("partition " + std::to_string(k) + " is empty");
    for (int i : members) {
      if (i < 1 || i > N) reject("partition " + std::to_string(k) + " lists unknown slice " + std::to_string(i));
      if (!seen.insert(i).second) reject("slice " + std::to_string(i) + " appears in more than one partition slot");
      if (config.slice(i).partition_id != k) {
        reject("slice " + std::to_string(i) + " declares partition " + std::to_string(config.slice(i).partition_id) +
               " but is listed under partition " + std::to_string(k));
      }
    }
  }
  if (static_cast<int>(seen.size()) != N) reject("partitions do not cover every slice");

  for (const ServiceSpec& svc : config.services) {
    const auto owned = config.slices_of_service(svc.service_id);
    if (owned.empty()) reject("service " + std::to_string(svc.service_id) + " owns no slice");
    if (svc.provision != (owned.size() >= 2)) {
      reject("service " + std::to_string(svc.service_id) + ": provision flag must be true iff it owns >= 2 slices");
    }
  }

  for (const SliceSpec& a : config.slices) {
    for (const SliceSpec& b : config.slices) {
      if (config.service(a.service_id).priority_rank < config.service(b.service_id).priority_rank && a.m > b.m) {
        reject("slice " + std::to_string(a.slice_id) + " has higher priority than slice " + std::to_string(b.slice_id) +
               " but a larger PRB-consumption m");
      }
    }
  }

  if (config.total_prbs < 1) reject("total_prbs must be positive");
  if (config.horizon < 0) reject("horizon must be non-negative");
  if (config.overuse_fraction.num == 0 || Ratio(1, 1) < config.overuse_fraction) {
    reject("overuse_fraction must lie in (0, 1]");
  }
  if (config.timestep_minutes.num == 0) reject("timestep_minutes must be positive");

  const std::int64_t needed = config.initial_allocation() + config.residual_floor();
  if (needed > config.total_prbs) {
    reject("infeasible PRB budget: initial slice shares " + std::to_string(config.initial_allocation()) +
           " + residual floor " + std::to_string(config.residual_floor()) + " = " + std::to_string(needed) +
           " exceeds total_prbs " + std::to_string(config.total_prbs));
  }
}

NetworkConfig normalized(NetworkConfig config) {
  for (ServiceSpec& svc : config.services) {
    std::size_t owned = 0;
    for (const SliceSpec& s : config.slices) owned += s.service_id == svc.service_id ? 1 : 0;
    svc.provision = owned >= 2;
  }
  validate(config);
  return config;
}

double nominal_throughput(const ThroughputParams& params, std::int64_t prbs) {
  if (prbs < 0) throw std::invalid_argument("PRB usage must be non-negative");
  if (params.overhead < 0.0 || params.overhead >= 1.0) throw ValidationError("overhead must lie in [0, 1)");
  if (params.derate <= 0.0 || params.derate > 1.0) throw ValidationError("derate must lie in (0, 1]");
  if (params.mimo_layers <= 0 || params.modulation <= 0.0 || params.scaling <= 0.0 || params.r_max <= 0.0 ||
      params.n_prb_bw <= 0 || params.numerology < 0 || params.numerology > 30) {
    throw ValidationError("throughput parameters must be positive");
  }
  // Every PRB contributes the same summand, so the sum over 1..J is J times it.
  return static_cast<double>(prbs) * detail::per_prb_throughput(params);
}

double throughput(std::int64_t prbs) {
  if (prbs < 0) throw std::invalid_argument("PRB usage must be non-negative");
  return kThroughputPerPrb * static_cast<double>(prbs);
}

std::uint64_t constraint_count_bound(const NetworkConfig& config) {
  const auto T = static_cast<std::uint64_t>(config.horizon);
  std::uint64_t per_step = mul_checked(6, static_cast<std::uint64_t>(config.num_slices()));
  for (const auto& [k, members] : config.partitions) per_step = add_checked(per_step, pow3_checked(members.size()));
  per_step = add_checked(per_step, pow3_checked(static_cast<std::uint64_t>(config.num_partitions())));
  for (const ServiceSpec& svc : config.services) {
    per_step = add_checked(per_step, mul_checked(2, config.slices_of_service(svc.service_id).size()));
  }
  return mul_checked(T, per_step);
}

}  // namespace prbslice
