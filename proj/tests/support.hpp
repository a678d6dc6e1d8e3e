#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "prbslice/config_io.hpp"
#include "prbslice/model.hpp"
#include "prbslice/scenario.hpp"

namespace testing_support {

using namespace prbslice;

inline std::filesystem::path source_dir() { return PRBSLICE_SOURCE_DIR; }
inline std::filesystem::path config_path(const std::string& name) {
  return source_dir() / "configs" / (name + ".json");
}
inline std::filesystem::path fixture_path(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }

inline const std::vector<std::string>& reference_configs() {
  static const std::vector<std::string> names = {"3-2-4", "3-3-7", "5-3-10", "5-4-13"};
  return names;
}

inline NetworkConfig single_slice(int t_win, int m, std::int64_t total_prbs, int horizon) {
  NetworkConfig c;
  c.name = "single";
  c.services = {{1, "svc", 1, false}};
  c.slices = {{1, 1, 1, t_win, m}};
  c.partitions = {{1, {1}}};
  c.total_prbs = total_prbs;
  c.horizon = horizon;
  return normalized(c);
}

/// Two services in one partition: two premium slices (m=1) and one normal
/// slice (m=2).
inline NetworkConfig small_shared(std::int64_t total_prbs = 40, int horizon = 12) {
  NetworkConfig c;
  c.name = "small";
  c.services = {{1, "premium", 1, false}, {2, "normal", 2, false}};
  c.slices = {{1, 1, 1, 2, 1}, {2, 1, 1, 3, 1}, {3, 2, 2, 4, 2}};
  c.partitions = {{1, {1, 2}}, {2, {3}}};
  c.total_prbs = total_prbs;
  c.horizon = horizon;
  return normalized(c);
}

/// A random valid topology. `tight` makes the PRB budget close to the
/// validation minimum so the residual floor is reached.
inline NetworkConfig random_config(std::mt19937_64& rng, int horizon, bool tight) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  NetworkConfig c;
  c.name = "random";
  const int S = pick(1, 3);
  const int K = pick(1, 3);
  const int N = pick(std::max(S, K), 6);
  std::vector<int> m_of(static_cast<std::size_t>(S));
  int m = 1;
  for (int mu = 1; mu <= S; ++mu) {
    m += pick(0, 1);
    m_of[static_cast<std::size_t>(mu - 1)] = m;
    c.services.push_back({mu, "s" + std::to_string(mu), mu, false});
  }
  for (int i = 1; i <= N; ++i) {
    const int mu = i <= S ? i : pick(1, S);
    const int k = i <= K ? i : pick(1, K);
    c.slices.push_back({i, mu, k, pick(1, 8), m_of[static_cast<std::size_t>(mu - 1)]});
  }
  for (const SliceSpec& s : c.slices) c.partitions[s.partition_id].push_back(s.slice_id);
  std::int64_t w = 0;
  for (const SliceSpec& s : c.slices) w += max_window_usage(s.t_win, s.m);
  c.total_prbs = 2 * w + (tight ? pick(0, 3) : pick(w, 4 * w));
  c.horizon = horizon;
  return normalized(c);
}

inline std::map<int, DistributionSpec> bernoulli_arrivals(const NetworkConfig& c, double p) {
  std::map<int, DistributionSpec> out;
  for (int mu = 1; mu <= c.num_services(); ++mu) out.emplace(mu, DistributionSpec::bernoulli(p, 0.5));
  return out;
}

inline ScenarioTrace default_scenario(const std::string& config_name, const NetworkConfig& c, std::uint64_t seed) {
  const ScenarioSettings s = load_scenario_settings(config_path(config_name));
  return gen_scenario(c, s.per_service, s.departure_rate, seed);
}

}  // namespace testing_support
