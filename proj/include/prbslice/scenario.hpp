#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include <json.hpp>

#include "prbslice/model.hpp"

namespace prbslice {

enum class DistributionKind { lognormal, poisson, bernoulli };

/// A per-service arrival distribution plus the threshold that turns a drawn
/// density/mass value into an arrival flag.
///
/// lognormal and poisson draw a sample and evaluate the pdf/pmf at it; the
/// flag fires when that value exceeds `threshold`. bernoulli is already a
/// flag-valued distribution, so its 0/1 draw is compared directly.
class DistributionSpec {
 public:
  static DistributionSpec lognormal(double mu, double sigma, double threshold);
  static DistributionSpec poisson(double rate, double threshold);
  static DistributionSpec bernoulli(double p, double threshold);

  DistributionKind kind() const { return kind_; }
  double threshold() const { return threshold_; }
  double mu() const { return a_; }
  double sigma() const { return b_; }
  double rate() const { return a_; }
  double p() const { return a_; }

  nlohmann::json to_json() const;
  static DistributionSpec from_json(const nlohmann::json& doc);

 private:
  DistributionSpec(DistributionKind kind, double a, double b, double threshold);

  DistributionKind kind_;
  double a_;
  double b_;
  double threshold_;
};

/// Exogenous per-timestep user events. Flag vectors are indexed by timestep
/// j = 1..T at position j - 1; rows are services (arrivals) or slices
/// (departures) in id order.
struct ScenarioTrace {
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<std::vector<bool>> arrivals;
  std::vector<std::vector<bool>> departures;

  bool arrival(int service_id, int j) const {
    return arrivals[static_cast<std::size_t>(service_id - 1)][static_cast<std::size_t>(j - 1)];
  }
  bool departure(int slice_id, int j) const {
    return departures[static_cast<std::size_t>(slice_id - 1)][static_cast<std::size_t>(j - 1)];
  }

  /// All-false scenario sized for `config`.
  static ScenarioTrace empty(const NetworkConfig& config, std::uint64_t seed = 0);
  /// Throws ValidationError unless the matrices are S x T and N x T.
  void check_dimensions(const NetworkConfig& config) const;

  friend bool operator==(const ScenarioTrace&, const ScenarioTrace&) = default;
};

/// Scenario generation knobs stored alongside a config (the "scenario"
/// block of the config file).
struct ScenarioSettings {
  std::map<int, DistributionSpec> per_service;
  double departure_rate = 0.0;

  static ScenarioSettings from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Reads the "scenario" block of a config file. Throws ValidationError if absent.
ScenarioSettings load_scenario_settings(const std::filesystem::path& config_path);

/// Draws T values from `spec` and thresholds them. Deterministic in `seed`.
std::vector<bool> gen_arrivals(const DistributionSpec& spec, std::uint64_t seed, int horizon);

/// Arrival flags per service plus occupancy-gated departure flags per slice.
/// Departures are drawn as independent Bernoulli(departure_rate) coins and
/// dropped whenever the slice is empty at j - 1 in a forward replay.
ScenarioTrace gen_scenario(const NetworkConfig& config, const std::map<int, DistributionSpec>& per_service,
                           double departure_rate, std::uint64_t seed);

nlohmann::json scenario_to_json(const ScenarioTrace& scenario);
ScenarioTrace scenario_from_json(const nlohmann::json& doc);

}  // namespace prbslice
