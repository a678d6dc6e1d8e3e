#include "prbslice/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "prbslice/config_io.hpp"
#include "prbslice/oracle.hpp"

namespace prbslice {

using nlohmann::json;

namespace {

constexpr std::uint64_t kArrivalStream = 0xA1;
constexpr std::uint64_t kDepartureStream = 0xD2;

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return stream_engine(seed, stream, index)();
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("distribution threshold must lie in (0, 1)");
}

const char* kind_name(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::lognormal: return "lognormal";
    case DistributionKind::poisson: return "poisson";
    case DistributionKind::bernoulli: return "bernoulli";
  }
  return "?";
}

double lognormal_pdf(double x, double mu, double sigma) {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double poisson_pmf(std::int64_t k, double rate) {
  return std::exp(static_cast<double>(k) * std::log(rate) - rate - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace

DistributionSpec::DistributionSpec(DistributionKind kind, double a, double b, double threshold)
    : kind_(kind), a_(a), b_(b), threshold_(threshold) {
  check_threshold(threshold);
}

DistributionSpec DistributionSpec::lognormal(double mu, double sigma, double threshold) {
  if (!(sigma > 0.0) || !std::isfinite(mu)) throw ValidationError("lognormal requires finite mu and sigma > 0");
  return DistributionSpec(DistributionKind::lognormal, mu, sigma, threshold);
}

DistributionSpec DistributionSpec::poisson(double rate, double threshold) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("poisson requires rate > 0");
  return DistributionSpec(DistributionKind::poisson, rate, 0.0, threshold);
}

DistributionSpec DistributionSpec::bernoulli(double p, double threshold) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("bernoulli requires p in [0, 1]");
  return DistributionSpec(DistributionKind::bernoulli, p, 0.0, threshold);
}

json DistributionSpec::to_json() const {
  json params;
  switch (kind_) {
    case DistributionKind::lognormal: params = {{"mu", a_}, {"sigma", b_}}; break;
    case DistributionKind::poisson: params = {{"rate", a_}}; break;
    case DistributionKind::bernoulli: params = {{"p", a_}}; break;
  }
  return {{"kind", kind_name(kind_)}, {"params", params}, {"threshold", threshold_}};
}

DistributionSpec DistributionSpec::from_json(const json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    const json& params = doc.at("params");
    const double threshold = doc.at("threshold").get<double>();
    if (kind == "lognormal") return lognormal(params.at("mu").get<double>(), params.at("sigma").get<double>(), threshold);
    if (kind == "poisson") return poisson(params.at("rate").get<double>(), threshold);
    if (kind == "bernoulli") return bernoulli(params.at("p").get<double>(), threshold);
    throw ValidationError("unknown distribution kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad distribution spec: ") + e.what());
  }
}

ScenarioTrace ScenarioTrace::empty(const NetworkConfig& config, std::uint64_t seed) {
  ScenarioTrace s;
  s.seed = seed;
  s.horizon = config.horizon;
  const auto T = static_cast<std::size_t>(config.horizon);
  s.arrivals.assign(static_cast<std::size_t>(config.num_services()), std::vector<bool>(T, false));
  s.departures.assign(static_cast<std::size_t>(config.num_slices()), std::vector<bool>(T, false));
  return s;
}

void ScenarioTrace::check_dimensions(const NetworkConfig& config) const {
  auto fail = [](const std::string& what) { throw ValidationError("scenario does not match config: " + what); };
  if (horizon != config.horizon) fail("horizon " + std::to_string(horizon) + " vs " + std::to_string(config.horizon));
  if (arrivals.size() != static_cast<std::size_t>(config.num_services())) fail("arrival rows != number of services");
  if (departures.size() != static_cast<std::size_t>(config.num_slices())) fail("departure rows != number of slices");
  for (const auto& row : arrivals) {
    if (row.size() != static_cast<std::size_t>(horizon)) fail("arrival row length != horizon");
  }
  for (const auto& row : departures) {
    if (row.size() != static_cast<std::size_t>(horizon)) fail("departure row length != horizon");
  }
}

ScenarioSettings ScenarioSettings::from_json(const json& doc) {
  ScenarioSettings out;
  out.departure_rate = doc.value("departure_rate", 0.0);
  if (!(out.departure_rate >= 0.0 && out.departure_rate <= 1.0)) {
    throw ValidationError("departure_rate must lie in [0, 1]");
  }
  if (!doc.contains("distributions") || !doc.at("distributions").is_object()) {
    throw ValidationError("scenario block needs a 'distributions' object keyed by service id");
  }
  for (const auto& [key, spec] : doc.at("distributions").items()) {
    out.per_service.emplace(std::stoi(key), DistributionSpec::from_json(spec));
  }
  return out;
}

json ScenarioSettings::to_json() const {
  json dists = json::object();
  for (const auto& [mu, spec] : per_service) dists[std::to_string(mu)] = spec.to_json();
  return {{"departure_rate", departure_rate}, {"distributions", dists}};
}

ScenarioSettings load_scenario_settings(const std::filesystem::path& config_path) {
  const json doc = json::parse(read_text_file(config_path));
  if (!doc.contains("scenario")) throw ValidationError(config_path.string() + " has no 'scenario' block");
  return ScenarioSettings::from_json(doc.at("scenario"));
}

std::vector<bool> gen_arrivals(const DistributionSpec& spec, std::uint64_t seed, int horizon) {
  if (horizon < 1) throw ValidationError("gen_arrivals requires T >= 1");
  std::mt19937_64 rng(seed);
  std::vector<bool> flags(static_cast<std::size_t>(horizon), false);
  switch (spec.kind()) {
    case DistributionKind::lognormal: {
      std::lognormal_distribution<double> dist(spec.mu(), spec.sigma());
      for (auto&& f : flags) f = lognormal_pdf(dist(rng), spec.mu(), spec.sigma()) > spec.threshold();
      break;
    }
    case DistributionKind::poisson: {
      std::poisson_distribution<std::int64_t> dist(spec.rate());
      for (auto&& f : flags) f = poisson_pmf(dist(rng), spec.rate()) > spec.threshold();
      break;
    }
    case DistributionKind::bernoulli: {
      std::bernoulli_distribution dist(spec.p());
      for (auto&& f : flags) f = (dist(rng) ? 1.0 : 0.0) > spec.threshold();
      break;
    }
  }
  return flags;
}

ScenarioTrace gen_scenario(const NetworkConfig& config, const std::map<int, DistributionSpec>& per_service,
                           double departure_rate, std::uint64_t seed) {
  validate(config);
  if (!(departure_rate >= 0.0 && departure_rate <= 1.0)) throw ValidationError("departure_rate must lie in [0, 1]");
  ScenarioTrace scenario = ScenarioTrace::empty(config, seed);
  if (config.horizon == 0) return scenario;

  for (int mu = 1; mu <= config.num_services(); ++mu) {
    auto it = per_service.find(mu);
    if (it == per_service.end()) throw ValidationError("no arrival distribution for service " + std::to_string(mu));
    scenario.arrivals[static_cast<std::size_t>(mu - 1)] =
        gen_arrivals(it->second, derive_seed(seed, kArrivalStream, static_cast<std::uint64_t>(mu)), config.horizon);
  }

  std::vector<std::vector<bool>> coins(static_cast<std::size_t>(config.num_slices()));
  for (int i = 1; i <= config.num_slices(); ++i) {
    std::mt19937_64 rng = stream_engine(seed, kDepartureStream, static_cast<std::uint64_t>(i));
    std::bernoulli_distribution coin(departure_rate);
    auto& row = coins[static_cast<std::size_t>(i - 1)];
    row.resize(static_cast<std::size_t>(config.horizon));
    for (auto&& c : row) c = coin(rng);
  }

  // Replay the user-count rule so that no departure fires from an empty slice.
  SystemState state = initial_state(config);
  for (int j = 1; j <= config.horizon; ++j) {
    std::vector<bool> leave(static_cast<std::size_t>(config.num_slices()), false);
    for (int i = 1; i <= config.num_slices(); ++i) {
      const bool wanted = coins[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
      leave[static_cast<std::size_t>(i - 1)] = wanted && state.slice(i).usr >= 1;
      scenario.departures[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
          leave[static_cast<std::size_t>(i - 1)];
    }
    state = advance(config, state, arrivals_at(scenario, j), leave);
  }
  return scenario;
}

json scenario_to_json(const ScenarioTrace& scenario) {
  auto rows = [](const std::vector<std::vector<bool>>& m) {
    json out = json::object();
    for (std::size_t r = 0; r < m.size(); ++r) {
      json flags = json::array();
      for (bool b : m[r]) flags.push_back(b ? 1 : 0);
      out[std::to_string(r + 1)] = flags;
    }
    return out;
  };
  return {{"seed", scenario.seed},
          {"horizon", scenario.horizon},
          {"arrivals", rows(scenario.arrivals)},
          {"departures", rows(scenario.departures)}};
}

ScenarioTrace scenario_from_json(const json& doc) {
  ScenarioTrace s;
  try {
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.horizon = doc.at("horizon").get<int>();
    auto rows = [&](const json& obj, const char* what) {
      std::vector<std::vector<bool>> out(obj.size());
      for (const auto& [key, flags] : obj.items()) {
        const int idx = std::stoi(key);
        if (idx < 1 || idx > static_cast<int>(obj.size())) {
          throw ValidationError(std::string(what) + " keys must be contiguous 1..n");
        }
        auto& row = out[static_cast<std::size_t>(idx - 1)];
        for (const json& f : flags) {
          const int v = f.get<int>();
          if (v != 0 && v != 1) throw ValidationError(std::string(what) + " flags must be 0 or 1");
          row.push_back(v == 1);
        }
      }
      return out;
    };
    s.arrivals = rows(doc.at("arrivals"), "arrivals");
    s.departures = rows(doc.at("departures"), "departures");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad scenario document: ") + e.what());
  }
  return s;
}

}  // namespace prbslice
