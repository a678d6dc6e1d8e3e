#include "prbslice/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "csv.hpp"

namespace prbslice {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::int64_t premium_prbs(const NetworkConfig& config, const SystemState& state) {
  std::int64_t sum = 0;
  for (int i = 1; i <= config.num_slices(); ++i) {
    if (config.is_premium_slice(i)) sum += state.slice(i).shr;
  }
  return sum;
}

std::int64_t non_premium_floor(const NetworkConfig& config) {
  std::int64_t sum = 0;
  for (int i = 1; i <= config.num_slices(); ++i) {
    if (!config.is_premium_slice(i)) sum += config.window_usage(i);
  }
  return sum;
}

}  // namespace

double premium_share_pct(const NetworkConfig& config, const SystemState& state) {
  return 100.0 * static_cast<double>(premium_prbs(config, state)) / static_cast<double>(config.total_prbs);
}

MetricsBundle compute_metrics(const AllocationTrace& trace, const NetworkConfig& config, const ThroughputParams& params) {
  MetricsBundle m;
  const auto n_slices = static_cast<std::size_t>(config.num_slices());
  m.topup_count.assign(n_slices, 0);
  m.rampdown_count.assign(n_slices, 0);
  for (std::size_t n = 0; n < trace.states.size(); ++n) {
    const SystemState& s = trace.states[n];
    m.residual_share.push_back(
        {s.rp_shr, static_cast<double>(s.rp_shr) / static_cast<double>(config.total_prbs)});
    m.premium_share_pct.push_back(premium_share_pct(config, s));
    std::vector<double> tp;
    for (int i = 1; i <= config.num_slices(); ++i) tp.push_back(nominal_throughput(params, s.slice(i).usg));
    m.throughput_offered.push_back(std::move(tp));
    if (n == 0) continue;
    const SystemState& prev = trace.states[n - 1];
    for (int i = 1; i <= config.num_slices(); ++i) {
      const std::int64_t d = s.slice(i).shr - prev.slice(i).shr;
      const std::int64_t w = config.window_usage(i);
      if (d == w) ++m.topup_count[static_cast<std::size_t>(i - 1)];
      if (d == -w) ++m.rampdown_count[static_cast<std::size_t>(i - 1)];
    }
    if (s.rp_ovr && s.j <= trace.scenario.horizon) {
      for (int mu = 1; mu <= config.num_services(); ++mu) m.blocked_entries += trace.scenario.arrival(mu, s.j) ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < n_slices; ++i) {
    m.topup_total += m.topup_count[i];
    m.rampdown_total += m.rampdown_count[i];
  }
  return m;
}

Ratio max_baseline_fraction(const NetworkConfig& config) {
  return Ratio(config.total_prbs - non_premium_floor(config), config.total_prbs);
}

AllocationTrace baseline_overprovision(const NetworkConfig& config, const ScenarioTrace& scenario,
                                       const Ratio& premium_share_fraction) {
  return baseline_overprovision(simulate(config, scenario), premium_share_fraction);
}

AllocationTrace baseline_overprovision(const AllocationTrace& dynamic, const Ratio& premium_share_fraction) {
  const NetworkConfig& config = dynamic.config;
  std::vector<int> premium;
  std::int64_t premium_w = 0;
  for (int i = 1; i <= config.num_slices(); ++i) {
    if (config.is_premium_slice(i)) {
      premium.push_back(i);
      premium_w += config.window_usage(i);
    }
  }
  const std::int64_t budget = premium_share_fraction.floor_mul(config.total_prbs);
  if (budget < premium_w) {
    throw ValidationError("baseline fraction " + premium_share_fraction.to_string() + " gives " +
                          std::to_string(budget) + " PRBs, below the premium slices' initial need of " +
                          std::to_string(premium_w));
  }
  if (budget + non_premium_floor(config) > config.total_prbs) {
    throw ValidationError("baseline fraction " + premium_share_fraction.to_string() +
                          " leaves too few PRBs for the non-premium slices");
  }

  std::vector<std::int64_t> shares(static_cast<std::size_t>(config.num_slices()));
  for (int i = 1; i <= config.num_slices(); ++i) shares[static_cast<std::size_t>(i - 1)] = config.window_usage(i);
  const std::int64_t extra = budget - premium_w;
  const auto count = static_cast<std::int64_t>(premium.size());
  for (std::size_t p = 0; p < premium.size(); ++p) {
    shares[static_cast<std::size_t>(premium[p] - 1)] +=
        extra / count + (static_cast<std::int64_t>(p) < extra % count ? 1 : 0);
  }

  AllocationTrace out{config, dynamic.scenario, {}};
  std::int64_t prev_rp = 0;
  for (const SystemState& d : dynamic.states) {
    SystemState s = d;
    for (int i = 1; i <= config.num_slices(); ++i) {
      SliceState& x = s.slices[static_cast<std::size_t>(i - 1)];
      x.shr = shares[static_cast<std::size_t>(i - 1)];
      x.resi = x.shr - x.usg;
      x.top = false;
      x.ramp = false;
    }
    std::int64_t allocated = 0;
    for (const auto& [k, members] : config.partitions) {
      std::int64_t sum = 0;
      for (int i : members) sum += s.slice(i).shr;
      s.pt_shr[static_cast<std::size_t>(k - 1)] = sum;
      allocated += sum;
    }
    s.rp_shr = config.total_prbs - allocated;
    s.rp_ovr = s.j > 0 && residual_overused(config, prev_rp);
    prev_rp = s.rp_shr;
    out.states.push_back(std::move(s));
  }
  return out;
}

Ratio default_baseline_fraction(const AllocationTrace& dynamic) {
  const NetworkConfig& config = dynamic.config;
  std::int64_t peak = 0;
  for (const SystemState& s : dynamic.states) peak = std::max(peak, premium_prbs(config, s));
  const std::int64_t cap = config.total_prbs - non_premium_floor(config);
  return Ratio(std::min(kDefaultOverprovision.ceil_mul(peak), cap), config.total_prbs);
}

json metrics_to_json(const MetricsBundle& m) {
  json residual = json::array();
  for (const auto& p : m.residual_share) residual.push_back({{"prbs", p.prbs}, {"fraction", p.fraction}});
  return {{"residual_share", residual},
          {"topup_count", m.topup_count},
          {"rampdown_count", m.rampdown_count},
          {"topup_total", m.topup_total},
          {"rampdown_total", m.rampdown_total},
          {"throughput_offered", m.throughput_offered},
          {"premium_share_pct", m.premium_share_pct},
          {"blocked_entries", m.blocked_entries}};
}

MetricsBundle metrics_from_json(const json& doc) {
  MetricsBundle m;
  try {
    for (const json& p : doc.at("residual_share")) {
      m.residual_share.push_back({p.at("prbs").get<std::int64_t>(), p.at("fraction").get<double>()});
    }
    m.topup_count = doc.at("topup_count").get<std::vector<std::int64_t>>();
    m.rampdown_count = doc.at("rampdown_count").get<std::vector<std::int64_t>>();
    m.topup_total = doc.at("topup_total").get<std::int64_t>();
    m.rampdown_total = doc.at("rampdown_total").get<std::int64_t>();
    m.throughput_offered = doc.at("throughput_offered").get<std::vector<std::vector<double>>>();
    m.premium_share_pct = doc.at("premium_share_pct").get<std::vector<double>>();
    m.blocked_entries = doc.at("blocked_entries").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad metrics document: ") + e.what());
  }
  return m;
}

std::string metrics_to_csv(const MetricsBundle& m, const AllocationTrace& trace) {
  std::ostringstream out;
  out << "j,slice_id,usg,throughput_mbps,rp_shr,residual_fraction,premium_share_pct\n";
  for (std::size_t n = 0; n < trace.states.size(); ++n) {
    const SystemState& s = trace.states[n];
    for (int i = 1; i <= trace.config.num_slices(); ++i) {
      out << s.j << ',' << i << ',' << s.slice(i).usg << ',' << fmt(m.throughput_offered[n][static_cast<std::size_t>(i - 1)])
          << ',' << m.residual_share[n].prbs << ',' << fmt(m.residual_share[n].fraction) << ','
          << fmt(m.premium_share_pct[n]) << "\n";
    }
  }
  return out.str();
}

std::vector<MetricsCsvRow> metrics_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  const std::vector<std::string> header{"j", "slice_id", "usg", "throughput_mbps", "rp_shr", "residual_fraction",
                                        "premium_share_pct"};
  if (rows.empty() || rows[0] != header) throw ValidationError("metrics CSV header does not match");
  std::vector<MetricsCsvRow> out;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto& r = rows[n];
    if (r.size() != header.size()) throw ValidationError("metrics CSV row " + std::to_string(n + 1) + " is short");
    try {
      out.push_back({std::stoi(r[0]), std::stoi(r[1]), std::stoll(r[2]), std::stod(r[3]), std::stoll(r[4]),
                     std::stod(r[5]), std::stod(r[6])});
    } catch (const std::exception&) {
      throw ValidationError("metrics CSV row " + std::to_string(n + 1) + " has a non-numeric cell");
    }
  }
  return out;
}

}  // namespace prbslice
