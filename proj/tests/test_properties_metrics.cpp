#include <doctest.h>

#include <cmath>
#include <functional>

#include "prbslice/metrics.hpp"
#include "prbslice/oracle.hpp"
#include "prbslice/properties.hpp"
#include "support.hpp"

using namespace prbslice;
using namespace testing_support;

namespace {

AllocationTrace reference_trace(const std::string& name, std::uint64_t seed) {
  const NetworkConfig c = load_config(config_path(name));
  return simulate(c, default_scenario(name, c, seed));
}

AllocationTrace saturated_single() {
  const NetworkConfig c = single_slice(2, 1, 8, 8);
  ScenarioTrace s = ScenarioTrace::empty(c);
  s.arrivals[0].assign(8, true);
  return simulate(c, s);
}

SliceState& slice_of(AllocationTrace& t, int j, int i) {
  return t.states[static_cast<std::size_t>(j)].slices[static_cast<std::size_t>(i - 1)];
}

// Only the named property may be expected to fail first at `j`; others may
// fail as well when the fault touches more than one relation.
void expect_caught(const AllocationTrace& t, const std::string& property, int j) {
  const PropertyReport r = check_all(t, t.config);
  CAPTURE(property);
  CHECK_FALSE(r.all_passed());
  const PropertyResult& p = r.at(property);
  CHECK_FALSE(p.passed);
  REQUIRE(p.first_violation_timestep.has_value());
  CHECK(*p.first_violation_timestep == j);
  CHECK_FALSE(p.details.empty());
}

std::int64_t premium_prbs(const NetworkConfig& c, const SystemState& s) {
  std::int64_t n = 0;
  for (int i = 1; i <= c.num_slices(); ++i) {
    if (c.is_premium_slice(i)) n += s.slice(i).shr;
  }
  return n;
}

}  // namespace

TEST_CASE("property names") {
  CHECK(kPropertyNames.size() == 13);
  const PropertyReport r = check_all(saturated_single(), single_slice(2, 1, 8, 8));
  REQUIRE(r.results.size() == kPropertyNames.size());
  for (std::size_t n = 0; n < r.results.size(); ++n) CHECK(r.results[n].name == kPropertyNames[n]);
  CHECK_THROWS_AS(r.at("nope"), std::out_of_range);
}

TEST_CASE("oracle traces satisfy every property") {
  for (const auto& name : reference_configs()) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const AllocationTrace t = reference_trace(name, seed);
      const PropertyReport r = check_all(t, t.config);
      CAPTURE(name);
      CAPTURE(seed);
      CHECK(r.failed_names().empty());
      CHECK(r.all_passed());
    }
  }
  std::mt19937_64 rng(11);
  for (int n = 0; n < 100; ++n) {
    const NetworkConfig c = random_config(rng, 30, false);
    const AllocationTrace t = simulate(c, gen_scenario(c, bernoulli_arrivals(c, 0.5), 0.3, rng()));
    // The ramp-down band is not implied by the step rules (see the case
    // below); every other property must hold on any oracle trace.
    for (const auto& f : check_all(t, c).failed_names()) CHECK(f == "optimality_band");
  }
  CHECK(check_all(saturated_single(), single_slice(2, 1, 8, 8)).all_passed());
}

TEST_CASE("a top-up at resi == W can leave a ramp-down above the band") {
  // W = 2. Two users arrive, the slice is topped up at j = 2 (resi 0 -> 2)
  // and again at j = 4 (resi 2 -> 4). Both users leave in the next window,
  // so resi reaches 6 = 3W and the ramp-down at j = 6 leaves 4 = 2W.
  const NetworkConfig c = single_slice(2, 1, 40, 6);
  ScenarioTrace s = ScenarioTrace::empty(c);
  s.arrivals[0][0] = s.arrivals[0][1] = true;
  s.departures[0][4] = s.departures[0][5] = true;
  const AllocationTrace t = simulate(c, s);
  CHECK(t.states[4].slice(1).top);
  CHECK(t.states[4].slice(1).resi == 4);
  CHECK(t.states[6].slice(1).ramp);
  CHECK(t.states[6].slice(1).resi == 4);
  const PropertyReport r = check_all(t, c);
  CHECK(r.failed_names() == std::vector<std::string>{"optimality_band"});
  CHECK(r.at("optimality_band").first_violation_timestep == 6);
}

TEST_CASE("injected faults are caught") {
  const AllocationTrace base = reference_trace("3-3-7", 1);
  const NetworkConfig& c = base.config;

  SUBCASE("conservation") {
    AllocationTrace t = base;
    t.states[5].rp_shr += 1;
    expect_caught(t, "conservation", 5);
  }
  SUBCASE("partition consistency") {
    AllocationTrace t = base;
    t.states[7].pt_shr[0] += 1;
    t.states[7].rp_shr -= 1;
    expect_caught(t, "partition_consistency", 7);
    CHECK(check_all(t, c).at("conservation").passed);
  }
  SUBCASE("slice accounting") {
    AllocationTrace t = base;
    slice_of(t, 3, 2).usg += 1;
    expect_caught(t, "slice_accounting", 3);
  }
  SUBCASE("shares move only at boundaries") {
    // Slice 1 is premium with t_win = 10; j = 4 is mid-window.
    AllocationTrace t = base;
    for (int j = 4; j <= c.horizon; ++j) {
      slice_of(t, j, 1).shr += 5;
      slice_of(t, j, 1).resi += 5;
      t.states[static_cast<std::size_t>(j)].pt_shr[0] += 5;
      t.states[static_cast<std::size_t>(j)].rp_shr -= 5;
    }
    expect_caught(t, "share_immobility", 4);
    CHECK(check_all(t, c).at("share_quantization").passed);
  }
  SUBCASE("shares move by whole quanta") {
    AllocationTrace t = base;
    for (int j = 10; j <= c.horizon; ++j) {
      slice_of(t, j, 1).shr += 1;
      slice_of(t, j, 1).resi += 1;
      t.states[static_cast<std::size_t>(j)].pt_shr[0] += 1;
      t.states[static_cast<std::size_t>(j)].rp_shr -= 1;
    }
    expect_caught(t, "share_quantization", 10);
    CHECK(check_all(t, c).at("share_immobility").passed);
  }
  SUBCASE("signal exclusion") {
    AllocationTrace t = base;
    slice_of(t, 9, 3).top = true;
    slice_of(t, 9, 3).ramp = true;
    expect_caught(t, "signal_exclusion", 9);
  }
  SUBCASE("negative residual") {
    AllocationTrace t = base;
    SliceState& s = slice_of(t, 6, 2);
    s.usg += s.resi + 1;
    s.resi = -1;
    expect_caught(t, "fairness", 6);
    expect_caught(t, "non_negativity", 6);
  }
  SUBCASE("withheld top-up") {
    // Slice 1 is topped up at j = 10 in every seed (resi drops to <= W).
    AllocationTrace t = base;
    REQUIRE(slice_of(t, 10, 1).top);
    for (int j = 10; j <= c.horizon; ++j) {
      slice_of(t, j, 1).shr -= 5;
      slice_of(t, j, 1).resi -= 5;
      t.states[static_cast<std::size_t>(j)].pt_shr[0] -= 5;
      t.states[static_cast<std::size_t>(j)].rp_shr += 5;
    }
    slice_of(t, 10, 1).top = false;
    expect_caught(t, "fairness", 10);
  }
  SUBCASE("ramp-down outside the band") {
    const NetworkConfig s = single_slice(2, 1, 40, 6);
    AllocationTrace t = simulate(s, ScenarioTrace::empty(s));
    REQUIRE(slice_of(t, 4, 1).ramp);
    slice_of(t, 4, 1).resi = 4;
    expect_caught(t, "optimality_band", 4);
  }
  SUBCASE("top-up under overuse") {
    AllocationTrace t = saturated_single();
    REQUIRE(t.states[6].rp_ovr);
    slice_of(t, 6, 1).top = true;
    expect_caught(t, "topup_gating", 6);
  }
  SUBCASE("user sent to a busier slice") {
    AllocationTrace t = base;
    bool done = false;
    for (int j = 2; j <= c.horizon && !done; ++j) {
      for (int mu = 1; mu <= c.num_services() && !done; ++mu) {
        const auto owned = c.slices_of_service(mu);
        if (owned.size() < 2) continue;
        for (int x : owned) {
          if (!slice_of(t, j, x).en) continue;
          const int y = x == owned.front() ? owned.back() : owned.front();
          slice_of(t, j, x).en = false;
          slice_of(t, j, y).en = true;
          expect_caught(t, "argmin_assignment", j);
          done = true;
          break;
        }
      }
    }
    CHECK(done);
  }
  SUBCASE("two slices admit one arrival") {
    AllocationTrace t = base;
    for (int i : c.slices_of_service(1)) slice_of(t, 1, i).en = true;
    expect_caught(t, "argmin_assignment", 1);
  }
  SUBCASE("overuse flag out of step") {
    AllocationTrace t = base;
    t.states[3].rp_ovr = !t.states[3].rp_ovr;
    expect_caught(t, "residual_floor_tracking", 3);
  }
  SUBCASE("initial state") {
    AllocationTrace t = base;
    t.states[0].slices[1].top = true;
    expect_caught(t, "initial_state", 0);
  }
  SUBCASE("trace shape") {
    AllocationTrace t = base;
    t.states.pop_back();
    const PropertyReport r = check_all(t, c);
    CHECK(r.failed_names().size() == kPropertyNames.size());
  }
}

TEST_CASE("report round trips") {
  AllocationTrace t = reference_trace("3-2-4", 3);
  t.states[4].rp_shr += 1;
  slice_of(t, 8, 1).top = true;
  slice_of(t, 8, 1).ramp = true;
  const PropertyReport r = check_all(t, t.config);
  CHECK(report_from_json(report_to_json(r)) == r);
  CHECK(report_from_csv(report_to_csv(r)) == r);
  CHECK(report_to_json(r)["all_passed"] == false);
  CHECK_THROWS(report_from_csv("a,b\n"));
}

TEST_CASE("metrics follow the trace") {
  const AllocationTrace t = saturated_single();
  const MetricsBundle m = compute_metrics(t, t.config);
  REQUIRE(m.residual_share.size() == 9);
  CHECK(m.residual_share[0] == ResidualPoint{6, 0.75});
  CHECK(m.residual_share[4] == ResidualPoint{2, 0.25});
  CHECK(m.topup_count == std::vector<std::int64_t>{2});
  CHECK(m.rampdown_count == std::vector<std::int64_t>{0});
  CHECK(m.topup_total == 2);
  CHECK(m.blocked_entries == 4);
  CHECK(m.throughput_offered[4][0] == doctest::Approx(throughput(4)));
  CHECK(m.premium_share_pct[4] == doctest::Approx(75.0));

  for (const auto& name : reference_configs()) {
    const AllocationTrace p = reference_trace(name, 5);
    const MetricsBundle b = compute_metrics(p, p.config);
    std::int64_t tops = 0;
    std::int64_t ramps = 0;
    for (const SystemState& s : p.states) {
      for (const SliceState& sl : s.slices) {
        tops += sl.top ? 1 : 0;
        ramps += sl.ramp ? 1 : 0;
      }
    }
    CHECK(b.topup_total == tops);
    CHECK(b.rampdown_total == ramps);
    for (std::size_t j = 0; j < p.states.size(); ++j) {
      CHECK(b.residual_share[j].fraction ==
            doctest::Approx(static_cast<double>(p.states[j].rp_shr) / static_cast<double>(p.config.total_prbs)));
    }
  }
}

TEST_CASE("premium share counts PRBs of the top-ranked service") {
  const NetworkConfig c = load_config(config_path("5-3-10"));
  SystemState s = initial_state(c);
  const double before = premium_share_pct(c, s);
  CHECK(before == doctest::Approx(100.0 * 15.0 / 200.0));
  s.slices[0].shr += 14;  // slice 1 is premium
  CHECK(premium_share_pct(c, s) - before == doctest::Approx(1400.0 / 200.0));
  s.slices[1].shr += 9;   // not premium
  CHECK(premium_share_pct(c, s) - before == doctest::Approx(1400.0 / 200.0));
  CHECK(c.is_premium_service(1));
  for (int mu = 2; mu <= c.num_services(); ++mu) CHECK_FALSE(c.is_premium_service(mu));
}

TEST_CASE("baseline fraction limits") {
  const NetworkConfig c = load_config(config_path("3-2-4"));
  const ScenarioTrace s = default_scenario("3-2-4", c, 1);
  const Ratio top = max_baseline_fraction(c);
  // 200 - (4 + 4) non-premium PRBs.
  CHECK(top == Ratio(192, 200));
  CHECK_NOTHROW(baseline_overprovision(c, s, top));
  CHECK_THROWS_AS(baseline_overprovision(c, s, Ratio(193, 200)), ValidationError);
  CHECK_NOTHROW(baseline_overprovision(c, s, Ratio(10, 200)));
  CHECK_THROWS_AS(baseline_overprovision(c, s, Ratio(9, 200)), ValidationError);

  const AllocationTrace b = baseline_overprovision(c, s, Ratio(21, 200));
  // 21 PRBs over two premium slices: 11 and 10.
  CHECK(b.states[0].slice(1).shr == 11);
  CHECK(b.states[0].slice(3).shr == 10);
  CHECK(b.states[0].slice(2).shr == 4);
  for (const SystemState& st : b.states) {
    CHECK(st.slice(1).shr == 11);
    CHECK(st.rp_shr == 200 - 21 - 8);
  }
}

TEST_CASE("baseline replays the dynamic user counts") {
  const AllocationTrace d = reference_trace("3-3-7", 2);
  const AllocationTrace b = baseline_overprovision(d, Ratio(60, 200));
  for (std::size_t j = 0; j < d.states.size(); ++j) {
    for (int i = 1; i <= d.config.num_slices(); ++i) {
      CHECK(b.states[j].slice(i).usr == d.states[j].slice(i).usr);
      CHECK(b.states[j].slice(i).usg == d.states[j].slice(i).usg);
      CHECK(b.states[j].slice(i).resi == b.states[j].slice(i).shr - b.states[j].slice(i).usg);
    }
  }
}

TEST_CASE("default baseline dominates the dynamic premium share") {
  for (const auto& name : reference_configs()) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const AllocationTrace d = reference_trace(name, seed);
      const Ratio f = default_baseline_fraction(d);
      std::int64_t peak = 0;
      for (const SystemState& s : d.states) peak = std::max(peak, premium_prbs(d.config, s));
      const std::int64_t want = std::min((peak * 14445 + 9999) / 10000, max_baseline_fraction(d.config).floor_mul(200));
      CHECK(f.floor_mul(200) == want);
      const AllocationTrace b = baseline_overprovision(d, f);
      for (std::size_t j = 0; j < d.states.size(); ++j) {
        CHECK(premium_share_pct(d.config, b.states[j]) >= premium_share_pct(d.config, d.states[j]));
      }
    }
  }
}

TEST_CASE("empty scenario baseline at the initial fraction") {
  const NetworkConfig c = load_config(config_path("3-2-4"));
  const ScenarioTrace s = ScenarioTrace::empty(c);
  const AllocationTrace b = baseline_overprovision(c, s, Ratio(10, 200));
  for (const SystemState& st : b.states) {
    CHECK(premium_prbs(c, st) == 10);
    CHECK(st.rp_shr == 200 - 18);
  }
}

TEST_CASE("metrics serialisation round trips") {
  const AllocationTrace t = reference_trace("5-4-13", 4);
  const MetricsBundle m = compute_metrics(t, t.config);
  CHECK(metrics_from_json(metrics_to_json(m)) == m);
  const std::vector<MetricsCsvRow> rows = metrics_from_csv(metrics_to_csv(m, t));
  REQUIRE(rows.size() == static_cast<std::size_t>(31 * t.config.num_slices()));
  for (const MetricsCsvRow& r : rows) {
    const auto j = static_cast<std::size_t>(r.j);
    CHECK(r.usg == t.states[j].slice(r.slice_id).usg);
    CHECK(r.rp_shr == t.states[j].rp_shr);
    CHECK(r.throughput_mbps == doctest::Approx(m.throughput_offered[j][static_cast<std::size_t>(r.slice_id - 1)]));
    CHECK(r.premium_share_pct == doctest::Approx(m.premium_share_pct[j]));
    CHECK(r.residual_fraction == doctest::Approx(m.residual_share[j].fraction));
  }
}
