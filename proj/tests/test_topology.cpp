#include <doctest.h>

#include <cmath>

#include "qclink/analysis.hpp"
#include "qclink/catalog.hpp"
#include "qclink/config.hpp"
#include "qclink/topology.hpp"

using namespace qclink;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

DetectorChain ideal_chain() {
  DetectorChain c;
  c.detector.efficiency = 1.0;
  c.detector.jitter_sigma_ps = 0.0;
  c.detector.dark_rate_hz = 0.0;
  c.detector.dead_time_ps = 0;
  c.tagger.jitter_sigma_ps = 0.0;
  c.tagger.resolution_ps = 1;
  return c;
}

Topology test_topology() {
  Topology topo;
  topo.switch_loss_db = 0.0;
  topo.nodes.push_back({"FNAL-FCC", NodeRole::SourceHub, {ideal_chain(), ideal_chain()}});
  topo.nodes.push_back({"ANL", NodeRole::EndNode, {ideal_chain(), ideal_chain()}});

  Route route;
  route.from = "FNAL-FCC";
  route.to = "ANL";
  route.coexistence_fiber = make_fiber(catalog_link("anl"));
  route.quantum_fiber = make_fiber(catalog_link("anl"));
  ClockSpec clk;
  clk.peak_power = Power::milliwatts(3.6);  // 1.8 mW average at 50% duty
  route.clock = clk;
  topo.routes.push_back(route);
  topo.validate();
  return topo;
}

}  // namespace

TEST_CASE("resolve_route") {
  const Topology topo = test_topology();
  const Route r = resolve_route(topo, "FNAL-FCC", "ANL");
  CHECK(r.coexistence_fiber.length_km == 57.0);
  CHECK(r.quantum_fiber.length_km == 57.0);

  const Route loop = resolve_route(topo, "FNAL-FCC", "FNAL-FCC");
  CHECK(loop.coexistence_fiber.length_km < 1e-3);
  CHECK(!loop.clock.has_value());
  CHECK(transmittance(loop.coexistence_fiber.alpha(Band::C), loop.coexistence_fiber.length_km) ==
        doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(resolve_route(topo, "FNAL-FCC", "NOWHERE"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_route(topo, "ANL", "FNAL-FCC"), std::invalid_argument);
}

TEST_CASE("scenario_build resolves rates and efficiencies") {
  const Topology topo = test_topology();
  const Route route = resolve_route(topo, "FNAL-FCC", "ANL");
  const PairSourceSpec src;

  const Scenario off = scenario_build(topo, route, src, false, 1'000'000'000ULL, 9);
  CHECK(off.raman_rate_hz == 0.0);
  CHECK(off.background_rate_hz(0) == 0.0);  // ideal detectors: dark 0
  CHECK(rel_err(off.fiber_transmittance[0], 0.0131412387126466) < 1e-9);
  CHECK(off.arm_efficiency(0) == off.fiber_transmittance[0]);  // no switch loss here

  const Scenario on = scenario_build(topo, route, src, true, 1'000'000'000ULL, 9);
  CHECK(rel_err(on.raman_rate_hz, 27833.7888414) < 1e-9);  // 1.8 mW avg O-band over ANL
  CHECK(on.background_rate_hz(0) == on.raman_rate_hz);
  CHECK(on.background_rate_hz(1) == 0.0);

  Route no_clock = route;
  no_clock.clock.reset();
  CHECK_THROWS_AS(scenario_build(topo, no_clock, src, true, 1'000'000'000ULL, 9),
                  std::invalid_argument);

  const SimResult empty = run_scenario(scenario_build(topo, route, src, false, 0, 9));
  CHECK(empty.streams[0].empty());
  CHECK(empty.streams[1].empty());
}

TEST_CASE("clock-off runs are byte-identical regardless of the clock spec carried") {
  const Topology topo = test_topology();
  Route route = resolve_route(topo, "FNAL-FCC", "ANL");
  const PairSourceSpec src;

  const SimResult a = run_scenario(scenario_build(topo, route, src, false, 200'000'000'000ULL, 5));
  route.clock->peak_power = Power::milliwatts(12.0);
  route.clock->band = Wavelength::nm(1610.0);
  const SimResult b = run_scenario(scenario_build(topo, route, src, false, 200'000'000'000ULL, 5));
  CHECK(a.streams[0] == b.streams[0]);
  CHECK(a.streams[1] == b.streams[1]);

  // and the raman background only appears once the clock is on
  const SimResult c = run_scenario(scenario_build(topo, route, src, true, 200'000'000'000ULL, 5));
  CHECK(c.streams[0].size() > a.streams[0].size());
}

TEST_CASE("loopback route reproduces the background-free CAR") {
  const Topology topo = test_topology();
  const Route loop = resolve_route(topo, "FNAL-FCC", "FNAL-FCC");
  const PairSourceSpec src;  // mu = 0.02
  const Scenario sc = scenario_build(topo, loop, src, false, 30'000'000'000ULL, 33);
  const SimResult r = run_scenario(sc);

  const CarResult car = car_estimate(histogram(r.streams[0], r.streams[1], 10, 60000));
  const double predicted = car_predict(src.mean_pairs_per_pulse, 1.0, 1.0, 0.0, 0.0);
  CHECK(std::fabs(car.car - predicted) <= 3.0 * car.sigma_car);
}

TEST_CASE("arm singles rates compose transmittance, efficiency and backgrounds") {
  Topology topo = test_topology();
  for (auto& node : topo.nodes)
    for (auto& chain : node.detectors) {
      chain.detector.efficiency = 0.5;
      chain.detector.dark_rate_hz = 1000.0;
    }
  topo.switch_loss_db = 1.0;
  const Route route = resolve_route(topo, "FNAL-FCC", "ANL");
  const PairSourceSpec src;
  const uint64_t duration = 1'000'000'000'000ULL;  // 1 s
  const Scenario sc = scenario_build(topo, route, src, true, duration, 44);
  const SimResult r = run_scenario(sc);

  for (int arm = 0; arm < 2; ++arm) {
    const double pair_rate = src.mean_pairs_per_pulse / (src.pulse_period_ps * 1e-12);
    const double expected = pair_rate * sc.arm_efficiency(arm) + sc.background_rate_hz(arm);
    const double got = static_cast<double>(r.streams[arm].size());
    CHECK(std::fabs(got - expected) <= 3.0 * std::sqrt(expected));
  }
}

TEST_CASE("topology validation catches structural errors") {
  Topology topo = test_topology();
  topo.nodes.push_back({"ANL", NodeRole::EndNode, {ideal_chain(), ideal_chain()}});
  CHECK_THROWS_AS(topo.validate(), std::invalid_argument);  // duplicate name

  Topology lacking = test_topology();
  lacking.nodes[1].detectors.pop_back();
  CHECK_THROWS_AS(lacking.validate(), std::invalid_argument);  // end node needs two detectors

  Topology bad_clock = test_topology();
  bad_clock.routes[0].coexistence_fiber.beta_by_pump.erase(Band::O);
  CHECK_THROWS_AS(bad_clock.validate(), std::invalid_argument);  // clock band needs beta
}
