#include "qclink/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "qclink/catalog.hpp"
#include "qclink/rng.hpp"

namespace qclink {

namespace {

FiberSpec patch_cord() {
  FiberSpec f;
  f.length_km = 1e-6;  // 1 mm jumper standing in for a local connection
  f.alpha_by_band = {{Band::O, Attenuation::per_km(0.0)},
                     {Band::C, Attenuation::per_km(0.0)},
                     {Band::L, Attenuation::per_km(0.0)}};
  f.beta_by_pump = {{Band::O, RamanCoefficient{}}, {Band::L, RamanCoefficient{}}};
  return f;
}

}  // namespace

const Node& Topology::node(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n;
  throw std::invalid_argument("topology: unknown node " + name);
}

void Topology::validate() const {
  std::set<std::string> names;
  for (const auto& n : nodes) {
    if (!names.insert(n.name).second)
      throw std::invalid_argument("topology: duplicate node name " + n.name);
    if (n.role == NodeRole::EndNode && n.detectors.size() < 2)
      throw std::invalid_argument("topology: end node " + n.name +
                                  " needs at least two detectors");
    for (const auto& c : n.detectors) {
      c.detector.validate();
      c.tagger.validate();
    }
  }
  if (!(switch_loss_db >= 0.0))
    throw std::invalid_argument("topology: switch loss must be >= 0 dB");
  for (const auto& r : routes) {
    node(r.from);
    node(r.to);
    r.coexistence_fiber.validate();
    r.quantum_fiber.validate();
    if (r.clock) {
      r.clock->validate();
      const Band band = r.clock->band.band();
      r.coexistence_fiber.alpha(band);
      r.coexistence_fiber.beta(band);
    }
  }
}

Route resolve_route(const Topology& topo, const std::string& source,
                    const std::string& destination) {
  topo.node(source);
  topo.node(destination);
  if (source == destination) {
    Route loopback;
    loopback.from = source;
    loopback.to = destination;
    loopback.coexistence_fiber = patch_cord();
    loopback.quantum_fiber = patch_cord();
    return loopback;
  }
  for (const auto& r : topo.routes)
    if (r.from == source && r.to == destination) return r;
  throw std::invalid_argument("topology: no route from " + source + " to " + destination);
}

Scenario scenario_build(const Topology& topo, const Route& route,
                        const PairSourceSpec& source, bool clock_on,
                        uint64_t duration_ps, uint64_t seed) {
  source.validate();
  const Node& dst = topo.node(route.to);
  if (dst.detectors.size() < 2)
    throw std::invalid_argument("scenario: destination node " + dst.name +
                                " needs two detectors (one per arm)");
  if (clock_on && !route.clock)
    throw std::invalid_argument("scenario: clock requested but the route has no clock spec");

  Scenario sc;
  sc.source = source;
  sc.from = route.from;
  sc.to = route.to;
  sc.clock_on = clock_on;
  sc.clock = route.clock;
  sc.duration_ps = duration_ps;
  sc.seed = seed;
  sc.chain[0] = dst.detectors[0];
  sc.chain[1] = dst.detectors[1];
  sc.switch_transmittance = std::pow(10.0, -topo.switch_loss_db / 10.0);

  const Band quantum_band = source.wavelength.band();
  sc.fiber_transmittance[0] =
      transmittance(route.coexistence_fiber.alpha(quantum_band), route.coexistence_fiber.length_km);
  sc.fiber_transmittance[1] =
      transmittance(route.quantum_fiber.alpha(quantum_band), route.quantum_fiber.length_km);
  sc.delay_ps[0] = propagation_delay_ps(route.coexistence_fiber.length_km,
                                        route.coexistence_fiber.group_index);
  sc.delay_ps[1] =
      propagation_delay_ps(route.quantum_fiber.length_km, route.quantum_fiber.group_index);

  if (clock_on) {
    const ClockSpec& clk = *route.clock;
    const Band pump = clk.band.band();
    sc.raman_rate_hz = raman_count_rate_hz(
        average_launch_power(clk), route.coexistence_fiber.beta(pump),
        make_raman_context(pump), route.coexistence_fiber.length_km,
        route.coexistence_fiber.alpha(quantum_band), route.coexistence_fiber.alpha(pump),
        source.wavelength);
  }
  return sc;
}

SimResult run_scenario(const Scenario& sc) {
  SimResult result;
  if (sc.duration_ps == 0) {
    result.streams[0] = {};
    result.streams[1] = {};
    return result;
  }

  double sigma[2];
  for (int arm = 0; arm < 2; ++arm)
    sigma[arm] = std::hypot(sc.source.photon_sigma_ps,
                            std::hypot(sc.chain[arm].detector.jitter_sigma_ps,
                                       sc.chain[arm].tagger.jitter_sigma_ps));

  auto [arm0, arm1] = sample_detected_pairs(
      sc.source, sc.arm_efficiency(0), sc.arm_efficiency(1), sigma[0], sigma[1],
      sc.duration_ps, derive_seed(sc.seed, "scenario.pairs"));

  ArrivalStream* arms[2] = {&arm0, &arm1};
  for (int arm = 0; arm < 2; ++arm) {
    ArrivalStream& s = *arms[arm];
    const int64_t delay = sc.delay_ps[arm];
    for (int64_t& t : s) t += delay;

    const std::string tag = "scenario.arm" + std::to_string(arm);
    ArrivalStream dark = background_stream(sc.chain[arm].detector.dark_rate_hz,
                                           sc.duration_ps, derive_seed(sc.seed, tag + ".dark"));
    ArrivalStream merged;
    merged.reserve(s.size() + dark.size() + 16);
    std::merge(s.begin(), s.end(), dark.begin(), dark.end(), std::back_inserter(merged));
    if (arm == 0 && sc.clock_on && sc.raman_rate_hz > 0.0) {
      ArrivalStream raman = background_stream(sc.raman_rate_hz, sc.duration_ps,
                                              derive_seed(sc.seed, tag + ".raman"));
      ArrivalStream merged2;
      merged2.reserve(merged.size() + raman.size());
      std::merge(merged.begin(), merged.end(), raman.begin(), raman.end(),
                 std::back_inserter(merged2));
      merged = std::move(merged2);
    }

    apply_dead_time(merged, sc.chain[arm].detector.dead_time_ps);
    quantize(merged, sc.chain[arm].tagger.resolution_ps);
    result.streams[arm] = to_tags(merged, static_cast<uint16_t>(arm));
  }

  if (sc.clock_on) {
    // cover the run plus propagation delays and offset shifts, with slack
    const double span_s = (static_cast<double>(sc.duration_ps) +
                           static_cast<double>(std::max(sc.delay_ps[0], sc.delay_ps[1]))) *
                          1e-12;
    const double sample_s = sc.offset_sample_period_s;
    const double covered_s = (std::ceil(span_s / sample_s) + 1.0) * sample_s;
    result.offsets = simulate_offsets(*sc.clock, sc.drift, covered_s, sample_s,
                                      derive_seed(sc.seed, "scenario.offsets"));
    for (auto& stream : result.streams)
      stream = apply_clock_offset(stream, *result.offsets);
  }
  return result;
}

}  // namespace qclink
