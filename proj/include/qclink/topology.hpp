#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qclink/channel.hpp"
#include "qclink/photonics.hpp"
#include "qclink/sync.hpp"

namespace qclink {

struct DetectorChain {
  DetectorSpec detector;
  TaggerSpec tagger;
};

enum class NodeRole { SourceHub, EndNode };

struct Node {
  std::string name;
  NodeRole role = NodeRole::EndNode;
  std::vector<DetectorChain> detectors;
};

/// Directed connection from the source hub to a measurement node: the
/// coexistence fiber carries one photon of each pair multiplexed with the
/// optional clock, the quantum fiber carries the other photon.
struct Route {
  std::string from;
  std::string to;
  FiberSpec coexistence_fiber;
  FiberSpec quantum_fiber;
  std::optional<ClockSpec> clock;
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Route> routes;
  double switch_loss_db = 1.0;  // per pass through the optical switch

  const Node& node(const std::string& name) const;
  void validate() const;
};

/// Returns the configured route, or a synthesized loopback (patch-cord
/// fibers, no clock) when source == destination. Unknown nodes and
/// unconnected pairs are rejected.
Route resolve_route(const Topology& topo, const std::string& source,
                    const std::string& destination);

/// A fully bound simulation plan: resolved efficiencies, jitters,
/// background rates and delays for both arms, plus the clock offset
/// process when the clock is on.
struct Scenario {
  PairSourceSpec source;
  std::string from, to;
  bool clock_on = false;
  std::optional<ClockSpec> clock;
  DriftModel drift;
  double offset_sample_period_s = 1.0;
  uint64_t duration_ps = 0;
  uint64_t seed = 0;

  // per arm (0 = coexistence fiber, 1 = quantum-only fiber)
  DetectorChain chain[2];
  double fiber_transmittance[2] = {1.0, 1.0};
  double switch_transmittance = 1.0;
  int64_t delay_ps[2] = {0, 0};
  double raman_rate_hz = 0.0;  // detected rate on arm 0 when the clock is on

  double arm_efficiency(int arm) const {
    return fiber_transmittance[arm] * switch_transmittance * chain[arm].detector.efficiency;
  }
  double background_rate_hz(int arm) const {
    return chain[arm].detector.dark_rate_hz + (arm == 0 ? raman_rate_hz : 0.0);
  }
};

/// Binds a route, source and clock state into an executable scenario.
/// Requires the destination node to have at least two detector chains;
/// clock_on requires the route to carry a clock spec.
Scenario scenario_build(const Topology& topo, const Route& route,
                        const PairSourceSpec& source, bool clock_on,
                        uint64_t duration_ps, uint64_t seed);

struct SimResult {
  std::vector<TimeTag> streams[2];
  std::optional<OffsetSeries> offsets;
};

/// Runs the scenario: jointly thinned pair sampling per arm, Poisson
/// backgrounds at the detected rates (dark counts, plus Raman scattering
/// on the coexistence arm when the clock is on), dead time across the
/// merged arm stream, quantization, and the common derived-clock offset
/// applied to both channels when the clock is on.
SimResult run_scenario(const Scenario& sc);

}  // namespace qclink
