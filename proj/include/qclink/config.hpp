#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclink/planner.hpp"
#include "qclink/topology.hpp"

namespace qclink {

struct AnalysisConfig {
  int64_t bin_width_ps = 10;
  int64_t range_ps = 60000;
  int64_t window_ps = 450;
  int64_t pulse_period_ps = 5000;
  int peaks_per_side = 10;
};

struct PlannerConfig {
  double rx_min_dbm = -40.0;
  double duty_cycle = 1.0;
  double delta_lambda_nm = kDefaultDeltaLambdaNm;
  CarModelInputs car;
};

/// Default scenario selection for `simulate` (overridable by flags).
struct ScenarioDefaults {
  std::string route_from = "FNAL-FCC";
  std::string route_to = "FNAL-FCC";
  std::string clock_mode = "off";  // off | on | O | L
};

/// Parsed and validated configuration: topology, pair source, clock system
/// and analysis/planner defaults. `raw` keeps the exact document for run
/// manifests.
struct ScenarioConfig {
  PairSourceSpec source;
  ClockSpec clock_base;  // band and peak power are set per route
  DriftModel drift;
  Topology topology;
  AnalysisConfig analysis;
  PlannerConfig planner;
  ScenarioDefaults scenario;
  nlohmann::json raw;
};

/// Names of the bundled configurations (dab-o-band, dab-l-band, anl-o-band,
/// anl-l-band, anl-no-clock), each encoding one operating point of the
/// deployed three-node network.
const std::vector<std::string>& preset_names();

/// The bundled configuration document for a preset name.
nlohmann::json preset_config(const std::string& name);

/// Loads a configuration from a preset name or a JSON file path. Unknown
/// keys and unresolvable references raise ConfigError with the JSON path.
ScenarioConfig load_config(const std::string& path_or_preset);

ScenarioConfig parse_config(const nlohmann::json& doc);

}  // namespace qclink
