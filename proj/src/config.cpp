#include "qclink/config.hpp"

#include <fstream>
#include <set>

#include "qclink/errors.hpp"

namespace qclink {

namespace {

using nlohmann::json;

/// Strict object view: every key must be consumed, leftovers are errors.
class ObjReader {
 public:
  ObjReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object", path_);
  }

  bool has(const char* key) const { return j_.contains(key); }

  double num(const char* key) {
    const json& v = get(key);
    if (!v.is_number()) throw ConfigError(path_ + "/" + key + ": expected a number");
    return v.get<double>();
  }
  double num_or(const char* key, double fallback) {
    return has(key) ? num(key) : fallback;
  }
  int64_t integer(const char* key) {
    const json& v = get(key);
    if (!v.is_number_integer()) throw ConfigError(path_ + "/" + key + ": expected an integer");
    return v.get<int64_t>();
  }
  int64_t integer_or(const char* key, int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }
  std::string str(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) throw ConfigError(path_ + "/" + key + ": expected a string");
    return v.get<std::string>();
  }
  std::string str_or(const char* key, const std::string& fallback) {
    return has(key) ? str(key) : fallback;
  }
  const json* child(const char* key) {
    if (!has(key)) return nullptr;
    return &get(key);
  }

  const std::string& path() const { return path_; }

  void done() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!consumed_.count(it.key()))
        throw ConfigError(path_ + ": unknown key \"" + it.key() + "\"", path_ + "/" + it.key());
  }

 private:
  const json& get(const char* key) {
    consumed_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(path_ + ": missing required key \"" + key + "\"");
    return *it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> consumed_;
};

DetectorChain parse_detector(const json& j, const std::string& path) {
  ObjReader r(j, path);
  DetectorChain c;
  c.detector.efficiency = r.num_or("efficiency", c.detector.efficiency);
  c.detector.jitter_sigma_ps = r.num_or("jitter_sigma_ps", c.detector.jitter_sigma_ps);
  c.detector.dark_rate_hz = r.num_or("dark_rate_hz", c.detector.dark_rate_hz);
  c.detector.dead_time_ps = r.integer_or("dead_time_ps", c.detector.dead_time_ps);
  c.tagger.jitter_sigma_ps = r.num_or("tagger_jitter_sigma_ps", c.tagger.jitter_sigma_ps);
  c.tagger.resolution_ps = r.integer_or("tagger_resolution_ps", c.tagger.resolution_ps);
  r.done();
  try {
    c.detector.validate();
    c.tagger.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what(), path);
  }
  return c;
}

FiberSpec parse_link(const json& j, const std::string& path) {
  if (j.is_string()) return make_fiber(catalog_link(j.get<std::string>()));
  ObjReader r(j, path);
  FiberSpec f;
  f.length_km = r.num("length_km");
  f.group_index = r.num_or("group_index", f.group_index);
  if (const json* alpha = r.child("alpha_per_km")) {
    ObjReader ar(*alpha, path + "/alpha_per_km");
    for (const char* band : {"O", "C", "L"})
      if (ar.has(band))
        f.alpha_by_band[band_from_string(band)] = Attenuation::per_km(ar.num(band));
    ar.done();
  }
  if (const json* beta = r.child("beta")) {
    ObjReader br(*beta, path + "/beta");
    for (const char* band : {"O", "L"})
      if (br.has(band)) f.beta_by_pump[band_from_string(band)] = RamanCoefficient{br.num(band), 0.0};
    br.done();
  }
  r.done();
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what(), path);
  }
  return f;
}

Wavelength band_wavelength(const std::string& band, const std::string& path) {
  if (band == "O") return Wavelength::nm(1310.0);
  if (band == "L") return Wavelength::nm(1610.0);
  throw ConfigError(path + ": clock band must be \"O\" or \"L\"", path);
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "dab-o-band", "dab-l-band", "anl-o-band", "anl-l-band", "anl-no-clock"};
  return names;
}

nlohmann::json preset_config(const std::string& name) {
  // Detector calibration shared by all presets: the arm efficiency folds
  // the DEMUX/FBG insertion and spectral clipping losses and the SNSPD
  // efficiency, chosen so the simulated operating points land near the
  // measured coincidence-to-accidental ratios of the deployed links.
  const json detector = {{"efficiency", 0.0065},   {"jitter_sigma_ps", 45.0},
                         {"dark_rate_hz", 10.0},   {"dead_time_ps", 25000},
                         {"tagger_jitter_sigma_ps", 8.0}, {"tagger_resolution_ps", 1}};
  json doc = {
      {"source",
       {{"pulse_period_ps", 5000},
        {"mean_pairs_per_pulse", 0.02},
        {"photon_sigma_ps", 106.0},
        {"wavelength_nm", 1536.0}}},
      {"clock",
       {{"frequency_hz", 2e8},
        {"pulse_width_ps", 2500},
        {"duty_cycle", 0.5},
        {"rx_min_dbm", -40.0},
        {"jitter_sigma_ps", 2.2},
        {"drift",
         {{"random_walk_ps_per_sqrt_s", 0.0},
          {"sinusoid_amplitude_ps", 0.8},
          {"sinusoid_period_s", 36000.0}}}}},
      {"topology",
       {{"switch_loss_db", 1.0},
        {"nodes",
         {{{"name", "FNAL-FCC"}, {"role", "source-hub"}, {"detectors", {detector, detector}}},
          {{"name", "FNAL-DAB"}, {"role", "end-node"}, {"detectors", {detector, detector}}},
          {{"name", "ANL"}, {"role", "end-node"}, {"detectors", {detector, detector}}}}},
        {"routes",
         {{{"from", "FNAL-FCC"},
           {"to", "FNAL-DAB"},
           {"link", "dab"},
           {"clock_band", "O"},
           {"clock_peak_power_mw", 0.6}},
          {{"from", "FNAL-FCC"},
           {"to", "ANL"},
           {"link", "anl"},
           {"clock_band", "O"},
           {"clock_peak_power_mw", 3.6}}}}}},
      {"analysis",
       {{"bin_width_ps", 10},
        {"range_ps", 60000},
        {"window_ps", 450},
        {"pulse_period_ps", 5000},
        {"accidental_peaks_per_side", 10}}},
      {"planner",
       {{"rx_min_dbm", -40.0},
        {"duty_cycle", 1.0},
        {"delta_lambda_nm", 0.03},
        {"mu", 0.02},
        {"eta1", 1.0},
        {"eta2", 1.0},
        {"dark1_hz", 0.0},
        {"dark2_hz", 0.0},
        {"window_ps", 450}}},
      {"scenario", {{"route_from", "FNAL-FCC"}, {"route_to", "ANL"}, {"clock", "off"}}},
  };

  auto& routes = doc["topology"]["routes"];
  if (name == "dab-o-band" || name == "dab-l-band") {
    doc["scenario"]["route_to"] = "FNAL-DAB";
    doc["scenario"]["clock"] = "on";
    if (name == "dab-l-band") {
      routes[0]["clock_band"] = "L";
      routes[0]["clock_peak_power_mw"] = 0.6;  // 0.3 mW average at 50% duty
    }
  } else if (name == "anl-o-band" || name == "anl-l-band") {
    doc["scenario"]["clock"] = "on";
    if (name == "anl-l-band") {
      routes[1]["clock_band"] = "L";
      routes[1]["clock_peak_power_mw"] = 0.6;
    }
  } else if (name != "anl-no-clock") {
    throw ConfigError("unknown preset \"" + name + "\"");
  }
  return doc;
}

ScenarioConfig parse_config(const nlohmann::json& doc) {
  ScenarioConfig cfg;
  cfg.raw = doc;
  ObjReader root(doc, "");

  if (const json* src = root.child("source")) {
    ObjReader r(*src, "/source");
    cfg.source.pulse_period_ps = r.integer_or("pulse_period_ps", cfg.source.pulse_period_ps);
    cfg.source.mean_pairs_per_pulse =
        r.num_or("mean_pairs_per_pulse", cfg.source.mean_pairs_per_pulse);
    cfg.source.photon_sigma_ps = r.num_or("photon_sigma_ps", cfg.source.photon_sigma_ps);
    cfg.source.wavelength = Wavelength::nm(r.num_or("wavelength_nm", 1536.0));
    r.done();
    try {
      cfg.source.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("/source: ") + e.what(), "/source");
    }
  }

  if (const json* clk = root.child("clock")) {
    ObjReader r(*clk, "/clock");
    cfg.clock_base.frequency_hz = r.num_or("frequency_hz", cfg.clock_base.frequency_hz);
    cfg.clock_base.pulse_width_ps = r.integer_or("pulse_width_ps", cfg.clock_base.pulse_width_ps);
    cfg.clock_base.duty_cycle = r.num_or("duty_cycle", cfg.clock_base.duty_cycle);
    cfg.clock_base.rx_min_power = Power::from_dbm(r.num_or("rx_min_dbm", -40.0));
    cfg.clock_base.jitter_sigma_ps = r.num_or("jitter_sigma_ps", cfg.clock_base.jitter_sigma_ps);
    if (const json* drift = r.child("drift")) {
      ObjReader dr(*drift, "/clock/drift");
      cfg.drift.random_walk_ps_per_sqrt_s =
          dr.num_or("random_walk_ps_per_sqrt_s", cfg.drift.random_walk_ps_per_sqrt_s);
      cfg.drift.sinusoid_amplitude_ps =
          dr.num_or("sinusoid_amplitude_ps", cfg.drift.sinusoid_amplitude_ps);
      cfg.drift.sinusoid_period_s = dr.num_or("sinusoid_period_s", cfg.drift.sinusoid_period_s);
      dr.done();
    }
    r.done();
  }

  const json* topo = root.child("topology");
  if (!topo) throw ConfigError("missing required section \"topology\"", "/topology");
  {
    ObjReader r(*topo, "/topology");
    cfg.topology.switch_loss_db = r.num_or("switch_loss_db", cfg.topology.switch_loss_db);

    const json* nodes = r.child("nodes");
    if (!nodes || !nodes->is_array())
      throw ConfigError("/topology/nodes: expected an array", "/topology/nodes");
    size_t ni = 0;
    for (const json& jn : *nodes) {
      const std::string path = "/topology/nodes/" + std::to_string(ni++);
      ObjReader nr(jn, path);
      Node node;
      node.name = nr.str("name");
      const std::string role = nr.str_or("role", "end-node");
      if (role == "source-hub")
        node.role = NodeRole::SourceHub;
      else if (role == "end-node")
        node.role = NodeRole::EndNode;
      else
        throw ConfigError(path + "/role: must be \"source-hub\" or \"end-node\"");
      if (const json* dets = nr.child("detectors")) {
        if (!dets->is_array()) throw ConfigError(path + "/detectors: expected an array");
        size_t di = 0;
        for (const json& jd : *dets)
          node.detectors.push_back(
              parse_detector(jd, path + "/detectors/" + std::to_string(di++)));
      }
      nr.done();
      cfg.topology.nodes.push_back(std::move(node));
    }

    if (const json* routes = r.child("routes")) {
      if (!routes->is_array())
        throw ConfigError("/topology/routes: expected an array", "/topology/routes");
      size_t ri = 0;
      for (const json& jr : *routes) {
        const std::string path = "/topology/routes/" + std::to_string(ri++);
        ObjReader rr(jr, path);
        Route route;
        route.from = rr.str("from");
        route.to = rr.str("to");
        const json* link = rr.child("link");
        if (!link) throw ConfigError(path + ": missing required key \"link\"");
        route.coexistence_fiber = parse_link(*link, path + "/link");
        if (const json* qlink = rr.child("quantum_link"))
          route.quantum_fiber = parse_link(*qlink, path + "/quantum_link");
        else
          route.quantum_fiber = route.coexistence_fiber;
        if (rr.has("clock_band")) {
          ClockSpec clk = cfg.clock_base;
          clk.band = band_wavelength(rr.str("clock_band"), path + "/clock_band");
          clk.peak_power = Power::milliwatts(rr.num("clock_peak_power_mw"));
          route.clock = clk;
        }
        rr.done();
        cfg.topology.routes.push_back(std::move(route));
      }
    }
    r.done();
  }
  try {
    cfg.topology.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("/topology: ") + e.what(), "/topology");
  }

  if (const json* an = root.child("analysis")) {
    ObjReader r(*an, "/analysis");
    cfg.analysis.bin_width_ps = r.integer_or("bin_width_ps", cfg.analysis.bin_width_ps);
    cfg.analysis.range_ps = r.integer_or("range_ps", cfg.analysis.range_ps);
    cfg.analysis.window_ps = r.integer_or("window_ps", cfg.analysis.window_ps);
    cfg.analysis.pulse_period_ps = r.integer_or("pulse_period_ps", cfg.analysis.pulse_period_ps);
    cfg.analysis.peaks_per_side =
        static_cast<int>(r.integer_or("accidental_peaks_per_side", cfg.analysis.peaks_per_side));
    r.done();
  }

  if (const json* pl = root.child("planner")) {
    ObjReader r(*pl, "/planner");
    cfg.planner.rx_min_dbm = r.num_or("rx_min_dbm", cfg.planner.rx_min_dbm);
    cfg.planner.duty_cycle = r.num_or("duty_cycle", cfg.planner.duty_cycle);
    cfg.planner.delta_lambda_nm = r.num_or("delta_lambda_nm", cfg.planner.delta_lambda_nm);
    cfg.planner.car.mu = r.num_or("mu", cfg.planner.car.mu);
    cfg.planner.car.eta1 = r.num_or("eta1", cfg.planner.car.eta1);
    cfg.planner.car.eta2 = r.num_or("eta2", cfg.planner.car.eta2);
    cfg.planner.car.dark1_hz = r.num_or("dark1_hz", cfg.planner.car.dark1_hz);
    cfg.planner.car.dark2_hz = r.num_or("dark2_hz", cfg.planner.car.dark2_hz);
    cfg.planner.car.window_ps = r.integer_or("window_ps", cfg.planner.car.window_ps);
    r.done();
  }

  if (const json* sc = root.child("scenario")) {
    ObjReader r(*sc, "/scenario");
    cfg.scenario.route_from = r.str_or("route_from", cfg.scenario.route_from);
    cfg.scenario.route_to = r.str_or("route_to", cfg.scenario.route_to);
    cfg.scenario.clock_mode = r.str_or("clock", cfg.scenario.clock_mode);
    r.done();
  }

  root.done();
  return cfg;
}

ScenarioConfig load_config(const std::string& path_or_preset) {
  for (const auto& name : preset_names())
    if (name == path_or_preset) return parse_config(preset_config(name));

  std::ifstream in(path_or_preset);
  if (!in)
    throw ConfigError("config \"" + path_or_preset +
                      "\" is neither a bundled preset nor a readable file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path_or_preset + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace qclink
