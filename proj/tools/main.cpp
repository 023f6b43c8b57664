#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qclink/analysis.hpp"
#include "qclink/catalog.hpp"
#include "qclink/config.hpp"
#include "qclink/errors.hpp"
#include "qclink/planner.hpp"
#include "qclink/rng.hpp"
#include "qclink/tagfile.hpp"
#include "qclink/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qclink;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// "500ms", "60s", "5m", "2h", "250ns", "1e9ps"; bare numbers are seconds.
uint64_t parse_duration_ps(const std::string& text) {
  size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw CLI::ValidationError("duration", "cannot parse \"" + text + "\"");
  }
  std::string unit = text.substr(pos);
  double scale = 1e12;  // seconds by default
  if (unit == "ps") scale = 1.0;
  else if (unit == "ns") scale = 1e3;
  else if (unit == "us") scale = 1e6;
  else if (unit == "ms") scale = 1e9;
  else if (unit == "s" || unit.empty()) scale = 1e12;
  else if (unit == "m") scale = 60e12;
  else if (unit == "h") scale = 3600e12;
  else throw CLI::ValidationError("duration", "unknown unit \"" + unit + "\"");
  const double ps = value * scale;
  if (!(ps >= 0.0) || ps > 9.0e18)
    throw CLI::ValidationError("duration", "out of range: " + text);
  return static_cast<uint64_t>(ps);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  fs::rename(tmp, path);
}

std::string histogram_csv(const CoincidenceHistogram& h) {
  std::ostringstream out;
  out << "bin_center_ps,counts\n";
  for (size_t i = 0; i < h.n_bins(); ++i)
    out << h.bin_center_ps(i) << "," << h.counts[i] << "\n";
  return out.str();
}

std::string offsets_csv(const OffsetSeries& s) {
  std::ostringstream out;
  out << "time_s,offset_ps\n";
  out.precision(12);
  for (size_t i = 0; i < s.offsets_ps.size(); ++i)
    out << static_cast<double>(i) * s.sample_period_s << "," << s.offsets_ps[i] << "\n";
  return out.str();
}

json car_to_json(const CarResult& r) {
  return json{{"car", r.finite() ? json(r.car) : json("inf")},
              {"sigma_car", std::isfinite(r.sigma_car) ? json(r.sigma_car) : json("inf")},
              {"coincidences", r.coincidences},
              {"accidental_mean", r.accidental_mean},
              {"window_ps", r.window_ps},
              {"peaks_used", r.peaks_used},
              {"center_offset_ps", r.center_offset_ps}};
}

OffsetSeries read_offsets_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open offsets file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty offsets file " + path);
  OffsetSeries s;
  double prev_t = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError(path + ": expected \"time_s,offset_ps\" rows");
    const double t = std::stod(line.substr(0, comma));
    const double off = std::stod(line.substr(comma + 1));
    if (s.offsets_ps.size() == 1) {
      s.sample_period_s = t - prev_t;
      if (!(s.sample_period_s > 0.0))
        throw DataError(path + ": time column must be increasing");
    }
    prev_t = t;
    s.offsets_ps.push_back(off);
  }
  if (s.offsets_ps.empty()) throw DataError(path + ": no samples");
  return s;
}

std::vector<double> parse_lengths(const std::string& text) {
  std::vector<double> lengths;
  const size_t c1 = text.find(':');
  if (c1 != std::string::npos) {
    const size_t c2 = text.find(':', c1 + 1);
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = c2 == std::string::npos ? 1.0 : std::stod(text.substr(c2 + 1));
    if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0))
      throw CLI::ValidationError("lengths", "bad range \"" + text + "\"");
    for (double l = lo; l <= hi + 1e-9; l += step) lengths.push_back(l);
    return lengths;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) lengths.push_back(std::stod(item));
  return lengths;
}

int cmd_simulate(const std::string& config_name, std::string route_arg,
                 std::string clock_arg, const std::string& duration_arg,
                 uint64_t seed, const std::string& out_dir, bool offsets_only,
                 const std::string& offset_sample_arg) {
  const ScenarioConfig cfg = load_config(config_name);
  const uint64_t duration_ps = parse_duration_ps(duration_arg);

  std::string from = cfg.scenario.route_from;
  std::string to = cfg.scenario.route_to;
  if (!route_arg.empty()) {
    const size_t colon = route_arg.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--route", "expected FROM:TO");
    from = route_arg.substr(0, colon);
    to = route_arg.substr(colon + 1);
  }
  if (clock_arg.empty()) clock_arg = cfg.scenario.clock_mode;

  Route route = resolve_route(cfg.topology, from, to);
  bool clock_on = false;
  if (clock_arg == "off") {
    clock_on = false;
  } else if (clock_arg == "on") {
    clock_on = true;
  } else if (clock_arg == "O" || clock_arg == "L") {
    clock_on = true;
    if (!route.clock)
      throw ConfigError("route " + from + ":" + to + " carries no clock spec");
    route.clock->band = Wavelength::nm(clock_arg == "O" ? 1310.0 : 1610.0);
  } else {
    throw CLI::ValidationError("--clock", "must be on, off, O or L");
  }

  fs::create_directories(out_dir);
  json manifest = {{"tool", "qclink"},
                   {"version", kVersion},
                   {"command", offsets_only ? "simulate --offsets-only" : "simulate"},
                   {"config_name", config_name},
                   {"seed", seed},
                   {"duration_ps", duration_ps},
                   {"route", {{"from", from}, {"to", to}}},
                   {"clock", clock_arg},
                   {"config", cfg.raw}};

  if (offsets_only) {
    if (!route.clock)
      throw ConfigError("offsets-only run needs a route with a clock spec");
    const double sample_s =
        static_cast<double>(parse_duration_ps(offset_sample_arg)) * 1e-12;
    const double duration_s = static_cast<double>(duration_ps) * 1e-12;
    const OffsetSeries series =
        simulate_offsets(*route.clock, cfg.drift, duration_s, sample_s,
                         derive_seed(seed, "scenario.offsets"));
    const std::string path = (fs::path(out_dir) / "offsets.csv").string();
    write_text_atomic(path, offsets_csv(series));
    manifest["outputs"] = {{"offsets", path}, {"samples", series.offsets_ps.size()}};
    write_text_atomic((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "wrote " << series.offsets_ps.size() << " offset samples to " << path << "\n";
    return kExitOk;
  }

  Scenario sc = scenario_build(cfg.topology, route, cfg.source, clock_on, duration_ps, seed);
  sc.drift = cfg.drift;
  const SimResult result = run_scenario(sc);

  json outputs = json::object();
  for (int arm = 0; arm < 2; ++arm) {
    const std::string path =
        (fs::path(out_dir) / ("det" + std::to_string(arm) + ".qtt")).string();
    write_tag_file(path, result.streams[arm], 2);
    outputs["det" + std::to_string(arm)] = {{"path", path},
                                            {"records", result.streams[arm].size()}};
  }
  if (result.offsets) {
    const std::string path = (fs::path(out_dir) / "offsets.csv").string();
    write_text_atomic(path, offsets_csv(*result.offsets));
    outputs["offsets"] = path;
  }
  manifest["outputs"] = outputs;
  manifest["resolved"] = {{"arm_efficiency", {sc.arm_efficiency(0), sc.arm_efficiency(1)}},
                          {"fiber_transmittance",
                           {sc.fiber_transmittance[0], sc.fiber_transmittance[1]}},
                          {"raman_rate_hz", sc.raman_rate_hz},
                          {"background_rate_hz",
                           {sc.background_rate_hz(0), sc.background_rate_hz(1)}},
                          {"delay_ps", {sc.delay_ps[0], sc.delay_ps[1]}}};
  write_text_atomic((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << "wrote " << result.streams[0].size() << " + " << result.streams[1].size()
            << " tags to " << out_dir << "\n";
  return kExitOk;
}

int cmd_analyze_car(const std::string& a_path, const std::string& b_path,
                    int64_t window_ps, int64_t period_ps, int peaks, int64_t bin_ps,
                    int64_t range_ps, const std::string& csv_path, bool as_json) {
  const std::vector<TimeTag> a = read_tag_file(a_path);
  const std::vector<TimeTag> b = read_tag_file(b_path);
  const CoincidenceHistogram h = histogram(a, b, bin_ps, range_ps);
  const CarResult r = car_estimate(h, window_ps, period_ps, peaks);
  if (!csv_path.empty()) write_text_atomic(csv_path, histogram_csv(h));
  if (as_json) {
    std::cout << car_to_json(r).dump() << "\n";
  } else {
    std::cout << "CAR = " << r.car << " +/- " << r.sigma_car << "  (C=" << r.coincidences
              << ", A=" << r.accidental_mean << ", window=" << r.window_ps
              << " ps, accidental windows=" << r.peaks_used
              << ", peak at dt=" << r.center_offset_ps << " ps)\n";
  }
  return kExitOk;
}

int cmd_analyze_sync(const std::string& offsets_path, double bin_s,
                     const std::string& csv_path, bool as_json) {
  const OffsetSeries series = read_offsets_csv(offsets_path);
  const DriftStats st = drift_stats(series, bin_s);
  if (!csv_path.empty()) {
    std::ostringstream out;
    out << "bin_start_s,mean_ps,rms_ps\n";
    for (size_t i = 0; i < st.bin_mean_ps.size(); ++i)
      out << static_cast<double>(i) * st.bin_s << "," << st.bin_mean_ps[i] << ","
          << st.bin_rms_ps[i] << "\n";
    write_text_atomic(csv_path, out.str());
  }
  if (as_json) {
    std::cout << json{{"overall_sigma_ps", st.overall_sigma_ps},
                      {"ptp_of_means_ps", st.ptp_of_means_ps},
                      {"bins", st.bin_mean_ps.size()},
                      {"bin_s", st.bin_s}}
                     .dump()
              << "\n";
  } else {
    std::cout << "jitter sigma = " << st.overall_sigma_ps
              << " ps, drift (peak-to-peak of " << st.bin_s
              << " s means) = " << st.ptp_of_means_ps << " ps over "
              << st.bin_mean_ps.size() << " bins\n";
  }
  return kExitOk;
}

std::vector<RamanSweepPoint> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open points file " + path);
  std::vector<RamanSweepPoint> points;
  std::string line;
  bool maybe_header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (maybe_header && line.find_first_not_of("0123456789.,+-eE \t\r") != std::string::npos) {
      maybe_header = false;  // skip a column-name header row
      continue;
    }
    maybe_header = false;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw DataError(path + ": expected P0_mW,rate_hz[,sigma_hz] rows");
    RamanSweepPoint p;
    p.p0_w = row[0] * 1e-3;
    p.rate_hz = row[1];
    if (row.size() > 2) p.rate_sigma_hz = row[2];
    points.push_back(p);
  }
  if (points.size() < 2) throw DataError(path + ": need at least two points");
  return points;
}

int cmd_fit_beta(const std::string& points_path, const std::string& link_name,
                 const std::string& band_name, double delta_lambda, bool as_json) {
  const std::vector<RamanSweepPoint> points = read_points_csv(points_path);
  const LinkParams& link = catalog_link(link_name);
  const Band pump = band_from_string(band_name);
  const Attenuation alpha_pump = pump == Band::O ? link.alpha_o : link.alpha_l;
  const RamanCoefficient beta =
      fit_raman_beta(points, make_raman_context(pump, delta_lambda), link.length_km,
                     link.alpha_c, alpha_pump, Wavelength::nm(kQuantumWavelengthNm));
  if (as_json) {
    std::cout << json{{"beta_per_nm_km", beta.beta},
                      {"sigma", beta.uncertainty},
                      {"link", link_name},
                      {"band", band_name}}
                     .dump()
              << "\n";
  } else {
    std::cout << "beta(" << link_name << ", " << band_name << "-band) = " << beta.beta
              << " +/- " << beta.uncertainty << " nm^-1 km^-1\n";
  }
  return kExitOk;
}

int cmd_plan(const std::string& link_name, const std::string& lengths_arg,
             double rx_min_dbm, double duty, double delta_lambda,
             const CarModelInputs& car, const std::string& csv_path, int jobs) {
  const LinkParams& link = catalog_link(link_name);
  const std::vector<double> lengths = parse_lengths(lengths_arg);
  const Power rx_min = Power::from_dbm(rx_min_dbm);

  const BandPlanParams o_band = band_plan_params(link, Band::O, duty, delta_lambda);
  const BandPlanParams l_band = band_plan_params(link, Band::L, duty, delta_lambda);

  std::vector<PlanPoint> o_points(lengths.size()), l_points(lengths.size());
  const int n_jobs = std::max(1, jobs);
  std::vector<std::thread> workers;
  const size_t per_job = (lengths.size() + n_jobs - 1) / n_jobs;
  for (int j = 0; j < n_jobs; ++j) {
    const size_t lo = static_cast<size_t>(j) * per_job;
    const size_t hi = std::min(lengths.size(), lo + per_job);
    if (lo >= hi) break;
    workers.emplace_back([&, lo, hi] {
      const std::vector<double> chunk(lengths.begin() + lo, lengths.begin() + hi);
      const auto o = sweep(chunk, o_band, rx_min, car);
      const auto l = sweep(chunk, l_band, rx_min, car);
      std::copy(o.begin(), o.end(), o_points.begin() + lo);
      std::copy(l.begin(), l.end(), l_points.begin() + lo);
    });
  }
  for (auto& w : workers) w.join();

  std::ostringstream out;
  out << "length_km,p0_min_mw_oband,raman_power_w_oband,raman_rate_hz_oband,"
         "predicted_car_oband,p0_min_mw_lband,raman_power_w_lband,raman_rate_hz_lband,"
         "predicted_car_lband\n";
  out.precision(17);  // full doubles, so the CSV preserves exact ratios
  for (size_t i = 0; i < lengths.size(); ++i) {
    const PlanPoint& o = o_points[i];
    const PlanPoint& l = l_points[i];
    out << o.length_km << "," << o.p0_min.mw() << "," << o.raman_power.w() << ","
        << o.raman_rate_hz << "," << o.predicted_car << "," << l.p0_min.mw() << ","
        << l.raman_power.w() << "," << l.raman_rate_hz << "," << l.predicted_car << "\n";
  }
  if (csv_path.empty())
    std::cout << out.str();
  else
    write_text_atomic(csv_path, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qclink - simulator, analyzer and link planner for quantum-classical\n"
      "coexisting fiber links (photon pairs multiplexed with O-/L-band clocks)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write QTT1 tag files");
  std::string sim_config, sim_route, sim_clock, sim_duration = "1s", sim_out = "out";
  std::string sim_offset_sample = "1s";
  uint64_t sim_seed = 1;
  bool sim_offsets_only = false;
  sim->add_option("--config", sim_config, "Bundled preset name or config JSON path")->required();
  sim->add_option("--route", sim_route, "Override route as FROM:TO");
  sim->add_option("--clock", sim_clock, "Clock state: on, off, O or L");
  sim->add_option("--duration", sim_duration, "Simulated span, e.g. 60s, 500ms, 12h");
  sim->add_option("--seed", sim_seed, "Master seed (all sub-streams derive from it)");
  sim->add_option("--out-dir", sim_out, "Output directory");
  sim->add_flag("--offsets-only", sim_offsets_only,
                "Only simulate the derived-clock offset series (no tags)");
  sim->add_option("--offset-sample", sim_offset_sample, "Offset sample period");

  // analyze car | analyze sync
  auto* analyze = app.add_subcommand("analyze", "Analyze tag files or offset series");
  analyze->require_subcommand(1);
  auto* car = analyze->add_subcommand("car", "Coincidence histogram and CAR of two tag files");
  std::string car_a, car_b, car_csv;
  int64_t car_window = 450, car_period = 5000, car_bin = 10, car_range = 60000;
  int car_peaks = 10;
  bool car_json = false;
  car->add_option("--a", car_a, "Tag file, arm 1 (coexistence fiber)")->required();
  car->add_option("--b", car_b, "Tag file, arm 2")->required();
  car->add_option("--window", car_window, "Coincidence window, ps [450]");
  car->add_option("--period", car_period, "Source pulse period, ps [5000]");
  car->add_option("--peaks", car_peaks, "Accidental peaks per side [10]");
  car->add_option("--bin", car_bin, "Histogram bin width, ps [10]");
  car->add_option("--range", car_range, "Histogram half-range, ps [60000]");
  car->add_option("--csv", car_csv, "Write histogram CSV (bin_center_ps,counts)");
  car->add_flag("--json", car_json, "Print the result as one JSON record");

  auto* syn = analyze->add_subcommand("sync", "Drift/jitter statistics of an offset series");
  std::string syn_offsets, syn_csv;
  double syn_bin = 100.0;
  bool syn_json = false;
  syn->add_option("--offsets", syn_offsets, "offsets CSV (time_s,offset_ps)")->required();
  syn->add_option("--bin", syn_bin, "Averaging bin, seconds [100]");
  syn->add_option("--csv", syn_csv, "Write per-bin CSV (bin_start_s,mean_ps,rms_ps)");
  syn->add_flag("--json", syn_json, "Print the summary as one JSON record");

  // fit-beta
  auto* fitb = app.add_subcommand("fit-beta", "Raman coefficient from a launch-power sweep");
  std::string fit_points, fit_link = "anl", fit_band = "O";
  double fit_dl = kDefaultDeltaLambdaNm;
  bool fit_json = false;
  fitb->add_option("--points", fit_points, "CSV of P0_mW,rate_hz[,sigma_hz]")->required();
  fitb->add_option("--link", fit_link, "Catalog link: dab, anl, anl-59");
  fitb->add_option("--band", fit_band, "Pump band: O or L");
  fitb->add_option("--delta-lambda", fit_dl, "Filter bandwidth, nm [0.03]");
  fitb->add_flag("--json", fit_json, "Print the result as one JSON record");

  // plan
  auto* plan = app.add_subcommand(
      "plan", "Design curves vs fiber length (CSV columns: length_km, then per band\n"
              "p0_min_mw, raman_power_w, raman_rate_hz, predicted_car; O-band first)");
  std::string plan_link = "anl", plan_lengths = "1:100:1", plan_csv;
  double plan_rx = -40.0, plan_duty = 1.0, plan_dl = kDefaultDeltaLambdaNm;
  CarModelInputs plan_car;
  int plan_jobs = 1;
  plan->add_option("--link", plan_link, "Catalog link: dab, anl, anl-59");
  plan->add_option("--lengths", plan_lengths, "Lengths km: LO:HI[:STEP] or comma list");
  plan->add_option("--rx-min-dbm", plan_rx, "Receiver minimum peak power, dBm [-40]");
  plan->add_option("--duty", plan_duty, "Clock duty cycle (0, 1] [1.0]");
  plan->add_option("--delta-lambda", plan_dl, "Filter bandwidth, nm [0.03]");
  plan->add_option("--mu", plan_car.mu, "Pairs per pulse for the CAR prediction [0.02]");
  plan->add_option("--eta1", plan_car.eta1, "Arm 1 efficiency [1.0]");
  plan->add_option("--eta2", plan_car.eta2, "Arm 2 efficiency [1.0]");
  plan->add_option("--dark1", plan_car.dark1_hz, "Arm 1 dark rate, Hz [0]");
  plan->add_option("--dark2", plan_car.dark2_hz, "Arm 2 dark rate, Hz [0]");
  plan->add_option("--window", plan_car.window_ps, "Coincidence window, ps [450]");
  plan->add_option("--csv", plan_csv, "Write CSV here instead of stdout");
  plan->add_option("--jobs", plan_jobs, "Worker threads for the sweep [1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_config, sim_route, sim_clock, sim_duration, sim_seed, sim_out,
                          sim_offsets_only, sim_offset_sample);
    if (car->parsed())
      return cmd_analyze_car(car_a, car_b, car_window, car_period, car_peaks, car_bin,
                             car_range, car_csv, car_json);
    if (syn->parsed()) return cmd_analyze_sync(syn_offsets, syn_bin, syn_csv, syn_json);
    if (fitb->parsed()) return cmd_fit_beta(fit_points, fit_link, fit_band, fit_dl, fit_json);
    if (plan->parsed())
      return cmd_plan(plan_link, plan_lengths, plan_rx, plan_duty, plan_dl, plan_car,
                      plan_csv, plan_jobs);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what();
    if (e.byte_offset() >= 0) std::cerr << " (byte " << e.byte_offset() << ")";
    std::cerr << "\n";
    return kExitData;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
