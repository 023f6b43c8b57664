#include <doctest.h>

#include <cmath>

#include "qclink/catalog.hpp"
#include "qclink/planner.hpp"
#include "qclink/rng.hpp"
#include "qclink/sync.hpp"

using namespace qclink;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

double series_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (const double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("average launch power") {
  ClockSpec clk;  // 0.6 mW peak, 50% duty
  CHECK(average_launch_power(clk).mw() == doctest::Approx(0.3).epsilon(1e-12));
  clk.duty_cycle = 1.0;
  CHECK(average_launch_power(clk).w() == clk.peak_power.w());
  clk.duty_cycle = 0.25;
  CHECK(average_launch_power(clk).w() == 0.5 * Power::milliwatts(0.6).w() * 0.5);
  clk.duty_cycle = 0.0;
  CHECK_THROWS_AS(average_launch_power(clk), std::invalid_argument);
}

TEST_CASE("ClockSpec validation") {
  ClockSpec clk;
  clk.pulse_width_ps = 6000;  // longer than the 5 ns period at 200 MHz
  CHECK_THROWS_AS(clk.validate(), std::invalid_argument);
}

TEST_CASE("lock status at and around the threshold") {
  const FiberSpec anl = make_fiber(catalog_link("anl"));
  ClockSpec clk;  // O band
  clk.rx_min_power = Power::watts(10e-6);

  // launch exactly the inverse of the link loss: at threshold -> locked
  const Power needed = min_launch_power(57.0, anl.alpha(Band::O), clk.rx_min_power);
  CHECK(rel_err(needed.mw(), 2.8230837448) < 1e-9);
  clk.duty_cycle = 1.0;
  clk.peak_power = needed;
  const LockStatus at = lock_status(clk, anl);
  CHECK(at.locked);
  CHECK(rel_err(at.received.w(), 10e-6) < 1e-9);

  clk.peak_power = Power::milliwatts(2.0);
  const LockStatus under = lock_status(clk, anl);
  CHECK(!under.locked);
  CHECK(rel_err(under.received.w(), 7.08445154587e-6) < 1e-9);
  CHECK(rel_err(under.received.w(), 7.08e-6) < 1e-3);

  // L = 0 equivalent: patch-cord-like fiber
  FiberSpec patch = anl;
  patch.length_km = 1e-9;
  CHECK(lock_status(clk, patch).locked);

  FiberSpec no_o_band = anl;
  no_o_band.alpha_by_band.erase(Band::O);
  no_o_band.beta_by_pump.erase(Band::O);
  CHECK_THROWS_AS(lock_status(clk, no_o_band), std::invalid_argument);
}

TEST_CASE("lock status is monotone in launch power and length") {
  const FiberSpec anl = make_fiber(catalog_link("anl"));
  ClockSpec clk;
  bool was_locked = false;
  for (double mw = 0.01; mw < 30.0; mw *= 1.5) {
    clk.peak_power = Power::milliwatts(mw);
    const bool locked = lock_status(clk, anl).locked;
    CHECK(!(was_locked && !locked));  // more power never unlocks
    was_locked = locked;
  }
  clk.peak_power = Power::milliwatts(5.0);
  FiberSpec f = anl;
  bool was_unlocked = false;
  for (double l = 1.0; l <= 200.0; l += 10.0) {
    f.length_km = l;
    const bool locked = lock_status(clk, f).locked;
    CHECK(!(was_unlocked && locked));  // more fiber never re-locks
    was_unlocked = !locked;
  }
}

TEST_CASE("simulate_offsets: zeros with everything disabled") {
  ClockSpec clk;
  clk.jitter_sigma_ps = 0.0;
  const DriftModel none{0.0, 0.0, 0.0};
  const OffsetSeries s = simulate_offsets(clk, none, 100.0, 1.0, 5);
  REQUIRE(s.offsets_ps.size() == 100);
  for (const double v : s.offsets_ps) CHECK(v == 0.0);
}

TEST_CASE("simulate_offsets: pure jitter reproduces sigma over 14 h") {
  ClockSpec clk;  // jitter 2.2 ps
  const DriftModel none{0.0, 0.0, 0.0};
  const OffsetSeries s = simulate_offsets(clk, none, 14.0 * 3600.0, 1.0, 12);
  REQUIRE(s.offsets_ps.size() == 50400);
  const double sigma = series_std(s.offsets_ps);
  CHECK(sigma >= 2.09);
  CHECK(sigma <= 2.31);
  CHECK(s.offsets_ps ==
        simulate_offsets(clk, none, 14.0 * 3600.0, 1.0, 12).offsets_ps);  // deterministic
  CHECK_THROWS_AS(simulate_offsets(clk, none, 0.5, 1.0, 12), std::invalid_argument);
}

TEST_CASE("simulate_offsets: deterministic sinusoid is recovered by 100 s means") {
  ClockSpec clk;
  clk.jitter_sigma_ps = 0.0;
  DriftModel drift;
  drift.random_walk_ps_per_sqrt_s = 0.0;
  drift.sinusoid_amplitude_ps = 2.0;
  drift.sinusoid_period_s = 36000.0;  // 10 h
  const OffsetSeries s = simulate_offsets(clk, drift, 36000.0, 1.0, 3);

  // bin to 100 s means, then fit a*sin + b*cos at the bin centers
  const size_t per_bin = 100;
  std::vector<double> means, centers;
  for (size_t start = 0; start + per_bin <= s.offsets_ps.size(); start += per_bin) {
    double m = 0.0;
    for (size_t i = start; i < start + per_bin; ++i) m += s.offsets_ps[i];
    means.push_back(m / per_bin);
    centers.push_back(static_cast<double>(start) + (per_bin - 1) / 2.0);
  }
  const double omega = 2.0 * M_PI / drift.sinusoid_period_s;
  double sss = 0, ssc = 0, scc = 0, sys = 0, syc = 0;
  for (size_t i = 0; i < means.size(); ++i) {
    const double sn = std::sin(omega * centers[i]), cs = std::cos(omega * centers[i]);
    sss += sn * sn;
    ssc += sn * cs;
    scc += cs * cs;
    sys += means[i] * sn;
    syc += means[i] * cs;
  }
  const double det = sss * scc - ssc * ssc;
  const double a = (sys * scc - syc * ssc) / det;
  const double b = (syc * sss - sys * ssc) / det;
  CHECK(std::hypot(a, b) == doctest::Approx(2.0).epsilon(1e-3));
  for (size_t i = 0; i < means.size(); ++i) {
    const double model = a * std::sin(omega * centers[i]) + b * std::cos(omega * centers[i]);
    CHECK(std::fabs(means[i] - model) < 0.05);
  }
}

TEST_CASE("simulate_offsets: random walk steps scale with sqrt(sample period)") {
  ClockSpec clk;
  clk.jitter_sigma_ps = 0.0;
  DriftModel drift;
  drift.random_walk_ps_per_sqrt_s = 1.0;
  drift.sinusoid_amplitude_ps = 0.0;
  const OffsetSeries s = simulate_offsets(clk, drift, 4000.0, 4.0, 9);
  std::vector<double> steps;
  for (size_t i = 1; i < s.offsets_ps.size(); ++i)
    steps.push_back(s.offsets_ps[i] - s.offsets_ps[i - 1]);
  CHECK(std::fabs(series_std(steps) - 2.0) / 2.0 < 0.1);  // 1 ps/sqrt(s) * sqrt(4 s)
}

TEST_CASE("with drift disabled, 100 s bin means stay near zero") {
  ClockSpec clk;  // 2.2 ps jitter
  const DriftModel none{0.0, 0.0, 0.0};
  const OffsetSeries s = simulate_offsets(clk, none, 14.0 * 3600.0, 1.0, 20);
  const double bound = 4.0 * clk.jitter_sigma_ps / 10.0;  // 4 sigma / sqrt(100)
  size_t ok = 0, bins = 0;
  for (size_t start = 0; start + 100 <= s.offsets_ps.size(); start += 100) {
    double m = 0.0;
    for (size_t i = start; i < start + 100; ++i) m += s.offsets_ps[i];
    m /= 100.0;
    ++bins;
    if (std::fabs(m) <= bound) ++ok;
  }
  CHECK(static_cast<double>(ok) >= 0.99 * static_cast<double>(bins));
}

TEST_CASE("apply_clock_offset") {
  const std::vector<TimeTag> stream = {{0, 100}, {0, 900'000'000'000ULL},
                                       {1, 1'500'000'000'000ULL}};
  OffsetSeries zero{1.0, std::vector<double>(2, 0.0)};
  CHECK(apply_clock_offset(stream, zero) == stream);

  OffsetSeries plus7{1.0, std::vector<double>(2, 7.0)};
  const auto shifted = apply_clock_offset(stream, plus7);
  CHECK(shifted[0].t_ps == 107);
  CHECK(shifted[1].t_ps == 900'000'000'007ULL);
  CHECK(shifted[2].t_ps == 1'500'000'000'007ULL);

  // piecewise application: first second unshifted, second second +10 ps
  OffsetSeries two_segments{1.0, {0.0, 10.0}};
  const auto split = apply_clock_offset(stream, two_segments);
  CHECK(split[0].t_ps == 100);
  CHECK(split[1].t_ps == 900'000'000'000ULL);
  CHECK(split[2].t_ps == 1'500'000'000'010ULL);

  // past the end of the series
  OffsetSeries tiny{1.0, {0.0}};
  CHECK_THROWS_AS(apply_clock_offset(stream, tiny), std::invalid_argument);
  CHECK_THROWS_AS(apply_clock_offset(stream, OffsetSeries{1.0, {}}), std::invalid_argument);

  // a negative offset at t=0 clamps instead of wrapping
  OffsetSeries minus{1.0, {-500.0, -500.0}};
  CHECK(apply_clock_offset({{0, 100}, {0, 2000}}, minus)[0].t_ps == 0);
}
