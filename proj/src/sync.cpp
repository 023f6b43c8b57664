#include "qclink/sync.hpp"

#include <algorithm>
#include <cmath>

#include "qclink/rng.hpp"

namespace qclink {

Power average_launch_power(const ClockSpec& clk) {
  clk.validate();
  return Power::watts(clk.peak_power.w() * clk.duty_cycle);
}

LockStatus lock_status(const ClockSpec& clk, const FiberSpec& fiber) {
  const Attenuation alpha = fiber.alpha(clk.band.band());
  const double received_w =
      average_launch_power(clk).w() * transmittance(alpha, fiber.length_km);
  LockStatus st;
  st.received = Power::watts(received_w);
  st.locked = received_w >= clk.rx_min_power.w() * (1.0 - 1e-12);
  return st;
}

OffsetSeries simulate_offsets(const ClockSpec& clk, const DriftModel& drift,
                              double duration_s, double sample_period_s,
                              uint64_t seed) {
  clk.validate();
  drift.validate();
  if (!(sample_period_s > 0.0) || !(duration_s >= sample_period_s))
    throw std::invalid_argument("simulate_offsets: duration must cover at least one sample");

  const size_t n = static_cast<size_t>(duration_s / sample_period_s);
  Rng walk_rng(derive_seed(seed, "offsets.walk"));
  Rng jitter_rng(derive_seed(seed, "offsets.jitter"));
  Rng phase_rng(derive_seed(seed, "offsets.phase"));
  const double phase0 = phase_rng.uniform() * 2.0 * M_PI;
  const double walk_step_sigma =
      drift.random_walk_ps_per_sqrt_s * std::sqrt(sample_period_s);

  OffsetSeries out;
  out.sample_period_s = sample_period_s;
  out.offsets_ps.resize(n);
  double walk = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * sample_period_s;
    double offset = walk;
    if (drift.sinusoid_amplitude_ps > 0.0 && drift.sinusoid_period_s > 0.0)
      offset += drift.sinusoid_amplitude_ps *
                std::sin(2.0 * M_PI * t / drift.sinusoid_period_s + phase0);
    if (clk.jitter_sigma_ps > 0.0) offset += jitter_rng.normal(0.0, clk.jitter_sigma_ps);
    out.offsets_ps[i] = offset;
    if (walk_step_sigma > 0.0) walk += walk_rng.normal(0.0, walk_step_sigma);
  }
  return out;
}

std::vector<TimeTag> apply_clock_offset(const std::vector<TimeTag>& stream,
                                        const OffsetSeries& series) {
  if (series.offsets_ps.empty())
    throw std::invalid_argument("apply_clock_offset: empty offset series");
  const double sample_ps = series.sample_period_s * 1e12;
  const double end_ps = sample_ps * static_cast<double>(series.offsets_ps.size());

  std::vector<TimeTag> out;
  out.reserve(stream.size());
  for (const TimeTag& tag : stream) {
    const double t = static_cast<double>(tag.t_ps);
    if (t >= end_ps)
      throw std::invalid_argument("apply_clock_offset: stream extends past the offset series");
    const size_t idx = static_cast<size_t>(t / sample_ps);
    const int64_t shift = static_cast<int64_t>(
        std::llround(series.offsets_ps[std::min(idx, series.offsets_ps.size() - 1)]));
    const int64_t shifted = static_cast<int64_t>(tag.t_ps) + shift;
    out.push_back(TimeTag{tag.channel, shifted < 0 ? 0 : static_cast<uint64_t>(shifted)});
  }
  std::stable_sort(out.begin(), out.end(), [](const TimeTag& a, const TimeTag& b) {
    return a.t_ps < b.t_ps;
  });
  return out;
}

}  // namespace qclink
