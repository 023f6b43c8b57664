#pragma once

#include <cstdint>
#include <vector>

#include "qclink/channel.hpp"
#include "qclink/photonics.hpp"
#include "qclink/units.hpp"

namespace qclink {

/// Optical clock transmitter/receiver pair. The laser is bias-switched at
/// frequency_hz with the given pulse width; average launch power is
/// peak_power * duty_cycle. rx_min_power is the receiver lock threshold on
/// received average power; jitter_sigma is the residual timing jitter of
/// the locked derived clock.
struct ClockSpec {
  double frequency_hz = 2e8;
  int64_t pulse_width_ps = 2500;
  double duty_cycle = 0.5;
  Power peak_power = Power::milliwatts(0.6);
  Wavelength band = Wavelength::nm(1310.0);
  Power rx_min_power = Power::from_dbm(-40.0);
  double jitter_sigma_ps = 2.2;

  void validate() const {
    if (!(frequency_hz > 0.0))
      throw std::invalid_argument("ClockSpec: frequency must be > 0");
    if (!(duty_cycle > 0.0) || !(duty_cycle <= 1.0))
      throw std::invalid_argument("ClockSpec: duty_cycle must be in (0, 1]");
    if (pulse_width_ps <= 0 ||
        static_cast<double>(pulse_width_ps) > 1e12 / frequency_hz)
      throw std::invalid_argument("ClockSpec: pulse width must fit in the clock period");
    if (!(jitter_sigma_ps >= 0.0))
      throw std::invalid_argument("ClockSpec: jitter must be >= 0");
  }
};

/// Slow wander of the derived clock: a random walk plus one sinusoid
/// (thermal day/night cycling). Defaults keep the drift well under the
/// few-ps level seen on a locked link.
struct DriftModel {
  double random_walk_ps_per_sqrt_s = 0.0;
  double sinusoid_amplitude_ps = 0.8;
  double sinusoid_period_s = 36000.0;

  void validate() const {
    if (!(random_walk_ps_per_sqrt_s >= 0.0) || !(sinusoid_amplitude_ps >= 0.0) ||
        !(sinusoid_period_s >= 0.0))
      throw std::invalid_argument("DriftModel: parameters must be >= 0");
  }
};

/// Sampled time offset between the derived and reference clocks.
struct OffsetSeries {
  double sample_period_s = 1.0;
  std::vector<double> offsets_ps;

  double duration_s() const { return sample_period_s * static_cast<double>(offsets_ps.size()); }
};

Power average_launch_power(const ClockSpec& clk);

struct LockStatus {
  bool locked = false;
  Power received;
};

/// Power-threshold lock gate: received = average launch * e^(-alpha_band*L),
/// locked iff received >= rx_min (with a 1e-12 relative tolerance so exact
/// threshold launch powers count as locked).
LockStatus lock_status(const ClockSpec& clk, const FiberSpec& fiber);

/// offset(t) = random walk + sinusoid (seeded phase) + N(0, jitter^2),
/// sampled every sample_period_s over [0, duration_s).
OffsetSeries simulate_offsets(const ClockSpec& clk, const DriftModel& drift,
                              double duration_s, double sample_period_s,
                              uint64_t seed);

/// Shifts each tag by the offset sample covering its time
/// (piecewise-constant), re-sorting afterwards. Tags past the end of the
/// series are rejected; a tag pushed below zero clamps to zero.
std::vector<TimeTag> apply_clock_offset(const std::vector<TimeTag>& stream,
                                        const OffsetSeries& series);

}  // namespace qclink
