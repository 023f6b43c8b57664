#pragma once

#include <optional>
#include <vector>

#include "qclink/analysis.hpp"
#include "qclink/catalog.hpp"
#include "qclink/channel.hpp"

namespace qclink {

/// One row of a link-design sweep.
struct PlanPoint {
  double length_km = 0.0;
  Power p0_min;          // average launch power needed to hold lock
  Power raman_power;     // scattered power in the quantum channel at p0_min
  double raman_rate_hz = 0.0;
  double predicted_car = 0.0;
};

/// Pair-source / detection operating point the CAR prediction uses.
struct CarModelInputs {
  double mu = 0.02;
  double eta1 = 1.0;  // coexistence arm
  double eta2 = 1.0;
  double dark1_hz = 0.0;
  double dark2_hz = 0.0;
  int64_t window_ps = 450;
};

/// Launch power that reaches the receiver threshold after e^(-alpha*L).
/// rx_min and the result share the same convention (peak in, peak out).
Power min_launch_power(double length_km, Attenuation alpha_pump, Power rx_min);

/// Everything the sweep needs for one pump band. rx_min is the receiver's
/// minimum peak power; the emitted p0_min is the corresponding average
/// launch power at the given duty cycle (what the Raman transfer sees).
struct BandPlanParams {
  Attenuation alpha_quantum;
  Attenuation alpha_pump;
  RamanCoefficient beta;
  RamanContext ctx;
  Wavelength quantum = Wavelength::nm(kQuantumWavelengthNm);
  double duty_cycle = 1.0;
};

BandPlanParams band_plan_params(const LinkParams& link, Band pump_band,
                                double duty_cycle = 1.0,
                                double delta_lambda_nm = kDefaultDeltaLambdaNm);

/// Design curve over fiber length: minimum launch power, Raman power and
/// rate at that launch power, and the predicted CAR with that noise on
/// arm 1. Lengths must be positive and ascending.
std::vector<PlanPoint> sweep(const std::vector<double>& lengths_km,
                             const BandPlanParams& band, Power rx_min,
                             const CarModelInputs& car);

struct CalibrationResult {
  double mu = 0.0;
  double n1_per_window = 0.0;
  double residual = 0.0;
};

/// Two-point inversion of car_predict: mu from the background-free CAR
/// (1 + 1/mu), then the arm-1 per-window background from the CAR with the
/// clock on. Requires car_background > car_with_clock > 1.
CalibrationResult calibrate(double car_background, double car_with_clock,
                            double eta1, double eta2);

/// Pair-source / noise state for the full-model duty-cycle gain.
struct CarOperatingPoint {
  double mu = 0.02;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double n1_per_window = 0.0;
  double n2_per_window = 0.0;
};

/// Multiplier on CAR - 1 when the clock duty cycle changes at fixed peak
/// power. In the noise-dominated regime this is exactly current/proposed;
/// otherwise the exact ratio from car_predict with n1 scaled by
/// proposed/current.
double duty_cycle_gain(double current_duty, double proposed_duty,
                       bool noise_dominated,
                       const std::optional<CarOperatingPoint>& op = {});

}  // namespace qclink
