#include "qclink/planner.hpp"

#include <cmath>
#include <stdexcept>

namespace qclink {

Power min_launch_power(double length_km, Attenuation alpha_pump, Power rx_min) {
  if (!(length_km >= 0.0))
    throw std::invalid_argument("min_launch_power: length must be >= 0");
  return Power::watts(rx_min.w() * std::exp(alpha_pump.alpha_per_km() * length_km));
}

BandPlanParams band_plan_params(const LinkParams& link, Band pump_band,
                                double duty_cycle, double delta_lambda_nm) {
  BandPlanParams p;
  p.alpha_quantum = link.alpha_c;
  switch (pump_band) {
    case Band::O: p.alpha_pump = link.alpha_o; p.beta = link.beta_o; break;
    case Band::L: p.alpha_pump = link.alpha_l; p.beta = link.beta_l; break;
    default: throw std::invalid_argument("band_plan_params: pump band must be O or L");
  }
  p.ctx = make_raman_context(pump_band, delta_lambda_nm);
  p.duty_cycle = duty_cycle;
  return p;
}

std::vector<PlanPoint> sweep(const std::vector<double>& lengths_km,
                             const BandPlanParams& band, Power rx_min,
                             const CarModelInputs& car) {
  if (lengths_km.empty())
    throw std::invalid_argument("sweep: need at least one length");
  if (!(band.duty_cycle > 0.0) || band.duty_cycle > 1.0)
    throw std::invalid_argument("sweep: duty cycle must be in (0, 1]");
  double prev = 0.0;
  for (const double l : lengths_km) {
    if (!(l > prev))
      throw std::invalid_argument("sweep: lengths must be positive and ascending");
    prev = l;
  }

  const double window_s = static_cast<double>(car.window_ps) * 1e-12;
  std::vector<PlanPoint> out;
  out.reserve(lengths_km.size());
  for (const double l : lengths_km) {
    PlanPoint pt;
    pt.length_km = l;
    const Power launch_peak = min_launch_power(l, band.alpha_pump, rx_min);
    pt.p0_min = Power::watts(launch_peak.w() * band.duty_cycle);
    pt.raman_power =
        raman_power(pt.p0_min, band.beta, band.ctx, l, band.alpha_quantum, band.alpha_pump);
    pt.raman_rate_hz = power_to_photon_rate_hz(pt.raman_power, band.quantum);
    const double n1 = (pt.raman_rate_hz + car.dark1_hz) * window_s;
    const double n2 = car.dark2_hz * window_s;
    pt.predicted_car = car_predict(car.mu, car.eta1, car.eta2, n1, n2);
    out.push_back(pt);
  }
  return out;
}

CalibrationResult calibrate(double car_background, double car_with_clock,
                            double eta1, double eta2) {
  if (!(eta1 > 0.0) || !(eta2 > 0.0))
    throw std::invalid_argument("calibrate: arm efficiencies must be > 0");
  if (!(car_background >= car_with_clock) || !(car_with_clock > 1.0))
    throw std::invalid_argument(
        "calibrate: need car_background >= car_with_clock > 1 for a two-point inversion");

  CalibrationResult r;
  r.mu = 1.0 / (car_background - 1.0);
  // (car_bg - 1)/(car_clock - 1) = 1 + n1/(mu*eta1)
  const double ratio = (car_background - 1.0) / (car_with_clock - 1.0);
  r.n1_per_window = r.mu * eta1 * (ratio - 1.0);
  r.residual = car_predict(r.mu, eta1, eta2, r.n1_per_window, 0.0) - car_with_clock;
  return r;
}

double duty_cycle_gain(double current_duty, double proposed_duty,
                       bool noise_dominated,
                       const std::optional<CarOperatingPoint>& op) {
  if (!(current_duty > 0.0) || current_duty > 1.0 || !(proposed_duty > 0.0) ||
      proposed_duty > 1.0)
    throw std::invalid_argument("duty_cycle_gain: duty cycles must be in (0, 1]");
  if (noise_dominated || !op) return current_duty / proposed_duty;

  const double scale = proposed_duty / current_duty;
  const double before =
      car_predict(op->mu, op->eta1, op->eta2, op->n1_per_window, op->n2_per_window) - 1.0;
  const double after = car_predict(op->mu, op->eta1, op->eta2,
                                   op->n1_per_window * scale, op->n2_per_window) - 1.0;
  return after / before;
}

}  // namespace qclink
