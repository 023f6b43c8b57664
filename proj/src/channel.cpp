#include "qclink/channel.hpp"

#include <cmath>

namespace qclink {

namespace {

constexpr double kAlphaDegenerate = 1e-9;  // km^-1; below this, use the limit form

// (e^(-a_q L) - e^(-a_p L)) / (a_p - a_q), the fiber length-integral of the
// Raman transfer. Rewritten as e^(-a_q L) * (-expm1(-(a_p - a_q) L)) / (a_p - a_q)
// to avoid cancellation; the limit for a_p -> a_q is L * e^(-a_q L).
double raman_length_factor_km(double length_km, double alpha_q, double alpha_p) {
  const double da = alpha_p - alpha_q;
  if (std::fabs(da) < kAlphaDegenerate)
    return length_km * std::exp(-alpha_q * length_km);
  return std::exp(-alpha_q * length_km) * (-std::expm1(-da * length_km)) / da;
}

}  // namespace

void FiberSpec::validate() const {
  if (!(length_km > 0.0))
    throw std::invalid_argument("FiberSpec: length_km must be > 0");
  if (!(group_index > 0.0))
    throw std::invalid_argument("FiberSpec: group_index must be > 0");
  for (const auto& [band, b] : beta_by_pump) {
    b.validate();
    if (!alpha_by_band.count(band))
      throw std::invalid_argument("FiberSpec: pump band has beta but no alpha entry");
  }
}

Attenuation FiberSpec::alpha(Band band) const {
  const auto it = alpha_by_band.find(band);
  if (it == alpha_by_band.end())
    throw std::invalid_argument(std::string("FiberSpec: no attenuation entry for band ") +
                                to_string(band));
  return it->second;
}

RamanCoefficient FiberSpec::beta(Band pump_band) const {
  const auto it = beta_by_pump.find(pump_band);
  if (it == beta_by_pump.end())
    throw std::invalid_argument(std::string("FiberSpec: no Raman entry for pump band ") +
                                to_string(pump_band));
  return it->second;
}

double transmittance(Attenuation alpha, double length_km) {
  if (!(length_km >= 0.0))
    throw std::invalid_argument("transmittance: length must be >= 0");
  return std::exp(-alpha.alpha_per_km() * length_km);
}

Power raman_power(Power p0, RamanCoefficient beta, RamanContext ctx,
                  double length_km, Attenuation alpha_quantum,
                  Attenuation alpha_pump) {
  beta.validate();
  ctx.validate();
  if (!(length_km > 0.0))
    throw std::invalid_argument("raman_power: length must be > 0");
  const double g =
      raman_length_factor_km(length_km, alpha_quantum.alpha_per_km(), alpha_pump.alpha_per_km());
  return Power::watts(p0.w() * beta.beta * ctx.delta_lambda_nm * g / ctx.eta_s);
}

double raman_count_rate_hz(Power p0, RamanCoefficient beta, RamanContext ctx,
                           double length_km, Attenuation alpha_quantum,
                           Attenuation alpha_pump, Wavelength quantum) {
  return power_to_photon_rate_hz(
      raman_power(p0, beta, ctx, length_km, alpha_quantum, alpha_pump), quantum);
}

RamanCoefficient beta_from_slope(double slope, RamanContext ctx,
                                 double length_km, Attenuation alpha_quantum,
                                 Attenuation alpha_pump, double slope_sigma) {
  ctx.validate();
  if (!(slope >= 0.0))
    throw std::invalid_argument("beta_from_slope: slope must be >= 0");
  if (!(length_km > 0.0))
    throw std::invalid_argument("beta_from_slope: degenerate geometry, length must be > 0");
  const double g =
      raman_length_factor_km(length_km, alpha_quantum.alpha_per_km(), alpha_pump.alpha_per_km());
  const double beta_per_slope = ctx.eta_s / (ctx.delta_lambda_nm * g);
  RamanCoefficient out;
  out.beta = slope * beta_per_slope;
  out.uncertainty = std::fabs(slope_sigma) * beta_per_slope;
  return out;
}

int64_t propagation_delay_ps(double length_km, double group_index) {
  if (!(length_km >= 0.0))
    throw std::invalid_argument("propagation_delay: length must be >= 0");
  const double seconds = length_km * 1e3 * group_index / kSpeedOfLightMps;
  return static_cast<int64_t>(std::llround(seconds * 1e12));
}

double equivalent_ideal_length_km(double total_loss_db, double ideal_alpha_db_per_km) {
  if (!(total_loss_db > 0.0) || !(ideal_alpha_db_per_km > 0.0))
    throw std::invalid_argument("equivalent_ideal_length: inputs must be > 0");
  return total_loss_db / ideal_alpha_db_per_km;
}

}  // namespace qclink
