#pragma once

#include <cstdint>
#include <map>

#include "qclink/units.hpp"

namespace qclink {

/// Spontaneous Raman scattering coefficient of one pump band into the
/// quantum channel, in nm^-1 km^-1 (deployed-fiber values are ~1e-10).
struct RamanCoefficient {
  double beta = 0.0;
  double uncertainty = 0.0;

  void validate() const {
    if (!(beta >= 0.0) || !(uncertainty >= 0.0))
      throw std::invalid_argument("RamanCoefficient: beta and uncertainty must be >= 0");
  }
};

/// Out-of-fiber factors of the Raman transfer: collection bandwidth of the
/// narrowband filter and the lumped insertion/detection loss factor eta_s
/// (>= 1; folds DEMUX + FBG losses and detector efficiency).
struct RamanContext {
  double delta_lambda_nm = 0.03;
  double eta_s = 1.0;

  void validate() const {
    if (!(delta_lambda_nm > 0.0))
      throw std::invalid_argument("RamanContext: delta_lambda must be > 0");
    if (!(eta_s >= 1.0))
      throw std::invalid_argument("RamanContext: eta_s must be >= 1");
  }
};

/// One deployed fiber: length plus the per-band loss and per-pump-band
/// Raman coefficients measured for it (OTDR / slope-fit outputs).
struct FiberSpec {
  double length_km = 0.0;
  std::map<Band, Attenuation> alpha_by_band;
  std::map<Band, RamanCoefficient> beta_by_pump;
  double group_index = 1.468;

  void validate() const;
  Attenuation alpha(Band band) const;          // throws if the band has no entry
  RamanCoefficient beta(Band pump_band) const; // throws if the band has no entry
};

/// e^(-alpha*L) power transmittance.
double transmittance(Attenuation alpha, double length_km);

/// Transmitted power of pump light spontaneously Raman-scattered into the
/// quantum channel over a fiber of the given length:
///
///   P_r = P0 * beta * dlambda * (e^(-a_q L) - e^(-a_p L)) / ((a_p - a_q) * eta_s)
///
/// The difference quotient is evaluated via expm1, so it stays accurate for
/// any pump/quantum loss separation; below |a_p - a_q| = 1e-9 km^-1 the
/// analytic limit P0 * beta * dlambda * L * e^(-a_q L) / eta_s is used.
/// The result is non-negative regardless of which loss is larger.
Power raman_power(Power p0, RamanCoefficient beta, RamanContext ctx,
                  double length_km, Attenuation alpha_quantum,
                  Attenuation alpha_pump);

/// raman_power converted to a detected photon rate at the quantum wavelength.
double raman_count_rate_hz(Power p0, RamanCoefficient beta, RamanContext ctx,
                           double length_km, Attenuation alpha_quantum,
                           Attenuation alpha_pump, Wavelength quantum);

/// Inverts the Raman transfer for beta given a fitted P_r/P0 slope.
/// slope_sigma, when provided, propagates linearly into the uncertainty.
RamanCoefficient beta_from_slope(double slope, RamanContext ctx,
                                 double length_km, Attenuation alpha_quantum,
                                 Attenuation alpha_pump,
                                 double slope_sigma = 0.0);

/// Group delay n*L/c rounded to the nearest picosecond.
int64_t propagation_delay_ps(double length_km, double group_index = 1.468);

/// Length of ideal fiber with the same total loss (e.g. 0.18 dB/km for
/// C-band in low-loss single-mode fiber).
double equivalent_ideal_length_km(double total_loss_db, double ideal_alpha_db_per_km);

}  // namespace qclink
