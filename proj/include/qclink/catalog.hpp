#pragma once

#include <string>
#include <vector>

#include "qclink/channel.hpp"

namespace qclink {

/// Measured parameters of one deployed link, as a named catalog entry.
/// Quantum channel is C-band (1536 nm); clock pumps are O (1310 nm) or
/// L (1610 nm). Alphas are OTDR results in km^-1; betas are slope-fit
/// results in nm^-1 km^-1.
struct LinkParams {
  std::string name;
  double length_km;
  Attenuation alpha_o, alpha_c, alpha_l;
  RamanCoefficient beta_o, beta_l;
};

/// Built-in link catalog ("dab", "anl", plus the 59 km "anl-59" variant).
const std::vector<LinkParams>& link_catalog();
const LinkParams& catalog_link(const std::string& name);

/// Lumped filter+detector loss factor of the Raman measurement chain,
/// per pump band.
double catalog_eta_s(Band pump_band);

inline constexpr double kDefaultDeltaLambdaNm = 0.03;  // FBG passband
inline constexpr double kQuantumWavelengthNm = 1536.0;

FiberSpec make_fiber(const LinkParams& link);
RamanContext make_raman_context(Band pump_band, double delta_lambda_nm = kDefaultDeltaLambdaNm);

}  // namespace qclink
