#include "qclink/units.hpp"

namespace qclink {

Band band_of_nm(double nm) {
  if (nm >= 1260.0 && nm < 1360.0) return Band::O;
  if (nm >= 1530.0 && nm < 1565.0) return Band::C;
  if (nm >= 1565.0 && nm <= 1625.0) return Band::L;
  return Band::Other;
}

const char* to_string(Band band) {
  switch (band) {
    case Band::O: return "O";
    case Band::C: return "C";
    case Band::L: return "L";
    case Band::Other: return "other";
  }
  return "other";
}

Band band_from_string(const std::string& s) {
  if (s == "O" || s == "o") return Band::O;
  if (s == "C" || s == "c") return Band::C;
  if (s == "L" || s == "l") return Band::L;
  if (s == "other") return Band::Other;
  throw std::invalid_argument("unknown band label: " + s);
}

double photon_energy_j(Wavelength w) {
  return kPlanckJs * kSpeedOfLightMps / w.as_m();
}

double power_to_photon_rate_hz(Power p, Wavelength w) {
  return p.w() / photon_energy_j(w);
}

}  // namespace qclink
