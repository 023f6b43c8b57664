#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qclink {

// CODATA / SI exact values.
inline constexpr double kPlanckJs = 6.62607015e-34;       // J*s
inline constexpr double kSpeedOfLightMps = 299792458.0;   // m/s
inline constexpr double kDbPerNeper = 4.3429448190325183; // 10/ln(10)

/// Telecom band labels, ITU ranges: O 1260-1360 nm, C 1530-1565 nm,
/// L 1565-1625 nm. Everything else is Other.
enum class Band { O, C, L, Other };

Band band_of_nm(double nm);
const char* to_string(Band band);
Band band_from_string(const std::string& s);

/// Non-negative optical power, stored in watts. dBm and mW are views;
/// all internal arithmetic stays in watts.
class Power {
 public:
  Power() = default;

  static Power watts(double w) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("Power: watts must be finite and >= 0");
    return Power(w);
  }
  static Power milliwatts(double mw) { return watts(mw * 1e-3); }
  static Power from_dbm(double dbm) {
    if (!std::isfinite(dbm))
      throw std::invalid_argument("Power: dBm must be finite");
    return Power(1e-3 * std::pow(10.0, dbm / 10.0));
  }

  double w() const { return watts_; }
  double mw() const { return watts_ * 1e3; }
  /// -inf for zero power.
  double dbm() const { return 10.0 * std::log10(watts_ * 1e3); }

 private:
  explicit Power(double w) : watts_(w) {}
  double watts_ = 0.0;
};

/// Fiber power attenuation coefficient. Stored in natural units (km^-1,
/// nepers); dB/km is a derived view to avoid silent double conversions.
class Attenuation {
 public:
  Attenuation() = default;

  static Attenuation per_km(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0)
      throw std::invalid_argument("Attenuation: alpha must be finite and >= 0");
    return Attenuation(alpha);
  }
  static Attenuation db_per_km(double db) { return per_km(db / kDbPerNeper); }

  double alpha_per_km() const { return alpha_; }
  double db_per_km() const { return alpha_ * kDbPerNeper; }

 private:
  explicit Attenuation(double alpha) : alpha_(alpha) {}
  double alpha_ = 0.0;
};

class Wavelength {
 public:
  Wavelength() = default;

  static Wavelength nm(double nm) {
    if (!std::isfinite(nm) || nm <= 0.0)
      throw std::invalid_argument("Wavelength: nm must be finite and > 0");
    return Wavelength(nm);
  }

  double as_nm() const { return nm_; }
  double as_m() const { return nm_ * 1e-9; }
  Band band() const { return band_of_nm(nm_); }

 private:
  explicit Wavelength(double nm) : nm_(nm) {}
  double nm_ = 1550.0;
};

inline Power dbm_to_watts(double dbm) { return Power::from_dbm(dbm); }

/// h*c/lambda in joules.
double photon_energy_j(Wavelength w);

/// Photon flux equivalent of an optical power: P / (h*c/lambda), in s^-1.
double power_to_photon_rate_hz(Power p, Wavelength w);

}  // namespace qclink
