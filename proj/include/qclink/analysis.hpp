#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qclink/channel.hpp"
#include "qclink/photonics.hpp"
#include "qclink/sync.hpp"

namespace qclink {

/// Binned time differences t_b - t_a over [-range, +range).
struct CoincidenceHistogram {
  int64_t bin_width_ps = 10;
  int64_t range_ps = 60000;
  std::vector<uint64_t> counts;
  int64_t center_offset_ps = 0;  // main-peak location once found

  size_t n_bins() const { return counts.size(); }
  double bin_center_ps(size_t i) const {
    return static_cast<double>(-range_ps) + (static_cast<double>(i) + 0.5) *
                                                static_cast<double>(bin_width_ps);
  }
  uint64_t total() const;
};

CoincidenceHistogram make_histogram(int64_t bin_width_ps, int64_t range_ps);

/// Accumulates all (a, b) pairs with |t_b - t_a| < range into h, using a
/// two-pointer sweep (O(|A| + |B| + matches)). Streams must be sorted.
void accumulate_histogram(CoincidenceHistogram& h, const std::vector<TimeTag>& a,
                          const std::vector<TimeTag>& b);

CoincidenceHistogram histogram(const std::vector<TimeTag>& a,
                               const std::vector<TimeTag>& b,
                               int64_t bin_width_ps = 10, int64_t range_ps = 60000);

/// Center of the maximum-sum sliding window of the given width; resolves a
/// residual clock offset instead of assuming the peak sits at zero. Raises
/// if no window stands significantly above the typical (median) window.
int64_t find_main_peak(const CoincidenceHistogram& h, int64_t pulse_period_ps,
                       int64_t window_ps = 450);

struct CarResult {
  double coincidences = 0.0;     // C: counts in the main window
  double accidental_mean = 0.0;  // A: mean counts per accidental window
  double car = 0.0;
  double sigma_car = 0.0;
  int64_t window_ps = 450;
  int peaks_used = 0;
  int64_t center_offset_ps = 0;

  bool finite() const { return std::isfinite(car); }
};

/// CAR = C/A following the counting convention of the measurement: C is
/// every event inside the window around the main peak (no floor
/// subtraction), A is the mean over the 2 * peaks_per_side windows at
/// center +/- k*pulse_period. sigma from Poisson propagation:
/// car * sqrt(1/C + 1/(A * peaks_used)). A = 0 with C > 0 yields car = +inf.
CarResult car_estimate(const CoincidenceHistogram& h, int64_t window_ps = 450,
                       int64_t pulse_period_ps = 5000, int peaks_per_side = 10);

/// Analytic CAR for a pulsed pair source with per-pulse pair mean mu, arm
/// efficiencies eta1/eta2 and per-window background counts n1/n2:
/// 1 + mu*eta1*eta2 / ((mu*eta1 + n1) * (mu*eta2 + n2)). Valid when the
/// main peak fits inside the counting window.
double car_predict(double mu, double eta1, double eta2, double n1_per_window,
                   double n2_per_window);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_sigma = 0.0;
  double r_squared = 0.0;
};

/// Least squares line fit. With sigmas empty, ordinary LS and slope error
/// from the residual variance; with per-point sigmas, inverse-variance
/// weighted LS and the standard analytic slope error.
FitResult linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> sigma = {});

struct DriftStats {
  double bin_s = 100.0;
  std::vector<double> bin_mean_ps;
  std::vector<double> bin_rms_ps;  // scatter around each bin mean
  double overall_sigma_ps = 0.0;   // sample std dev of all offsets
  double ptp_of_means_ps = 0.0;
};

DriftStats drift_stats(const OffsetSeries& series, double bin_s = 100.0);

/// One measured point of a Raman launch-power sweep.
struct RamanSweepPoint {
  double p0_w = 0.0;        // launch power
  double rate_hz = 0.0;     // detected scattered-photon rate
  double rate_sigma_hz = 0.0;  // 0 = unweighted
};

/// Full slope-fit chain: rates -> powers at the quantum wavelength, linear
/// fit of P_r vs P0, slope inverted for beta.
RamanCoefficient fit_raman_beta(const std::vector<RamanSweepPoint>& points,
                                RamanContext ctx, double length_km,
                                Attenuation alpha_quantum, Attenuation alpha_pump,
                                Wavelength quantum);

}  // namespace qclink
