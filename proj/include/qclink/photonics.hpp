#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qclink/units.hpp"

namespace qclink {

/// Pulsed SPDC pair source. Pairs per pulse are Poisson with mean mu;
/// each photon of a pair gets an independent Gaussian offset from the
/// pulse center (photon_sigma = 250 ps FWHM / 2.355 by default).
struct PairSourceSpec {
  int64_t pulse_period_ps = 5000;
  double mean_pairs_per_pulse = 0.02;
  double photon_sigma_ps = 106.0;
  Wavelength wavelength = Wavelength::nm(1536.0);

  void validate() const {
    if (pulse_period_ps <= 0)
      throw std::invalid_argument("PairSourceSpec: pulse_period must be > 0");
    if (!(mean_pairs_per_pulse > 0.0) || !(mean_pairs_per_pulse < 1.0))
      throw std::invalid_argument("PairSourceSpec: mu must be in (0, 1)");
    if (!(photon_sigma_ps >= 0.0))
      throw std::invalid_argument("PairSourceSpec: photon_sigma must be >= 0");
  }
};

/// SNSPD response parameters.
struct DetectorSpec {
  double efficiency = 0.8;
  double jitter_sigma_ps = 45.0;
  double dark_rate_hz = 100.0;
  int64_t dead_time_ps = 25000;

  void validate() const {
    if (!(efficiency >= 0.0) || !(efficiency <= 1.0))
      throw std::invalid_argument("DetectorSpec: efficiency must be in [0, 1]");
    if (!(jitter_sigma_ps >= 0.0) || !(dark_rate_hz >= 0.0) || dead_time_ps < 0)
      throw std::invalid_argument("DetectorSpec: jitter, dark rate and dead time must be >= 0");
  }
};

/// Time-tagger response: extra jitter plus timestamp quantization.
struct TaggerSpec {
  double jitter_sigma_ps = 8.0;
  int64_t resolution_ps = 1;

  void validate() const {
    if (!(jitter_sigma_ps >= 0.0))
      throw std::invalid_argument("TaggerSpec: jitter must be >= 0");
    if (resolution_ps < 1)
      throw std::invalid_argument("TaggerSpec: resolution must be >= 1 ps");
  }
};

/// One detection event. Streams are kept sorted non-decreasing in t
/// per channel.
struct TimeTag {
  uint16_t channel = 0;
  uint64_t t_ps = 0;

  friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

/// Photon arrival times in integer picoseconds, before detection.
/// May start slightly negative (Gaussian tail of the first pulse).
using ArrivalStream = std::vector<int64_t>;

/// Simulates the pulsed pair source over [0, duration): per pulse k at
/// k*pulse_period, Poisson(mu) pairs, one arrival per arm per pair.
/// Both returned streams are sorted. Deterministic given the seed.
std::pair<ArrivalStream, ArrivalStream> generate_pairs(const PairSourceSpec& src,
                                                       uint64_t duration_ps,
                                                       uint64_t seed);

/// Bernoulli thinning with the given survival probability; order preserved.
ArrivalStream attenuate(const ArrivalStream& stream, double transmittance, uint64_t seed);

/// Homogeneous Poisson process on [0, duration), sorted.
ArrivalStream background_stream(double rate_hz, uint64_t duration_ps, uint64_t seed);

/// Full detection chain: efficiency thinning, Gaussian jitter with
/// sigma^2 = det.jitter^2 + tagger.jitter^2, re-sort, non-paralyzable
/// dead time, quantization to the tagger resolution. Arrivals that jitter
/// below t = 0 are dropped.
std::vector<TimeTag> detect(const ArrivalStream& stream, const DetectorSpec& det,
                            const TaggerSpec& tagger, uint64_t seed,
                            uint16_t channel = 0);

/// Merges sorted tag streams into one sorted stream, stable for ties
/// (earlier input wins). Unsorted input is rejected.
std::vector<TimeTag> merge_streams(const std::vector<std::vector<TimeTag>>& streams);

/// Joint sampler for the detected pair process with per-arm survival
/// probabilities folded in: equivalent by Poisson splitting to
/// generate_pairs followed by per-arm thinning, but the cost scales with
/// detected events instead of generated pairs. sigma_a/b are the total
/// per-photon Gaussian spreads (source + detector + tagger, in
/// quadrature). Emits sorted per-arm arrival streams.
std::pair<ArrivalStream, ArrivalStream> sample_detected_pairs(
    const PairSourceSpec& src, double eta_a, double eta_b, double sigma_a_ps,
    double sigma_b_ps, uint64_t duration_ps, uint64_t seed);

/// Non-paralyzable dead time: drops events closer than dead_time_ps to the
/// last accepted event. Input must be sorted.
void apply_dead_time(ArrivalStream& stream, int64_t dead_time_ps);

/// Rounds timestamps to the tagger resolution grid.
void quantize(ArrivalStream& stream, int64_t resolution_ps);

/// Converts a sorted arrival stream to tags on the given channel,
/// dropping negative times.
std::vector<TimeTag> to_tags(const ArrivalStream& stream, uint16_t channel);

}  // namespace qclink
