#include "qclink/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qclink/rng.hpp"

namespace qclink {

namespace {

int64_t jittered(int64_t center_ps, double sigma_ps, Rng& rng) {
  if (sigma_ps <= 0.0) return center_ps;
  return center_ps + static_cast<int64_t>(std::llround(rng.normal(0.0, sigma_ps)));
}

// pulses with k * period < duration
uint64_t pulses_in(uint64_t duration_ps, int64_t period_ps) {
  const uint64_t period = static_cast<uint64_t>(period_ps);
  return duration_ps / period + (duration_ps % period != 0 ? 1 : 0);
}

void check_sorted(const ArrivalStream& s, const char* what) {
  if (!std::is_sorted(s.begin(), s.end()))
    throw std::invalid_argument(std::string(what) + ": input stream must be sorted");
}

}  // namespace

std::pair<ArrivalStream, ArrivalStream> generate_pairs(const PairSourceSpec& src,
                                                       uint64_t duration_ps,
                                                       uint64_t seed) {
  src.validate();
  if (duration_ps < static_cast<uint64_t>(src.pulse_period_ps))
    throw std::invalid_argument("generate_pairs: duration must cover at least one pulse");

  Rng rng(derive_seed(seed, "source.pairs"));
  const uint64_t n_pulses = pulses_in(duration_ps, src.pulse_period_ps);
  const double mu = src.mean_pairs_per_pulse;
  const double p_active = -std::expm1(-mu);

  ArrivalStream arm_a, arm_b;
  arm_a.reserve(static_cast<size_t>(mu * n_pulses * 1.1) + 16);
  arm_b.reserve(arm_a.capacity());

  // Skip directly between pulses that emit at least one pair; the skip is
  // geometric and the per-pulse count is Poisson conditioned on >= 1.
  uint64_t pulse = 0;
  for (;;) {
    const uint64_t g = rng.geometric(p_active);
    if (g - 1 >= n_pulses - pulse) break;
    pulse += g - 1;
    const int64_t t_pulse = static_cast<int64_t>(pulse) * src.pulse_period_ps;
    const uint64_t n_pairs = rng.poisson_at_least_one(mu);
    for (uint64_t i = 0; i < n_pairs; ++i) {
      arm_a.push_back(jittered(t_pulse, src.photon_sigma_ps, rng));
      arm_b.push_back(jittered(t_pulse, src.photon_sigma_ps, rng));
    }
    if (++pulse >= n_pulses) break;
  }
  std::sort(arm_a.begin(), arm_a.end());
  std::sort(arm_b.begin(), arm_b.end());
  return {std::move(arm_a), std::move(arm_b)};
}

ArrivalStream attenuate(const ArrivalStream& stream, double transmittance, uint64_t seed) {
  if (!(transmittance >= 0.0) || !(transmittance <= 1.0))
    throw std::invalid_argument("attenuate: transmittance must be in [0, 1]");
  if (transmittance == 1.0) return stream;
  ArrivalStream out;
  if (transmittance == 0.0) return out;
  Rng rng(derive_seed(seed, "attenuate"));
  out.reserve(static_cast<size_t>(stream.size() * transmittance * 1.1) + 16);
  for (const int64_t t : stream)
    if (rng.bernoulli(transmittance)) out.push_back(t);
  return out;
}

ArrivalStream background_stream(double rate_hz, uint64_t duration_ps, uint64_t seed) {
  if (!(rate_hz >= 0.0))
    throw std::invalid_argument("background_stream: rate must be >= 0");
  ArrivalStream out;
  if (rate_hz == 0.0 || duration_ps == 0) return out;
  Rng rng(derive_seed(seed, "background"));
  const double rate_per_ps = rate_hz * 1e-12;
  out.reserve(static_cast<size_t>(rate_per_ps * duration_ps * 1.1) + 16);
  double t = rng.exponential(rate_per_ps);
  while (t < static_cast<double>(duration_ps)) {
    out.push_back(static_cast<int64_t>(t));
    t += rng.exponential(rate_per_ps);
  }
  return out;
}

std::vector<TimeTag> detect(const ArrivalStream& stream, const DetectorSpec& det,
                            const TaggerSpec& tagger, uint64_t seed, uint16_t channel) {
  det.validate();
  tagger.validate();
  Rng rng(derive_seed(seed, "detect"));
  const double sigma = std::hypot(det.jitter_sigma_ps, tagger.jitter_sigma_ps);

  ArrivalStream kept;
  kept.reserve(static_cast<size_t>(stream.size() * det.efficiency) + 16);
  for (const int64_t t : stream) {
    if (det.efficiency < 1.0 && !rng.bernoulli(det.efficiency)) continue;
    kept.push_back(jittered(t, sigma, rng));
  }
  std::sort(kept.begin(), kept.end());
  apply_dead_time(kept, det.dead_time_ps);
  quantize(kept, tagger.resolution_ps);
  return to_tags(kept, channel);
}

std::vector<TimeTag> merge_streams(const std::vector<std::vector<TimeTag>>& streams) {
  size_t total = 0;
  for (const auto& s : streams) {
    if (!std::is_sorted(s.begin(), s.end(),
                        [](const TimeTag& a, const TimeTag& b) { return a.t_ps < b.t_ps; }))
      throw std::invalid_argument("merge_streams: input stream must be sorted");
    total += s.size();
  }
  std::vector<TimeTag> out;
  out.reserve(total);
  std::vector<size_t> pos(streams.size(), 0);
  while (out.size() < total) {
    size_t best = streams.size();
    uint64_t best_t = UINT64_MAX;
    for (size_t i = 0; i < streams.size(); ++i) {
      if (pos[i] < streams[i].size() && streams[i][pos[i]].t_ps < best_t) {
        best = i;
        best_t = streams[i][pos[i]].t_ps;
      }
    }
    out.push_back(streams[best][pos[best]++]);
  }
  return out;
}

std::pair<ArrivalStream, ArrivalStream> sample_detected_pairs(
    const PairSourceSpec& src, double eta_a, double eta_b, double sigma_a_ps,
    double sigma_b_ps, uint64_t duration_ps, uint64_t seed) {
  src.validate();
  if (!(eta_a >= 0.0) || eta_a > 1.0 || !(eta_b >= 0.0) || eta_b > 1.0)
    throw std::invalid_argument("sample_detected_pairs: arm efficiencies must be in [0, 1]");

  ArrivalStream arm_a, arm_b;
  const uint64_t n_pulses = duration_ps == 0 ? 0 : pulses_in(duration_ps, src.pulse_period_ps);
  if (n_pulses == 0) return {std::move(arm_a), std::move(arm_b)};

  const double mu = src.mean_pairs_per_pulse;
  // Poisson splitting of the per-pulse pair count into surviving categories.
  const double lam_both = mu * eta_a * eta_b;
  const double lam_a_only = mu * eta_a * (1.0 - eta_b);
  const double lam_b_only = mu * eta_b * (1.0 - eta_a);
  const double lam_total = lam_both + lam_a_only + lam_b_only;
  if (lam_total <= 0.0) return {std::move(arm_a), std::move(arm_b)};
  const double p_active = -std::expm1(-lam_total);

  Rng rng(derive_seed(seed, "source.pairs.thinned"));
  arm_a.reserve(static_cast<size_t>((lam_both + lam_a_only) * n_pulses * 1.1) + 16);
  arm_b.reserve(static_cast<size_t>((lam_both + lam_b_only) * n_pulses * 1.1) + 16);

  uint64_t pulse = 0;
  for (;;) {
    const uint64_t g = rng.geometric(p_active);
    if (g - 1 >= n_pulses - pulse) break;
    pulse += g - 1;
    const int64_t t_pulse = static_cast<int64_t>(pulse) * src.pulse_period_ps;
    uint64_t n = rng.poisson_at_least_one(lam_total);
    for (; n > 0; --n) {
      const double u = rng.uniform() * lam_total;
      if (u < lam_both) {
        arm_a.push_back(jittered(t_pulse, sigma_a_ps, rng));
        arm_b.push_back(jittered(t_pulse, sigma_b_ps, rng));
      } else if (u < lam_both + lam_a_only) {
        arm_a.push_back(jittered(t_pulse, sigma_a_ps, rng));
      } else {
        arm_b.push_back(jittered(t_pulse, sigma_b_ps, rng));
      }
    }
    if (++pulse >= n_pulses) break;
  }
  std::sort(arm_a.begin(), arm_a.end());
  std::sort(arm_b.begin(), arm_b.end());
  return {std::move(arm_a), std::move(arm_b)};
}

void apply_dead_time(ArrivalStream& stream, int64_t dead_time_ps) {
  if (dead_time_ps <= 0 || stream.empty()) return;
  size_t w = 1;
  int64_t last = stream.front();
  for (size_t r = 1; r < stream.size(); ++r) {
    if (stream[r] - last < dead_time_ps) continue;
    last = stream[r];
    stream[w++] = stream[r];
  }
  stream.resize(w);
}

void quantize(ArrivalStream& stream, int64_t resolution_ps) {
  if (resolution_ps <= 1) return;
  const double res = static_cast<double>(resolution_ps);
  for (int64_t& t : stream)
    t = static_cast<int64_t>(std::llround(static_cast<double>(t) / res)) * resolution_ps;
}

std::vector<TimeTag> to_tags(const ArrivalStream& stream, uint16_t channel) {
  check_sorted(stream, "to_tags");
  std::vector<TimeTag> out;
  out.reserve(stream.size());
  for (const int64_t t : stream)
    if (t >= 0) out.push_back(TimeTag{channel, static_cast<uint64_t>(t)});
  return out;
}

}  // namespace qclink
