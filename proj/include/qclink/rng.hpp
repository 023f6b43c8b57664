#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace qclink {

// Self-contained generator so that seeded streams are identical across
// platforms and standard libraries (tag files and manifests are
// reproducible byte for byte). Core is xoshiro256**, seeded via splitmix64.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; always consumes two uniforms.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  /// Poisson sample. Knuth's method below mean 30, normal approximation
  /// rounded to the nearest non-negative integer above.
  uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      uint64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= uniform();
      } while (p > limit);
      return k - 1;
    }
    const double v = normal(mean, std::sqrt(mean));
    return v <= 0.0 ? 0 : static_cast<uint64_t>(v + 0.5);
  }

  /// Poisson conditioned on being >= 1, by CDF inversion.
  uint64_t poisson_at_least_one(double mean) {
    const double p_zero = std::exp(-mean);
    double u = uniform() * (1.0 - p_zero);
    uint64_t k = 0;
    double term = p_zero;  // P(N = k), starting at k = 0
    do {
      ++k;
      term *= mean / static_cast<double>(k);
      u -= term;
    } while (u > 0.0 && k < 10000);
    return k;
  }

  /// Number of Bernoulli(p) trials up to and including the first success
  /// (support 1, 2, ...). Used to skip runs of inactive source pulses.
  uint64_t geometric(double p) {
    if (p >= 1.0) return 1;
    const double g = std::log1p(-uniform()) / std::log1p(-p);
    if (g >= 9.0e18) return UINT64_MAX;
    return 1 + static_cast<uint64_t>(g);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_[4];
};

/// Derives an independent sub-seed for a named role (stream, arm,
/// detector...) so that adding draws in one role never perturbs another.
inline uint64_t derive_seed(uint64_t master, std::string_view role) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the role tag
  for (const char c : role) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  uint64_t x = master ^ h;
  // one splitmix scramble, so master/role pairs decorrelate
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qclink
