#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qclink/photonics.hpp"
#include "qclink/rng.hpp"

using namespace qclink;

namespace {

PairSourceSpec default_source() { return PairSourceSpec{}; }

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (const double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("generate_pairs: seeded determinism and Poisson pair count") {
  const PairSourceSpec src = default_source();  // mu = 0.02, 5 ns period
  const uint64_t duration = 5'000'000'000'000ULL;  // 5 s
  auto [a1, b1] = generate_pairs(src, duration, 99);
  auto [a2, b2] = generate_pairs(src, duration, 99);
  CHECK(a1 == a2);
  CHECK(b1 == b2);
  auto [a3, b3] = generate_pairs(src, duration, 100);
  CHECK(a1 != a3);

  // one arrival per arm per pair
  CHECK(a1.size() == b1.size());
  const double expected = 0.02 * 1e9;  // mu * pulses
  CHECK(std::fabs(static_cast<double>(a1.size()) - expected) <= 3.0 * std::sqrt(expected));
  CHECK(std::is_sorted(a1.begin(), a1.end()));
  CHECK(std::is_sorted(b1.begin(), b1.end()));
}

TEST_CASE("generate_pairs: single pulse support and duration check") {
  PairSourceSpec src = default_source();
  src.mean_pairs_per_pulse = 0.9;
  bool saw_arrivals = false;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto [a, b] = generate_pairs(src, static_cast<uint64_t>(src.pulse_period_ps), seed);
    for (const int64_t t : a) {
      saw_arrivals = true;
      CHECK(std::llabs(t) <= static_cast<int64_t>(5.0 * src.photon_sigma_ps));
    }
    for (const int64_t t : b) CHECK(std::llabs(t) <= static_cast<int64_t>(5.0 * src.photon_sigma_ps));
  }
  CHECK(saw_arrivals);
  CHECK_THROWS_AS(generate_pairs(src, 4999, 1), std::invalid_argument);
}

TEST_CASE("generate_pairs rejects out-of-regime sources") {
  PairSourceSpec src = default_source();
  src.mean_pairs_per_pulse = 1.5;
  CHECK_THROWS_AS(src.validate(), std::invalid_argument);
  src.mean_pairs_per_pulse = 0.0;
  CHECK_THROWS_AS(src.validate(), std::invalid_argument);
}

TEST_CASE("attenuate") {
  ArrivalStream s(1'000'000);
  for (size_t i = 0; i < s.size(); ++i) s[i] = static_cast<int64_t>(i) * 100;

  CHECK(attenuate(s, 1.0, 4) == s);
  CHECK(attenuate(s, 0.0, 4).empty());
  CHECK_THROWS_AS(attenuate(s, 1.1, 4), std::invalid_argument);
  CHECK_THROWS_AS(attenuate(s, -0.1, 4), std::invalid_argument);

  const ArrivalStream thinned = attenuate(s, 0.0131, 4);
  CHECK(std::is_sorted(thinned.begin(), thinned.end()));
  // Bernoulli: 13100 +/- 3*sqrt(N p (1-p)) = +/- 341
  CHECK(std::fabs(static_cast<double>(thinned.size()) - 13100.0) <= 342.0);
  CHECK(attenuate(s, 0.0131, 4) == thinned);  // deterministic
}

TEST_CASE("background_stream: Poisson counts and exponential gaps") {
  CHECK(background_stream(0.0, 1'000'000'000'000ULL, 1).empty());
  CHECK(background_stream(1e6, 0, 1).empty());

  const double rate = 2.78e4;
  const ArrivalStream s = background_stream(rate, 1'000'000'000'000ULL, 8);  // 1 s
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::fabs(static_cast<double>(s.size()) - 27800.0) <= 3.0 * 167.0);

  // KS test of inter-arrival times against Exp(rate), alpha = 0.01
  std::vector<double> gaps;
  for (size_t i = 1; i < s.size(); ++i)
    gaps.push_back(static_cast<double>(s[i] - s[i - 1]) * 1e-12);
  std::sort(gaps.begin(), gaps.end());
  double d = 0.0;
  const double n = static_cast<double>(gaps.size());
  for (size_t i = 0; i < gaps.size(); ++i) {
    const double cdf = -std::expm1(-rate * gaps[i]);
    d = std::max(d, std::fabs(cdf - static_cast<double>(i + 1) / n));
    d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
  }
  CHECK(d < 1.6276 / std::sqrt(n));
}

TEST_CASE("detect: identity settings pass the stream through") {
  DetectorSpec det;
  det.efficiency = 1.0;
  det.jitter_sigma_ps = 0.0;
  det.dark_rate_hz = 0.0;
  det.dead_time_ps = 0;
  TaggerSpec tagger;
  tagger.jitter_sigma_ps = 0.0;
  tagger.resolution_ps = 1;

  const ArrivalStream s = {100, 5000, 10'000'000};
  const std::vector<TimeTag> tags = detect(s, det, tagger, 3, 5);
  REQUIRE(tags.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(tags[i].channel == 5);
    CHECK(tags[i].t_ps == static_cast<uint64_t>(s[i]));
  }

  // negative arrivals are dropped at tag conversion
  const std::vector<TimeTag> clipped = detect({-50, 100}, det, tagger, 3, 0);
  REQUIRE(clipped.size() == 1);
  CHECK(clipped[0].t_ps == 100);
}

TEST_CASE("detect: dead time drops the trailing event") {
  DetectorSpec det;
  det.efficiency = 1.0;
  det.jitter_sigma_ps = 0.0;
  det.dead_time_ps = 25'000;  // 25 ns
  TaggerSpec tagger;
  tagger.jitter_sigma_ps = 0.0;

  const std::vector<TimeTag> tags = detect({0, 10'000}, det, tagger, 3, 0);  // 10 ns apart
  REQUIRE(tags.size() == 1);
  CHECK(tags[0].t_ps == 0);

  // exactly dead_time apart survives
  CHECK(detect({0, 25'000}, det, tagger, 3, 0).size() == 2);
}

TEST_CASE("detect: combined jitter reproduces the requested sigma") {
  DetectorSpec det;
  det.efficiency = 1.0;
  det.jitter_sigma_ps = 40.0;
  det.dead_time_ps = 0;
  TaggerSpec tagger;
  tagger.jitter_sigma_ps = 30.0;  // total sqrt(40^2 + 30^2) = 50

  const ArrivalStream s(100'000, 1'000'000'000);
  const std::vector<TimeTag> tags = detect(s, det, tagger, 12, 0);
  std::vector<double> deltas;
  for (const TimeTag& t : tags)
    deltas.push_back(static_cast<double>(t.t_ps) - 1'000'000'000.0);
  CHECK(std::fabs(sample_std(deltas) - 50.0) / 50.0 < 0.05);
}

TEST_CASE("detect: efficiency thins at the right rate") {
  DetectorSpec det;
  det.efficiency = 0.8;
  det.jitter_sigma_ps = 0.0;
  det.dead_time_ps = 0;
  ArrivalStream s(100'000);
  for (size_t i = 0; i < s.size(); ++i) s[i] = static_cast<int64_t>(i) * 1000;
  const auto tags = detect(s, det, TaggerSpec{0.0, 1}, 21, 0);
  CHECK(std::fabs(static_cast<double>(tags.size()) - 80'000.0) <= 3.0 * std::sqrt(16'000.0));
}

TEST_CASE("quantization snaps to the tagger grid") {
  DetectorSpec det;
  det.efficiency = 1.0;
  det.jitter_sigma_ps = 0.0;
  det.dead_time_ps = 0;
  TaggerSpec tagger;
  tagger.jitter_sigma_ps = 0.0;
  tagger.resolution_ps = 4;
  const auto tags = detect({9, 11, 13, 14}, det, tagger, 0, 0);
  REQUIRE(tags.size() == 4);
  CHECK(tags[0].t_ps == 8);   // 9/4 = 2.25 -> 2
  CHECK(tags[1].t_ps == 12);  // 11/4 = 2.75 -> 3
  CHECK(tags[2].t_ps == 12);
  CHECK(tags[3].t_ps == 16);  // 14/4 = 3.5 rounds away from zero
}

TEST_CASE("merge_streams") {
  const std::vector<TimeTag> x = {{0, 10}, {0, 20}, {0, 30}};
  const std::vector<TimeTag> y = {{1, 5}, {1, 20}, {1, 40}};

  CHECK(merge_streams({x, {}}) == x);

  const std::vector<TimeTag> m = merge_streams({x, y});
  CHECK(m.size() == x.size() + y.size());
  CHECK(std::is_sorted(m.begin(), m.end(), [](const TimeTag& a, const TimeTag& b) {
    return a.t_ps < b.t_ps;
  }));
  // stable on ties: x's 20 precedes y's 20
  CHECK(m[2].channel == 0);
  CHECK(m[3].channel == 1);

  CHECK_THROWS_AS(merge_streams({{{0, 20}, {0, 10}}}), std::invalid_argument);
}

TEST_CASE("independent sub-seeds: one arm's processing never perturbs the other") {
  const PairSourceSpec src = default_source();
  auto [a, b] = generate_pairs(src, 50'000'000ULL, 77);

  DetectorSpec det_a;
  const ArrivalStream a_thinned = attenuate(a, 0.5, derive_seed(77, "arm0.att"));
  const auto a_tags_before = detect(a_thinned, det_a, TaggerSpec{}, derive_seed(77, "arm0.det"), 0);

  // processing arm B (or changing its parameters) must not change arm A
  DetectorSpec det_b;
  det_b.efficiency = 0.11;
  (void)detect(attenuate(b, 0.9, derive_seed(77, "arm1.att")), det_b, TaggerSpec{},
               derive_seed(77, "arm1.det"), 1);
  const auto a_tags_after = detect(a_thinned, det_a, TaggerSpec{}, derive_seed(77, "arm0.det"), 0);
  CHECK(a_tags_before == a_tags_after);
}

TEST_CASE("sample_detected_pairs matches generate+attenuate in distribution") {
  PairSourceSpec src = default_source();
  src.mean_pairs_per_pulse = 0.1;
  src.photon_sigma_ps = 10.0;
  const uint64_t duration = 500'000'000'000ULL;  // 0.5 s -> 1e8 pulses
  const double eta_a = 0.3, eta_b = 0.7;

  auto [a, b] = sample_detected_pairs(src, eta_a, eta_b, 10.0, 10.0, duration, 31);
  CHECK(a == sample_detected_pairs(src, eta_a, eta_b, 10.0, 10.0, duration, 31).first);

  const double pulses = 1e8;
  const double exp_a = 0.1 * eta_a * pulses;
  const double exp_b = 0.1 * eta_b * pulses;
  CHECK(std::fabs(static_cast<double>(a.size()) - exp_a) <= 4.0 * std::sqrt(exp_a));
  CHECK(std::fabs(static_cast<double>(b.size()) - exp_b) <= 4.0 * std::sqrt(exp_b));

  // pair correlation survives the joint thinning: count |dt| <= 100 ps
  // coincidences with a two-pointer sweep (sigma_dt = 14 ps, window ~7 sigma)
  size_t lo = 0;
  uint64_t coincident = 0;
  for (const int64_t ta : a) {
    while (lo < b.size() && b[lo] < ta - 100) ++lo;
    for (size_t j = lo; j < b.size() && b[j] <= ta + 100; ++j) ++coincident;
  }
  // true pairs mu*eta_a*eta_b plus same-pulse accidentals mu^2*eta_a*eta_b
  const double expected_pairs = 0.1 * eta_a * eta_b * (1.0 + 0.1) * pulses;
  CHECK(std::fabs(static_cast<double>(coincident) - expected_pairs) <=
        4.0 * std::sqrt(expected_pairs) + 0.01 * expected_pairs);

  CHECK(sample_detected_pairs(src, 0.0, 0.0, 10.0, 10.0, duration, 31).first.empty());
  CHECK(sample_detected_pairs(src, 1.0, 1.0, 10.0, 10.0, 0, 31).second.empty());
}

TEST_CASE("apply_dead_time and quantize helpers") {
  ArrivalStream s = {0, 10, 30, 70, 200};
  apply_dead_time(s, 50);
  CHECK(s == ArrivalStream{0, 70, 200});
  ArrivalStream empty;
  apply_dead_time(empty, 50);
  CHECK(empty.empty());

  ArrivalStream q = {-3, 2, 7, 11};
  quantize(q, 5);
  CHECK(q == ArrivalStream{-5, 0, 5, 10});
}
