#include "qclink/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qclink {

namespace {

void check_tag_sorted(const std::vector<TimeTag>& s, const char* what) {
  if (!std::is_sorted(s.begin(), s.end(),
                      [](const TimeTag& a, const TimeTag& b) { return a.t_ps < b.t_ps; }))
    throw std::invalid_argument(std::string(what) + ": tag stream must be sorted");
}

// Sum of counts in the bins whose centers lie in [center - w/2, center + w/2).
double window_sum(const CoincidenceHistogram& h, double center_ps, int64_t window_ps) {
  const double bw = static_cast<double>(h.bin_width_ps);
  const double lo = center_ps - static_cast<double>(window_ps) / 2.0;
  const double hi = center_ps + static_cast<double>(window_ps) / 2.0;
  // first bin whose center >= lo
  const double first_f = std::ceil((lo - (-static_cast<double>(h.range_ps)) - 0.5 * bw) / bw);
  int64_t i = static_cast<int64_t>(std::max(0.0, first_f));
  double sum = 0.0;
  for (; i < static_cast<int64_t>(h.n_bins()); ++i) {
    const double c = h.bin_center_ps(static_cast<size_t>(i));
    if (c >= hi) break;
    if (c >= lo) sum += static_cast<double>(h.counts[static_cast<size_t>(i)]);
  }
  return sum;
}

}  // namespace

uint64_t CoincidenceHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

CoincidenceHistogram make_histogram(int64_t bin_width_ps, int64_t range_ps) {
  if (bin_width_ps <= 0 || range_ps <= 0 || (2 * range_ps) % bin_width_ps != 0)
    throw std::invalid_argument("histogram: 2*range must be a positive multiple of bin_width");
  CoincidenceHistogram h;
  h.bin_width_ps = bin_width_ps;
  h.range_ps = range_ps;
  h.counts.assign(static_cast<size_t>(2 * range_ps / bin_width_ps), 0);
  return h;
}

void accumulate_histogram(CoincidenceHistogram& h, const std::vector<TimeTag>& a,
                          const std::vector<TimeTag>& b) {
  check_tag_sorted(a, "histogram(a)");
  check_tag_sorted(b, "histogram(b)");
  const int64_t range = h.range_ps;
  size_t lo = 0;
  for (const TimeTag& ta : a) {
    const int64_t t = static_cast<int64_t>(ta.t_ps);
    while (lo < b.size() && static_cast<int64_t>(b[lo].t_ps) < t - range) ++lo;
    for (size_t j = lo; j < b.size(); ++j) {
      const int64_t dt = static_cast<int64_t>(b[j].t_ps) - t;
      if (dt >= range) break;
      h.counts[static_cast<size_t>((dt + range) / h.bin_width_ps)]++;
    }
  }
}

CoincidenceHistogram histogram(const std::vector<TimeTag>& a, const std::vector<TimeTag>& b,
                               int64_t bin_width_ps, int64_t range_ps) {
  CoincidenceHistogram h = make_histogram(bin_width_ps, range_ps);
  accumulate_histogram(h, a, b);
  return h;
}

int64_t find_main_peak(const CoincidenceHistogram& h, int64_t pulse_period_ps,
                       int64_t window_ps) {
  if (h.counts.empty() || h.total() == 0)
    throw std::invalid_argument("find_main_peak: empty histogram");
  if (pulse_period_ps <= 0 || window_ps <= 0)
    throw std::invalid_argument("find_main_peak: period and window must be > 0");

  size_t w_bins = static_cast<size_t>(
      std::max<int64_t>(1, (window_ps + h.bin_width_ps / 2) / h.bin_width_ps));
  w_bins = std::min(w_bins, h.n_bins());

  // sliding window sums over every bin offset
  std::vector<double> sums(h.n_bins() - w_bins + 1);
  double s = 0.0;
  for (size_t i = 0; i < w_bins; ++i) s += static_cast<double>(h.counts[i]);
  sums[0] = s;
  for (size_t i = 1; i < sums.size(); ++i) {
    s += static_cast<double>(h.counts[i + w_bins - 1]) - static_cast<double>(h.counts[i - 1]);
    sums[i] = s;
  }

  const double max_sum = *std::max_element(sums.begin(), sums.end());
  std::vector<double> tmp = sums;
  std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
  const double median = tmp[tmp.size() / 2];

  // The best window must stand out of the typical (median) window beyond
  // what a flat Poisson floor produces across this many window positions:
  // Chernoff bound P(Poisson(median) >= max) <= exp(k ln(m/k) + k - m),
  // tested against 1e-6 / n_positions.
  bool significant = false;
  if (median == 0.0) {
    significant = max_sum > 0.0;
  } else if (max_sum > median) {
    const double log_tail =
        max_sum * std::log(median / max_sum) + max_sum - median;
    significant = log_tail <= std::log(1e-6 / static_cast<double>(sums.size()));
  }
  if (!significant)
    throw std::invalid_argument("find_main_peak: no significant peak above the accidental floor");

  // narrow peaks tie many window positions at the maximum; center on the run
  std::vector<size_t> tied;
  for (size_t i = 0; i < sums.size(); ++i)
    if (sums[i] == max_sum) tied.push_back(i);
  const size_t start = tied[tied.size() / 2];
  const double center =
      -static_cast<double>(h.range_ps) +
      (static_cast<double>(start) + static_cast<double>(w_bins) / 2.0) *
          static_cast<double>(h.bin_width_ps);
  return static_cast<int64_t>(std::llround(center));
}

CarResult car_estimate(const CoincidenceHistogram& h, int64_t window_ps,
                       int64_t pulse_period_ps, int peaks_per_side) {
  if (h.counts.empty()) throw std::invalid_argument("car_estimate: empty histogram");
  if (peaks_per_side < 1)
    throw std::invalid_argument("car_estimate: need at least one accidental peak per side");
  const int64_t needed =
      static_cast<int64_t>(peaks_per_side) * pulse_period_ps + window_ps / 2 + h.bin_width_ps;
  if (h.range_ps < needed)
    throw std::invalid_argument(
        "car_estimate: histogram range too small for the requested accidental peaks");

  // no distinguishable peak (flat accidental floor) still has a defined CAR
  // of ~1; count around dt = 0 in that case
  int64_t center = 0;
  try {
    center = find_main_peak(h, pulse_period_ps, window_ps);
  } catch (const std::invalid_argument&) {
    if (h.total() == 0) throw;
    center = h.center_offset_ps;
  }
  if (std::llabs(center) + needed > h.range_ps)
    throw std::invalid_argument(
        "car_estimate: main peak too far off-center for the requested accidental peaks");

  const double c_counts = window_sum(h, static_cast<double>(center), window_ps);
  double acc_total = 0.0;
  const int n_windows = 2 * peaks_per_side;
  for (int k = 1; k <= peaks_per_side; ++k) {
    acc_total += window_sum(h, static_cast<double>(center + k * pulse_period_ps), window_ps);
    acc_total += window_sum(h, static_cast<double>(center - k * pulse_period_ps), window_ps);
  }
  const double a_mean = acc_total / static_cast<double>(n_windows);

  CarResult r;
  r.coincidences = c_counts;
  r.accidental_mean = a_mean;
  r.window_ps = window_ps;
  r.peaks_used = n_windows;
  r.center_offset_ps = center;
  if (a_mean <= 0.0) {
    r.car = c_counts > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.sigma_car = std::numeric_limits<double>::infinity();
    return r;
  }
  r.car = c_counts / a_mean;
  // Poisson on C plus Poisson on each accidental window
  r.sigma_car = std::sqrt(c_counts + c_counts * c_counts /
                                         (a_mean * static_cast<double>(n_windows))) /
                a_mean;
  return r;
}

double car_predict(double mu, double eta1, double eta2, double n1_per_window,
                   double n2_per_window) {
  if (!(mu > 0.0) || !(eta1 >= 0.0) || !(eta2 >= 0.0) || !(n1_per_window >= 0.0) ||
      !(n2_per_window >= 0.0))
    throw std::invalid_argument("car_predict: mu must be > 0 and the rest >= 0");
  const double d1 = mu * eta1 + n1_per_window;
  const double d2 = mu * eta2 + n2_per_window;
  if (d1 <= 0.0 || d2 <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + mu * eta1 * eta2 / (d1 * d2);
}

FitResult linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> sigma) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n)
    throw std::invalid_argument("linear_fit: need at least two (x, y) points");
  const bool weighted = !sigma.empty();
  if (weighted && sigma.size() != n)
    throw std::invalid_argument("linear_fit: sigma size mismatch");

  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (weighted) {
      if (!(sigma[i] > 0.0))
        throw std::invalid_argument("linear_fit: sigmas must be > 0");
      w = 1.0 / (sigma[i] * sigma[i]);
    }
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const double delta = sw * swxx - swx * swx;
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("linear_fit: degenerate x values");

  FitResult r;
  r.slope = (sw * swxy - swx * swy) / delta;
  r.intercept = (swxx * swy - swx * swxy) / delta;

  double ssr = 0.0, sst = 0.0;
  const double ybar = swy / sw;
  for (size_t i = 0; i < n; ++i) {
    const double w = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
    const double res = y[i] - (r.slope * x[i] + r.intercept);
    ssr += w * res * res;
    sst += w * (y[i] - ybar) * (y[i] - ybar);
  }
  r.r_squared = sst > 0.0 ? std::max(0.0, 1.0 - ssr / sst) : 1.0;

  if (weighted) {
    r.slope_sigma = std::sqrt(sw / delta);
  } else {
    const double resvar = n > 2 ? ssr / static_cast<double>(n - 2) : 0.0;
    r.slope_sigma = std::sqrt(resvar * sw / delta);
  }
  return r;
}

DriftStats drift_stats(const OffsetSeries& series, double bin_s) {
  const size_t n = series.offsets_ps.size();
  if (n == 0) throw std::invalid_argument("drift_stats: empty series");
  if (!(bin_s > 0.0)) throw std::invalid_argument("drift_stats: bin must be > 0");

  size_t per_bin = static_cast<size_t>(bin_s / series.sample_period_s);
  if (per_bin == 0) per_bin = 1;

  DriftStats st;
  st.bin_s = bin_s;
  for (size_t start = 0; start < n; start += per_bin) {
    const size_t end = std::min(n, start + per_bin);
    double mean = 0.0;
    for (size_t i = start; i < end; ++i) mean += series.offsets_ps[i];
    mean /= static_cast<double>(end - start);
    double var = 0.0;
    for (size_t i = start; i < end; ++i) {
      const double d = series.offsets_ps[i] - mean;
      var += d * d;
    }
    st.bin_mean_ps.push_back(mean);
    st.bin_rms_ps.push_back(std::sqrt(var / static_cast<double>(end - start)));
  }

  double mean_all = 0.0;
  for (const double v : series.offsets_ps) mean_all += v;
  mean_all /= static_cast<double>(n);
  double var_all = 0.0;
  for (const double v : series.offsets_ps) var_all += (v - mean_all) * (v - mean_all);
  st.overall_sigma_ps = n > 1 ? std::sqrt(var_all / static_cast<double>(n - 1)) : 0.0;

  const auto [lo, hi] = std::minmax_element(st.bin_mean_ps.begin(), st.bin_mean_ps.end());
  st.ptp_of_means_ps = *hi - *lo;
  return st;
}

RamanCoefficient fit_raman_beta(const std::vector<RamanSweepPoint>& points,
                                RamanContext ctx, double length_km,
                                Attenuation alpha_quantum, Attenuation alpha_pump,
                                Wavelength quantum) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_raman_beta: need at least two sweep points");
  const double e_photon = photon_energy_j(quantum);

  std::vector<double> x, y, s;
  bool weighted = true;
  for (const auto& p : points) {
    x.push_back(p.p0_w);
    y.push_back(p.rate_hz * e_photon);
    if (p.rate_sigma_hz > 0.0)
      s.push_back(p.rate_sigma_hz * e_photon);
    else
      weighted = false;
  }
  const FitResult fit =
      weighted ? linear_fit(x, y, s) : linear_fit(x, y);
  const double slope = std::max(0.0, fit.slope);
  return beta_from_slope(slope, ctx, length_km, alpha_quantum, alpha_pump, fit.slope_sigma);
}

}  // namespace qclink
