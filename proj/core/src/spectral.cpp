#include "pulsekit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "pulsekit/error.hpp"
#include "pulsekit/fft.hpp"
#include "pulsekit/parallel.hpp"

namespace pulsekit {

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

std::size_t zero_padded_length(double fs, double resolution_hz, std::size_t window) {
  if (!(resolution_hz > 0.0)) fail(Errc::InvalidArgument, "frequency resolution must be > 0");
  const auto needed = static_cast<std::size_t>(std::ceil(fs / resolution_hz - 1e-9));
  return next_pow2(std::max(window, needed));
}

SpectralPeak spectral_peak(std::span<const double> x, double fs, double low_hz, double high_hz,
                           std::size_t nfft, double min_peak_fraction) {
  if (x.empty()) fail(Errc::TooShort, "empty analysis window");
  if (!(low_hz < high_hz) || high_hz > fs / 2.0)
    fail(Errc::InvalidBand, "search band must satisfy low < high <= fs/2");

  const auto w = hann_window(x.size());
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(x.size());
  std::vector<double> buf(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = (x[i] - mu) * w[i];

  const auto spec = rfft(buf, nfft);
  const double df = fs / static_cast<double>(nfft);
  auto k_lo = static_cast<std::size_t>(std::ceil(low_hz / df - 1e-9));
  auto k_hi = static_cast<std::size_t>(std::floor(high_hz / df + 1e-9));
  k_hi = std::min(k_hi, spec.size() - 1);
  k_lo = std::max<std::size_t>(k_lo, 1);
  if (k_lo > k_hi) fail(Errc::InvalidBand, "search band contains no frequency bins");

  std::size_t best = k_lo;
  double best_mag = std::abs(spec[k_lo]);
  for (std::size_t k = k_lo + 1; k <= k_hi; ++k) {
    const double m = std::abs(spec[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }

  double global = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) global = std::max(global, std::abs(spec[k]));

  const double left = std::abs(spec[best - 1]);
  const double right = best + 1 < spec.size() ? std::abs(spec[best + 1]) : 0.0;
  SpectralPeak peak;
  peak.frequency_hz = static_cast<double>(best) * df;
  peak.magnitude = best_mag;
  peak.dominant = best_mag > 0.0 && best_mag >= left && best_mag >= right &&
                  best_mag >= min_peak_fraction * global;
  return peak;
}

RateSeries estimate_rate_series(const TimeSeries& ts, const RateEstimatorConfig& cfg) {
  const double fs = ts.fs();
  if (!(cfg.window_s > 0.0) || !(cfg.hop_s > 0.0))
    fail(Errc::InvalidArgument, "window and hop must be > 0");
  const auto width = static_cast<std::size_t>(std::llround(cfg.window_s * fs));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.hop_s * fs)));
  if (width < 2 || ts.size() < width)
    fail(Errc::TooShort, "signal is shorter than one analysis window");

  const auto windows = sliding_windows(ts.size(), width, hop);
  const std::size_t nfft = zero_padded_length(fs, cfg.resolution_hz, width);

  RateSeries out;
  out.window_s = static_cast<double>(width) / fs;
  out.hop_s = static_cast<double>(hop) / fs;
  out.centers.resize(windows.size());
  out.rate.resize(windows.size());
  out.valid.resize(windows.size());

  const auto x = ts.samples();
  parallel_for(windows.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& win = windows[i];
      const auto peak = spectral_peak(x.subspan(win.start_index, win.length), fs, cfg.band_low_hz,
                                      cfg.band_high_hz, nfft, cfg.min_peak_fraction);
      out.centers[i] =
          ts.t0() + (static_cast<double>(win.start_index) + 0.5 * static_cast<double>(width - 1)) / fs;
      out.rate[i] = 60.0 * peak.frequency_hz;
      out.valid[i] = peak.dominant ? 1 : 0;
    }
  });
  return out;
}

std::vector<double> hilbert_envelope(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) fail(Errc::TooShort, "envelope of an empty signal");
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  auto spec = fft(buf);
  // Analytic-signal weights: keep DC (and Nyquist for even n), double the
  // positive frequencies, zero the negative ones.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) {
      spec[k] *= 2.0;
    } else if (!(n % 2 == 0 && k == half)) {
      spec[k] = 0.0;
    }
  }
  const auto analytic = ifft(spec);
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
  return env;
}

TimeSeries hilbert_envelope(const TimeSeries& ts) {
  return TimeSeries(hilbert_envelope(ts.samples()), ts.fs(), ts.t0());
}

double band_snr(const TimeSeries& ts, double low_hz, double high_hz) {
  if (ts.duration() + 1.0 / ts.fs() < 10.0 - 1e-9)
    fail(Errc::TooShort, "band SNR needs at least 10 s of signal");
  if (!(low_hz < high_hz)) fail(Errc::InvalidBand, "band low edge must be below the high edge");

  const auto x = ts.samples();
  const std::size_t n = x.size();
  const auto w = hann_window(n);
  const double mu = mean(x);
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = (x[i] - mu) * w[i];
  const auto spec = rfft(buf, n);

  double in = 0.0;
  double out = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * ts.fs() / static_cast<double>(n);
    const double p = std::norm(spec[k]);
    if (f >= low_hz && f <= high_hz) {
      in += p;
    } else {
      out += p;
    }
  }
  if (out == 0.0) return in > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return in / out;
}

}  // namespace pulsekit
