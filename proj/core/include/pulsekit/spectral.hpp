#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pulsekit/signal.hpp"

namespace pulsekit {

/// Per-window rate estimates. `rate` is in events per minute (bpm or
/// breaths/min); `valid` is 0 where the window had no dominant in-band peak.
struct RateSeries {
  std::vector<double> centers;
  std::vector<double> rate;
  std::vector<std::uint8_t> valid;
  double window_s = 0.0;
  double hop_s = 0.0;

  std::size_t size() const noexcept { return rate.size(); }
};

using HrSeries = RateSeries;

struct RateEstimatorConfig {
  double window_s = 10.0;
  double hop_s = 1.0;
  double band_low_hz = 0.66;
  double band_high_hz = 3.0;
  /// Upper bound on the zero-padded frequency grid spacing.
  double resolution_hz = 0.001;
  /// A window is valid when its in-band peak is a local maximum holding at
  /// least this fraction of the largest non-DC spectral magnitude.
  double min_peak_fraction = 0.1;
};

/// Pulse-band defaults: 10 s Hann windows, 1 s hop, 0.66-3 Hz.
inline RateEstimatorConfig pulse_rate_config(double window_s = 10.0, double hop_s = 1.0) {
  return {window_s, hop_s, 0.66, 3.0, 0.001, 0.1};
}

/// Respiration defaults: 30 s windows, 1 s hop, 6-30 breaths/min.
inline RateEstimatorConfig resp_rate_config(double window_s = 30.0, double hop_s = 1.0) {
  return {window_s, hop_s, 6.0 / 60.0, 30.0 / 60.0, 0.001, 0.1};
}

/// FFT length used for a given rate and grid bound: the smallest power of
/// two >= max(window, fs / resolution).
std::size_t zero_padded_length(double fs, double resolution_hz, std::size_t window);

struct SpectralPeak {
  double frequency_hz = 0.0;
  double magnitude = 0.0;
  bool dominant = false;
};

/// Hann-windowed, mean-removed, zero-padded magnitude spectrum peak inside
/// [low, high]. Exact ties resolve to the lowest frequency.
SpectralPeak spectral_peak(std::span<const double> x, double fs, double low_hz, double high_hz,
                           std::size_t nfft, double min_peak_fraction = 0.1);

/// Short-time spectral peak tracking; throws TooShort when the signal is
/// shorter than one window.
RateSeries estimate_rate_series(const TimeSeries& ts, const RateEstimatorConfig& cfg);

inline HrSeries estimate_hr_series(const TimeSeries& ts, double window_s = 10.0,
                                   double hop_s = 1.0) {
  return estimate_rate_series(ts, pulse_rate_config(window_s, hop_s));
}

/// |analytic signal| computed with a full-length FFT.
std::vector<double> hilbert_envelope(std::span<const double> x);
TimeSeries hilbert_envelope(const TimeSeries& ts);

/// In-band over out-of-band power of the Hann-windowed periodogram of the
/// mean-removed signal; the DC bin is excluded from both sums. Needs at
/// least 10 s of data.
double band_snr(const TimeSeries& ts, double low_hz, double high_hz);

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

}  // namespace pulsekit
