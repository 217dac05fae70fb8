#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pulsekit/signal.hpp"

namespace pulsekit {

/// Butterworth bandpass request. `order` is the order of the lowpass
/// prototype, so the digital filter has order 2*order.
struct BandpassSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
  int order = 1;

  static BandpassSpec from_bpm(double low_bpm, double high_bpm, int order) {
    return {low_bpm / 60.0, high_bpm / 60.0, order};
  }
};

/// Second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct SosFilter {
  std::vector<Biquad> sections;

  int order() const noexcept { return 2 * static_cast<int>(sections.size()); }
};

/// Digital Butterworth bandpass: analog prototype, lowpass-to-bandpass
/// transform on pre-warped edges, bilinear transform. Throws InvalidBand
/// unless 0 < low < high < fs/2.
SosFilter butterworth_bandpass(const BandpassSpec& spec, double fs);

/// H(e^{j 2 pi f / fs}).
std::complex<double> frequency_response(const SosFilter& filter, double f_hz, double fs);

/// Causal cascade, optionally seeded with per-section state (2 values each).
std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x,
                            std::span<const double> initial_state = {});

/// Steady-state section state for a unit step input.
std::vector<double> sosfilt_zi(const SosFilter& filter);

/// Forward-backward application. Odd reflection padding of 3*order samples
/// at both ends, each pass seeded with the steady state of its first sample.
/// Throws SignalTooShort when the input is not longer than the padding.
std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x);
TimeSeries filtfilt(const SosFilter& filter, const TimeSeries& ts);

/// Convenience: design at ts.fs() and apply forward-backward.
TimeSeries bandpass(const TimeSeries& ts, const BandpassSpec& spec);

}  // namespace pulsekit
