#pragma once

#include "pulsekit/filter.hpp"
#include "pulsekit/signal.hpp"

namespace pulsekit {

enum class RppgMethod { Chrom, Pos };

struct RppgConfig {
  RppgMethod method = RppgMethod::Pos;
  /// Projection window length in seconds.
  double window_s = 1.6;
  /// Zero-phase post-filter, 40-180 bpm with a 4th-order prototype.
  BandpassSpec bandpass = BandpassSpec::from_bpm(40.0, 180.0, 4);
  bool apply_bandpass = true;
};

/// Chrominance projection: per 50%-overlapping window, channels are divided
/// by their window means, X = 3R - 2G, Y = 1.5R + G - 1.5B,
/// S = X - (sd X / sd Y) Y, and the mean-removed S is Hann-weighted and
/// overlap-added. Throws DegenerateWindow on a zero channel mean or sd(Y) = 0.
TimeSeries chrom(const RgbTrace& trace, const RppgConfig& cfg = {});

/// Plane-orthogonal-to-skin projection with a stride-1 sliding window:
/// S1 = G - B, S2 = G + B - 2R on mean-normalised channels,
/// h = S1 + (sd S1 / sd S2) S2, mean-removed h accumulated in place.
TimeSeries pos(const RgbTrace& trace, const RppgConfig& cfg = {});

/// Dispatches on cfg.method.
TimeSeries extract_pulse(const RgbTrace& trace, const RppgConfig& cfg);

}  // namespace pulsekit
