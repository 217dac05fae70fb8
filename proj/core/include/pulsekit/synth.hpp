#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pulsekit/fusion.hpp"
#include "pulsekit/respiration.hpp"
#include "pulsekit/signal.hpp"
#include "pulsekit/spectral.hpp"

namespace pulsekit {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, index), so any subset of samples can be generated in any
/// order or on any thread.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream);
  std::uint64_t bits(std::uint64_t index) const noexcept;
  /// Uniform in (0, 1).
  double uniform(std::uint64_t index) const noexcept;
  /// Standard normal (Box-Muller over two counter draws).
  double normal(std::uint64_t index) const noexcept;

 private:
  std::uint64_t key_;
};

/// Piecewise-linear rate in events per minute, held constant outside the
/// knots.
class RateProfile {
 public:
  RateProfile(std::vector<double> t, std::vector<double> rate);
  static RateProfile constant(double rate);
  /// Linear sweep from r0 at t=0 to r1 at t=duration.
  static RateProfile linear(double r0, double r1, double duration_s);

  double rate_at(double t) const;
  /// Cycles elapsed since t=0 (exact integral of rate/60).
  double cycles(double t) const;
  /// Mean rate over [a, b].
  double mean_rate(double a, double b) const;

 private:
  std::vector<double> t_;
  std::vector<double> rate_;
  std::vector<double> cum_;  // cycles at each knot
};

struct Burst {
  double start_s = 0.0;
  double duration_s = 0.0;
  double sigma = 0.0;
};

struct NoiseModel {
  double white_sigma = 0.0;
  std::vector<Burst> bursts;
  /// Slow baseline wander below 0.1 Hz.
  double wander_amplitude = 0.0;
  double wander_hz = 0.05;
};

struct SiteSpec {
  std::string name;
  double transit_ms = 0.0;
  NoiseModel noise;
  double amplitude = 1.0;
};

struct SubjectSpec {
  RateProfile hr = RateProfile::constant(72.0);
  RateProfile resp = RateProfile::constant(15.0);
  std::vector<SiteSpec> sites;
  std::uint64_t seed = 0;
  double duration_s = 60.0;
  double contact_fs = 400.0;
  double video_fs = 90.0;
  double guide_fs = 60.0;
  double motion_fs = 30.0;
  /// Respiratory amplitude modulation depth of the pulse.
  double resp_am_depth = 0.0;
  /// Respiration-synchronous baseline shift added to contact channels.
  double resp_baseline = 0.0;
  /// Guide rate = true rate + uniform jitter in [-j, j].
  double guide_jitter_bpm = 0.0;
  /// Harmonic amplitudes of the pulse template.
  std::array<double, 3> harmonics{1.0, 0.4, 0.2};
  double truth_window_s = 10.0;
  double truth_hop_s = 1.0;
};

/// Pulse template at a phase in cycles, scaled to unit RMS over a period
/// divided by sqrt(2) (same RMS as a unit sine).
double pulse_shape(double cycles, const std::array<double, 3>& harmonics);

/// Per-window mean rate of `profile` using the same window geometry as the
/// spectral estimator at `fs`.
RateSeries windowed_truth(const RateProfile& profile, double duration_s, double fs,
                          double window_s, double hop_s);

struct ContactSubject {
  ChannelSet channels;
  GuideRate guide;
  HrSeries truth;
};

ContactSubject gen_contact_channels(const SubjectSpec& spec);

/// The clean, noise-free waveform of a site (pulse with transit and
/// respiratory modulation) sampled at fs.
TimeSeries clean_site_waveform(const SubjectSpec& spec, const SiteSpec& site, double fs);

struct AttackSpec {
  double freq_bpm = 120.0;
  double onset_s = 0.0;
  double duration_s = 0.0;
  /// Modulation amplitude relative to the baseline colour, ramped linearly
  /// from start to end across the attack.
  double amplitude_start = 0.0;
  double amplitude_end = 0.0;
};

struct RgbOptions {
  /// Relative pulse amplitude in (0, 0.05].
  double pulse_strength = 0.005;
  std::optional<AttackSpec> attack;
  /// Per-channel white noise at this SNR (dB) relative to the pulse RMS.
  std::optional<double> noise_snr_db;
  /// Equal relative modulation of all channels.
  double flicker_amplitude = 0.0;
  double flicker_hz = 0.3;
  std::array<double, 3> baseline{180.0, 120.0, 100.0};
};

/// Skin-colour trace of one site at the video rate.
RgbTrace gen_rgb_trace(const SubjectSpec& spec, const SiteSpec& site, const RgbOptions& opts = {});

struct MotionSpec {
  std::vector<std::size_t> signal_columns{34, 44, 45, 54, 55};
  double amplitude = 1.0;
  double noise_sigma = 0.1;
};

struct MotionSubject {
  MotionMatrix matrix;
  RateSeries truth;
};

/// Breathing motion in the signal columns following spec.resp, with white
/// noise in every column. Truth uses 30 s windows at 1 s hop.
MotionSubject gen_motion_matrix(const SubjectSpec& spec, const MotionSpec& motion = {});

}  // namespace pulsekit
