#pragma once

#include <vector>

#include "pulsekit/signal.hpp"
#include "pulsekit/spectral.hpp"

namespace pulsekit {

/// Reference pulse-rate profile (bpm over time) from a fingertip oximeter.
class GuideRate {
 public:
  GuideRate(std::vector<double> t, std::vector<double> bpm);

  const std::vector<double>& t() const noexcept { return t_; }
  const std::vector<double>& bpm() const noexcept { return bpm_; }

  /// Nearest-sample lookup; ties go to the earlier sample.
  double at(double time) const;
  /// True when `time` lies within one guide sample period of the profile.
  bool covers(double time) const;

 private:
  std::vector<double> t_;
  std::vector<double> bpm_;
  double step_ = 0.0;
};

struct FusionConfig {
  double window_s = 10.0;
  /// Window stride in samples.
  std::size_t stride = 1;
  /// Passband half-width around the guide rate.
  double delta_bpm = 30.0;
  /// Lowpass-prototype order of the per-window bandpass.
  int filter_order = 2;
  /// Envelope floor as a fraction of max |combined waveform|.
  double envelope_epsilon = 1e-6;
  /// Guide rates are rounded to this step before filter design (0 = exact).
  double rate_quantum_bpm = 1.0;
};

/// Sliding-window consensus of contact PPG channels. For each window the
/// channel segments are z-normalised, bandpassed around the guide rate at
/// the window centre and summed; the centre sample of each window forms the
/// combined waveform, which is finally divided by its Hilbert envelope.
///
/// The output holds one sample per window, starting at the first window's
/// centre time, at fs / stride. Channels must share rate, length and start.
/// Errors: GuideGap, AllChannelsDead, TooShort.
TimeSeries fuse(const ChannelSet& channels, const GuideRate& guide, const FusionConfig& cfg = {});

/// Literal per-window evaluation of `fuse` (O(N * window) per channel).
/// Used to check the fast path; agrees to the decay of the filter transient
/// across half a window.
TimeSeries fuse_reference(const ChannelSet& channels, const GuideRate& guide,
                          const FusionConfig& cfg = {});

HrSeries fused_hr(const ChannelSet& channels, const GuideRate& guide, const FusionConfig& cfg = {},
                  const RateEstimatorConfig& rate_cfg = pulse_rate_config());

}  // namespace pulsekit
