#include "pulsekit/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pulsekit/error.hpp"
#include "pulsekit/filter.hpp"
#include "pulsekit/parallel.hpp"

namespace pulsekit {

GuideRate::GuideRate(std::vector<double> t, std::vector<double> bpm)
    : t_(std::move(t)), bpm_(std::move(bpm)) {
  if (t_.empty() || t_.size() != bpm_.size())
    fail(Errc::InvalidArgument, "guide rate needs matching, non-empty time and bpm columns");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(bpm_[i]))
      fail(Errc::NonFiniteSample, "guide rate contains NaN/Inf");
    if (bpm_[i] < 30.0 || bpm_[i] > 220.0)
      fail(Errc::InvalidArgument, "guide rate outside [30, 220] bpm");
    if (i > 0 && !(t_[i] > t_[i - 1]))
      fail(Errc::InvalidArgument, "guide time column must be strictly increasing");
  }
  if (t_.size() > 1) {
    std::vector<double> dt(t_.size() - 1);
    for (std::size_t i = 1; i < t_.size(); ++i) dt[i - 1] = t_[i] - t_[i - 1];
    std::nth_element(dt.begin(), dt.begin() + dt.size() / 2, dt.end());
    step_ = dt[dt.size() / 2];
  }
}

double GuideRate::at(double time) const {
  auto it = std::lower_bound(t_.begin(), t_.end(), time);
  if (it == t_.begin()) return bpm_.front();
  if (it == t_.end()) return bpm_.back();
  const auto hi = static_cast<std::size_t>(it - t_.begin());
  const auto lo = hi - 1;
  return (time - t_[lo] <= t_[hi] - time) ? bpm_[lo] : bpm_[hi];
}

bool GuideRate::covers(double time) const {
  const double tol = step_ + 1e-9;
  return time >= t_.front() - tol && time <= t_.back() + tol;
}

namespace {

struct Layout {
  double fs = 0.0;
  double t0 = 0.0;
  std::size_t n = 0;
  std::size_t width = 0;
  std::size_t half = 0;
  std::size_t count = 0;
  std::vector<const TimeSeries*> channels;
  std::vector<double> rates;  // quantised guide rate per window
};

Layout plan(const ChannelSet& channels, const GuideRate& guide, const FusionConfig& cfg) {
  if (channels.empty()) fail(Errc::InvalidArgument, "fusion needs at least one channel");
  if (cfg.stride == 0) fail(Errc::InvalidArgument, "stride must be >= 1");
  if (!(cfg.delta_bpm > 0.0)) fail(Errc::InvalidArgument, "delta_bpm must be > 0");
  if (!(cfg.envelope_epsilon > 0.0)) fail(Errc::InvalidArgument, "envelope_epsilon must be > 0");

  Layout lay;
  lay.fs = channels.common_fs();
  const auto& first = channels.begin()->second;
  lay.n = first.size();
  lay.t0 = first.t0();
  for (const auto& [name, ts] : channels) {
    if (ts.size() != lay.n || std::abs(ts.t0() - lay.t0) > 0.5 / lay.fs)
      fail(Errc::InvalidArgument, "channel '" + name + "' is not aligned with the others");
    lay.channels.push_back(&ts);
  }

  lay.width = static_cast<std::size_t>(std::llround(cfg.window_s * lay.fs));
  if (lay.width < 2 || lay.width > lay.n)
    fail(Errc::TooShort, "recording is shorter than one fusion window");
  lay.half = lay.width / 2;
  lay.count = (lay.n - lay.width) / cfg.stride + 1;

  lay.rates.resize(lay.count);
  for (std::size_t j = 0; j < lay.count; ++j) {
    const double tc = lay.t0 + static_cast<double>(j * cfg.stride + lay.half) / lay.fs;
    if (!guide.covers(tc)) fail(Errc::GuideGap, "guide rate does not cover t=" + std::to_string(tc));
    double y = guide.at(tc);
    if (cfg.rate_quantum_bpm > 0.0) y = std::round(y / cfg.rate_quantum_bpm) * cfg.rate_quantum_bpm;
    lay.rates[j] = y;
  }
  return lay;
}

BandpassSpec band_for(double rate_bpm, const FusionConfig& cfg, double fs) {
  const double lo = std::max((rate_bpm - cfg.delta_bpm) / 60.0, 0.1);
  const double hi = std::min((rate_bpm + cfg.delta_bpm) / 60.0, 0.99 * fs / 2.0);
  return {lo, hi, cfg.filter_order};
}

TimeSeries normalise_by_envelope(std::vector<double> combined, const Layout& lay,
                                 const FusionConfig& cfg) {
  double peak = 0.0;
  for (double v : combined) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) fail(Errc::AllChannelsDead, "combined waveform is identically zero");
  const auto env = hilbert_envelope(combined);
  const double floor = cfg.envelope_epsilon * peak;
  for (std::size_t i = 0; i < combined.size(); ++i) combined[i] /= std::max(env[i], floor);
  const double out_fs = lay.fs / static_cast<double>(cfg.stride);
  return TimeSeries(std::move(combined), out_fs, lay.t0 + static_cast<double>(lay.half) / lay.fs);
}

[[noreturn]] void all_dead(std::size_t window) {
  fail(Errc::AllChannelsDead, "every channel is flat in fusion window " + std::to_string(window));
}

}  // namespace

TimeSeries fuse(const ChannelSet& channels, const GuideRate& guide, const FusionConfig& cfg) {
  const Layout lay = plan(channels, guide, cfg);
  const std::size_t nch = lay.channels.size();
  const std::size_t w = lay.width;

  // Per-window, per-channel deviation from prefix sums of the centred signal.
  std::vector<std::vector<double>> inv_sd(nch, std::vector<double>(lay.count));
  std::vector<std::vector<double>> centred(nch);
  parallel_for(nch, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto x = lay.channels[c]->samples();
      const double mu = mean(x);
      double global_var = 0.0;
      centred[c].resize(lay.n);
      for (std::size_t i = 0; i < lay.n; ++i) {
        centred[c][i] = x[i] - mu;
        global_var += centred[c][i] * centred[c][i];
      }
      global_var /= static_cast<double>(lay.n);
      std::vector<long double> s1(lay.n + 1, 0.0L), s2(lay.n + 1, 0.0L);
      for (std::size_t i = 0; i < lay.n; ++i) {
        s1[i + 1] = s1[i] + centred[c][i];
        s2[i + 1] = s2[i] + static_cast<long double>(centred[c][i]) * centred[c][i];
      }
      const long double wl = static_cast<long double>(w);
      for (std::size_t j = 0; j < lay.count; ++j) {
        const std::size_t s = j * cfg.stride;
        const long double m = (s1[s + w] - s1[s]) / wl;
        const double var = static_cast<double>((s2[s + w] - s2[s]) / wl - m * m);
        inv_sd[c][j] = var > 1e-10 * global_var && var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
      }
    }
  });

  std::map<double, std::vector<std::size_t>> by_rate;
  for (std::size_t j = 0; j < lay.count; ++j) by_rate[lay.rates[j]].push_back(j);

  struct Task {
    double rate;
    const std::vector<std::size_t>* windows;
    std::size_t channel;
  };
  std::vector<Task> tasks;
  for (const auto& [rate, windows] : by_rate)
    for (std::size_t c = 0; c < nch; ++c) tasks.push_back({rate, &windows, c});

  // One filtfilt per (rate, channel) over the span of that rate's windows;
  // each window reads its centre sample.
  std::vector<std::vector<double>> contrib(nch, std::vector<double>(lay.count, 0.0));
  parallel_for(tasks.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto& task = tasks[k];
      const auto& windows = *task.windows;
      const auto filter = butterworth_bandpass(band_for(task.rate, cfg, lay.fs), lay.fs);
      const std::size_t a = windows.front() * cfg.stride;
      const std::size_t b = windows.back() * cfg.stride + w;
      const std::span<const double> seg(centred[task.channel].data() + a, b - a);
      const auto y = filtfilt(filter, seg);
      for (std::size_t j : windows)
        contrib[task.channel][j] = y[j * cfg.stride + lay.half - a] * inv_sd[task.channel][j];
    }
  });

  std::vector<double> combined(lay.count, 0.0);
  for (std::size_t j = 0; j < lay.count; ++j) {
    bool alive = false;
    for (std::size_t c = 0; c < nch; ++c) {
      combined[j] += contrib[c][j];
      alive = alive || inv_sd[c][j] > 0.0;
    }
    if (!alive) all_dead(j);
  }
  return normalise_by_envelope(std::move(combined), lay, cfg);
}

TimeSeries fuse_reference(const ChannelSet& channels, const GuideRate& guide,
                          const FusionConfig& cfg) {
  const Layout lay = plan(channels, guide, cfg);
  std::vector<double> combined(lay.count, 0.0);
  std::vector<double> z(lay.width);
  for (std::size_t j = 0; j < lay.count; ++j) {
    const auto filter = butterworth_bandpass(band_for(lay.rates[j], cfg, lay.fs), lay.fs);
    const std::size_t s = j * cfg.stride;
    bool alive = false;
    for (const TimeSeries* ts : lay.channels) {
      const auto seg = ts->samples().subspan(s, lay.width);
      const double mu = mean(seg);
      const double sd = stddev(seg);
      if (!(sd > 0.0)) continue;
      alive = true;
      for (std::size_t i = 0; i < lay.width; ++i) z[i] = (seg[i] - mu) / sd;
      combined[j] += filtfilt(filter, z)[lay.half];
    }
    if (!alive) all_dead(j);
  }
  return normalise_by_envelope(std::move(combined), lay, cfg);
}

HrSeries fused_hr(const ChannelSet& channels, const GuideRate& guide, const FusionConfig& cfg,
                  const RateEstimatorConfig& rate_cfg) {
  return estimate_rate_series(fuse(channels, guide, cfg), rate_cfg);
}

}  // namespace pulsekit
