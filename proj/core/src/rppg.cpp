#include "pulsekit/rppg.hpp"

#include <cmath>

#include "pulsekit/error.hpp"
#include "pulsekit/spectral.hpp"

namespace pulsekit {

namespace {

std::size_t window_frames(const RgbTrace& trace, const RppgConfig& cfg) {
  const auto frames = static_cast<std::size_t>(std::llround(cfg.window_s * trace.fs()));
  if (frames < 8) fail(Errc::InvalidArgument, "projection window must span at least 8 frames");
  if (trace.size() < frames) fail(Errc::TooShort, "trace is shorter than one projection window");
  return frames;
}

struct NormalisedWindow {
  std::vector<double> r, g, b;
};

NormalisedWindow normalise(const RgbTrace& trace, std::size_t start, std::size_t len) {
  NormalisedWindow w;
  auto take = [&](std::span<const double> c, std::vector<double>& out, const char* name) {
    const auto seg = c.subspan(start, len);
    const double mu = mean(seg);
    if (mu == 0.0)
      fail(Errc::DegenerateWindow, std::string(name) + " channel has zero mean in a window");
    out.resize(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = seg[i] / mu;
  };
  take(trace.r(), w.r, "red");
  take(trace.g(), w.g, "green");
  take(trace.b(), w.b, "blue");
  return w;
}

TimeSeries finish(std::vector<double> pulse, const RgbTrace& trace, const RppgConfig& cfg) {
  TimeSeries out(std::move(pulse), trace.fs(), trace.t0());
  if (!cfg.apply_bandpass) return out;
  return bandpass(out, cfg.bandpass);
}

}  // namespace

TimeSeries chrom(const RgbTrace& trace, const RppgConfig& cfg) {
  const std::size_t len = window_frames(trace, cfg);
  const std::size_t hop = std::max<std::size_t>(1, len / 2);
  const std::size_t n = trace.size();
  const auto hann = hann_window(len);

  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + len <= n; s += hop) starts.push_back(s);
  if (starts.back() + len < n) starts.push_back(n - len);

  std::vector<double> acc(n, 0.0);
  std::vector<double> xs(len), ys(len), s(len);
  for (std::size_t start : starts) {
    const auto w = normalise(trace, start, len);
    for (std::size_t i = 0; i < len; ++i) {
      xs[i] = 3.0 * w.r[i] - 2.0 * w.g[i];
      ys[i] = 1.5 * w.r[i] + w.g[i] - 1.5 * w.b[i];
    }
    const double sy = stddev(ys);
    if (!(sy > 0.0)) fail(Errc::DegenerateWindow, "chrominance Y has zero deviation in a window");
    const double alpha = stddev(xs) / sy;
    for (std::size_t i = 0; i < len; ++i) s[i] = xs[i] - alpha * ys[i];
    const double mu = mean(s);
    for (std::size_t i = 0; i < len; ++i) acc[start + i] += (s[i] - mu) * hann[i];
  }
  return finish(std::move(acc), trace, cfg);
}

TimeSeries pos(const RgbTrace& trace, const RppgConfig& cfg) {
  const std::size_t len = window_frames(trace, cfg);
  const std::size_t n = trace.size();

  std::vector<double> acc(n, 0.0);
  std::vector<double> s1(len), s2(len), h(len);
  for (std::size_t start = 0; start + len <= n; ++start) {
    const auto w = normalise(trace, start, len);
    for (std::size_t i = 0; i < len; ++i) {
      s1[i] = w.g[i] - w.b[i];
      s2[i] = w.g[i] + w.b[i] - 2.0 * w.r[i];
    }
    const double sd2 = stddev(s2);
    if (!(sd2 > 0.0)) fail(Errc::DegenerateWindow, "POS projection S2 has zero deviation");
    const double alpha = stddev(s1) / sd2;
    for (std::size_t i = 0; i < len; ++i) h[i] = s1[i] + alpha * s2[i];
    const double mu = mean(h);
    for (std::size_t i = 0; i < len; ++i) acc[start + i] += h[i] - mu;
  }
  return finish(std::move(acc), trace, cfg);
}

TimeSeries extract_pulse(const RgbTrace& trace, const RppgConfig& cfg) {
  return cfg.method == RppgMethod::Chrom ? chrom(trace, cfg) : pos(trace, cfg);
}

}  // namespace pulsekit
