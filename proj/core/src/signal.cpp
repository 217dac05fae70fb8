#include "pulsekit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

void check_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) fail(Errc::NonFiniteSample, std::string(what) + " contains NaN/Inf");
  }
}

void check_rate(double fs) {
  if (!(fs > 0.0) || !std::isfinite(fs)) fail(Errc::InvalidArgument, "sampling rate must be > 0");
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> samples, double fs, double t0)
    : samples_(std::move(samples)), fs_(fs), t0_(t0) {
  check_rate(fs_);
  if (!std::isfinite(t0_)) fail(Errc::InvalidArgument, "start offset must be finite");
  if (samples_.empty()) fail(Errc::InvalidArgument, "time series must not be empty");
  check_finite(samples_, "time series");
}

RgbTrace::RgbTrace(std::vector<double> r, std::vector<double> g, std::vector<double> b, double fs,
                   double t0)
    : r_(std::move(r)), g_(std::move(g)), b_(std::move(b)), fs_(fs), t0_(t0) {
  check_rate(fs_);
  if (r_.size() != g_.size() || r_.size() != b_.size())
    fail(Errc::InvalidArgument, "RGB channels must have equal length");
  if (r_.empty()) fail(Errc::InvalidArgument, "RGB trace must not be empty");
  check_finite(r_, "red channel");
  check_finite(g_, "green channel");
  check_finite(b_, "blue channel");
}

void ChannelSet::add(std::string name, TimeSeries series) {
  if (name.empty()) fail(Errc::InvalidArgument, "channel name must not be empty");
  auto [it, inserted] = channels_.emplace(std::move(name), std::move(series));
  if (!inserted) fail(Errc::InvalidArgument, "duplicate channel name '" + it->first + "'");
}

const TimeSeries& ChannelSet::at(const std::string& name) const {
  auto it = channels_.find(name);
  if (it == channels_.end()) fail(Errc::InvalidArgument, "no channel named '" + name + "'");
  return it->second;
}

std::vector<std::string> ChannelSet::names() const {
  std::vector<std::string> out;
  out.reserve(channels_.size());
  for (const auto& [name, _] : channels_) out.push_back(name);
  return out;
}

double ChannelSet::common_fs() const {
  if (channels_.empty()) fail(Errc::InvalidArgument, "channel set is empty");
  const double fs = channels_.begin()->second.fs();
  for (const auto& [name, ts] : channels_) {
    if (!same_rate(ts.fs(), fs))
      fail(Errc::InvalidArgument, "channel '" + name + "' has a different sampling rate");
  }
  return fs;
}

bool same_rate(double fs_a, double fs_b) noexcept {
  return std::abs(fs_a - fs_b) <= 1e-9 * std::max(std::abs(fs_a), std::abs(fs_b));
}

double mean(std::span<const double> x) {
  if (x.empty()) fail(Errc::TooShort, "mean of an empty sequence");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

std::vector<double> znormalize(std::span<const double> x) {
  if (x.size() < 2) fail(Errc::TooShort, "z-normalization needs at least two samples");
  const double mu = mean(x);
  const double sd = stddev(x);
  if (!(sd > 0.0)) fail(Errc::ZeroVariance, "cannot z-normalize a constant signal");
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return (v - mu) / sd; });
  return out;
}

TimeSeries znormalize(const TimeSeries& ts) {
  return TimeSeries(znormalize(ts.samples()), ts.fs(), ts.t0());
}

TimeSeries resample(const TimeSeries& ts, double new_fs, Interpolation mode) {
  check_rate(new_fs);
  const auto x = ts.samples();
  const std::size_t n = x.size();
  if (same_rate(new_fs, ts.fs())) return ts;
  if (n == 1) return TimeSeries({x[0]}, new_fs, ts.t0());

  const double span = ts.duration();
  // Small slack so that exact multiples (e.g. 3 s at 2 Hz) are not lost to rounding.
  const auto count = static_cast<std::size_t>(std::floor(span * new_fs + 1e-9)) + 1;
  std::vector<double> out(count);
  const double ratio = ts.fs() / new_fs;

  for (std::size_t k = 0; k < count; ++k) {
    const double pos = static_cast<double>(k) * ratio;
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= n - 1) i = n - 2;
    const double frac = std::min(1.0, pos - static_cast<double>(i));

    if (mode == Interpolation::Linear) {
      out[k] = x[i] + frac * (x[i + 1] - x[i]);
      continue;
    }
    const double p0 = x[i];
    const double p1 = x[i + 1];
    const double m0 = i == 0 ? (x[1] - x[0]) : 0.5 * (x[i + 1] - x[i - 1]);
    const double m1 = i + 2 >= n ? (x[n - 1] - x[n - 2]) : 0.5 * (x[i + 2] - x[i]);
    const double t = frac;
    const double t2 = t * t;
    const double t3 = t2 * t;
    out[k] = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 +
             (t3 - t2) * m1;
  }
  return TimeSeries(std::move(out), new_fs, ts.t0());
}

std::vector<Window> sliding_windows(std::size_t len, std::size_t width, std::size_t stride) {
  if (stride == 0) fail(Errc::InvalidArgument, "stride must be >= 1");
  if (width == 0) fail(Errc::InvalidArgument, "window width must be >= 1");
  if (width > len) fail(Errc::WidthExceedsLength, "window width exceeds signal length");
  const std::size_t count = (len - width) / stride + 1;
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({i * stride, width});
  return out;
}

}  // namespace pulsekit
