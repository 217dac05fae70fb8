#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pulsekit {

/// Uniformly sampled scalar signal. Samples are finite and non-empty;
/// `fs` is in Hz and `t0` is the time of sample 0 in seconds.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double fs, double t0 = 0.0);

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double fs() const noexcept { return fs_; }
  double t0() const noexcept { return t0_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  double time_at(std::size_t i) const noexcept {
    return t0_ + static_cast<double>(i) / fs_;
  }
  /// Span covered by the samples, (N-1)/fs.
  double duration() const noexcept {
    return static_cast<double>(samples_.size() - 1) / fs_;
  }

 private:
  std::vector<double> samples_;
  double fs_;
  double t0_;
};

/// Per-frame spatial-mean colour of one region of interest.
class RgbTrace {
 public:
  RgbTrace(std::vector<double> r, std::vector<double> g, std::vector<double> b, double fs,
           double t0 = 0.0);

  std::span<const double> r() const noexcept { return r_; }
  std::span<const double> g() const noexcept { return g_; }
  std::span<const double> b() const noexcept { return b_; }
  std::size_t size() const noexcept { return r_.size(); }
  double fs() const noexcept { return fs_; }
  double t0() const noexcept { return t0_; }

 private:
  std::vector<double> r_, g_, b_;
  double fs_;
  double t0_;
};

/// Named signals. Iteration is in lexical name order, which fixes the
/// reduction order of every cross-channel sum in the library.
class ChannelSet {
 public:
  using Map = std::map<std::string, TimeSeries>;

  ChannelSet() = default;

  void add(std::string name, TimeSeries series);
  bool contains(const std::string& name) const { return channels_.count(name) != 0; }
  const TimeSeries& at(const std::string& name) const;
  std::size_t size() const noexcept { return channels_.size(); }
  bool empty() const noexcept { return channels_.empty(); }
  std::vector<std::string> names() const;

  Map::const_iterator begin() const noexcept { return channels_.begin(); }
  Map::const_iterator end() const noexcept { return channels_.end(); }

  /// Common sampling rate; throws InvalidArgument when channels disagree.
  double common_fs() const;

 private:
  Map channels_;
};

struct Window {
  std::size_t start_index = 0;
  std::size_t length = 0;
};

/// (x - mean) / sd with the population (divide-by-N) deviation.
/// Throws ZeroVariance for a constant input and TooShort below two samples.
TimeSeries znormalize(const TimeSeries& ts);
std::vector<double> znormalize(std::span<const double> x);

enum class Interpolation { Linear, Cubic };

/// Resamples onto t0 + k/new_fs for every k whose time lies inside the
/// original span. Cubic mode uses Catmull-Rom tangents.
TimeSeries resample(const TimeSeries& ts, double new_fs,
                    Interpolation mode = Interpolation::Linear);

inline TimeSeries resample_linear(const TimeSeries& ts, double new_fs) {
  return resample(ts, new_fs, Interpolation::Linear);
}

/// Windows of `width` samples every `stride` samples, ordered by start.
std::vector<Window> sliding_windows(std::size_t len, std::size_t width, std::size_t stride);

double mean(std::span<const double> x);
/// Population standard deviation (divisor N).
double stddev(std::span<const double> x);

/// True when two sampling rates agree to 1e-9 relative.
bool same_rate(double fs_a, double fs_b) noexcept;

}  // namespace pulsekit
