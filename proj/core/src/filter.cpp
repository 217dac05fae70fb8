#include "pulsekit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

using cd = std::complex<double>;

Biquad section_from_poles(cd p1, cd p2) {
  Biquad s;
  // Zeros at z = +1 and z = -1.
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  s.a1 = -(p1 + p2).real();
  s.a2 = (p1 * p2).real();
  return s;
}

}  // namespace

SosFilter butterworth_bandpass(const BandpassSpec& spec, double fs) {
  if (spec.order < 1) fail(Errc::InvalidArgument, "filter order must be >= 1");
  if (!(fs > 0.0)) fail(Errc::InvalidArgument, "sampling rate must be > 0");
  if (!(spec.low_hz > 0.0) || !(spec.high_hz > spec.low_hz) || !(spec.high_hz < fs / 2.0))
    fail(Errc::InvalidBand, "bandpass edges must satisfy 0 < low < high < fs/2");

  const int n = spec.order;
  const double fs2 = 2.0 * fs;
  const double w1 = fs2 * std::tan(std::numbers::pi * spec.low_hz / fs);
  const double w2 = fs2 * std::tan(std::numbers::pi * spec.high_hz / fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  std::vector<cd> poles;
  poles.reserve(2 * n);
  for (int k = 0; k < n; ++k) {
    const cd proto = std::polar(1.0, std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n));
    const cd half = proto * (bw / 2.0);
    const cd root = std::sqrt(half * half - w0 * w0);
    poles.push_back(half + root);
    poles.push_back(half - root);
  }

  // Gain of the bilinear-mapped zpk: bw^n * fs2^n / prod(fs2 - p), with the
  // n analog zeros at the origin mapping to z = +1 and the n zeros at
  // infinity mapping to z = -1.
  cd gain = 1.0;
  std::vector<cd> zpoles;
  zpoles.reserve(poles.size());
  for (const cd& p : poles) {
    zpoles.push_back((fs2 + p) / (fs2 - p));
    gain /= (fs2 - p);
  }
  gain *= std::pow(bw * fs2, n);

  std::vector<cd> complex_poles;
  std::vector<double> real_poles;
  for (const cd& p : zpoles) {
    if (std::abs(p.imag()) > 1e-12 * std::max(1.0, std::abs(p))) {
      if (p.imag() > 0) complex_poles.push_back(p);
    } else {
      real_poles.push_back(p.real());
    }
  }
  std::sort(real_poles.begin(), real_poles.end());
  std::sort(complex_poles.begin(), complex_poles.end(),
            [](const cd& a, const cd& b) { return std::abs(a) < std::abs(b); });

  SosFilter filter;
  for (const cd& p : complex_poles) filter.sections.push_back(section_from_poles(p, std::conj(p)));
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2)
    filter.sections.push_back(section_from_poles(real_poles[i], real_poles[i + 1]));
  if (filter.sections.size() != static_cast<std::size_t>(n))
    fail(Errc::InvalidBand, "could not pair filter poles into sections");

  auto& first = filter.sections.front();
  first.b0 *= gain.real();
  first.b1 *= gain.real();
  first.b2 *= gain.real();
  return filter;
}

std::complex<double> frequency_response(const SosFilter& filter, double f_hz, double fs) {
  const cd z1 = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
  const cd z2 = z1 * z1;
  cd h = 1.0;
  for (const auto& s : filter.sections)
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  return h;
}

std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x,
                            std::span<const double> initial_state) {
  const std::size_t ns = filter.sections.size();
  if (!initial_state.empty() && initial_state.size() != 2 * ns)
    fail(Errc::InvalidArgument, "initial state must hold two values per section");

  std::vector<double> y(x.begin(), x.end());
  for (std::size_t k = 0; k < ns; ++k) {
    const auto& s = filter.sections[k];
    double z1 = initial_state.empty() ? 0.0 : initial_state[2 * k];
    double z2 = initial_state.empty() ? 0.0 : initial_state[2 * k + 1];
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> sosfilt_zi(const SosFilter& filter) {
  std::vector<double> zi;
  zi.reserve(2 * filter.sections.size());
  double scale = 1.0;
  for (const auto& s : filter.sections) {
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    zi.push_back(scale * (dc - s.b0));
    zi.push_back(scale * (s.b2 - s.a2 * dc));
    scale *= dc;
  }
  return zi;
}

std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x) {
  const std::size_t pad = 3 * static_cast<std::size_t>(filter.order());
  const std::size_t n = x.size();
  if (n <= pad) fail(Errc::SignalTooShort, "signal must be longer than 3x the filter order");

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = sosfilt_zi(filter);
  std::vector<double> state(zi.size());

  std::transform(zi.begin(), zi.end(), state.begin(), [&](double v) { return v * ext.front(); });
  auto y = sosfilt(filter, ext, state);

  std::reverse(y.begin(), y.end());
  std::transform(zi.begin(), zi.end(), state.begin(), [&](double v) { return v * y.front(); });
  y = sosfilt(filter, y, state);
  std::reverse(y.begin(), y.end());

  return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pad),
                             y.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

TimeSeries filtfilt(const SosFilter& filter, const TimeSeries& ts) {
  return TimeSeries(filtfilt(filter, ts.samples()), ts.fs(), ts.t0());
}

TimeSeries bandpass(const TimeSeries& ts, const BandpassSpec& spec) {
  return filtfilt(butterworth_bandpass(spec, ts.fs()), ts);
}

}  // namespace pulsekit
