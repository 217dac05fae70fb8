#include "pulsekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsekit/error.hpp"
#include "pulsekit/parallel.hpp"

namespace pulsekit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t sample_count(double duration_s, double fs) {
  if (!(duration_s > 0.0) || !(fs > 0.0)) fail(Errc::InvalidArgument, "duration and rate must be > 0");
  return static_cast<std::size_t>(std::llround(duration_s * fs));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
    : key_(splitmix(splitmix(seed) ^ fnv1a(stream))) {}

std::uint64_t CounterRng::bits(std::uint64_t index) const noexcept {
  return splitmix(key_ ^ splitmix(index));
}

double CounterRng::uniform(std::uint64_t index) const noexcept {
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const noexcept {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

RateProfile::RateProfile(std::vector<double> t, std::vector<double> rate)
    : t_(std::move(t)), rate_(std::move(rate)) {
  if (t_.empty() || t_.size() != rate_.size())
    fail(Errc::InvalidArgument, "rate profile needs matching, non-empty knots");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1])) fail(Errc::InvalidArgument, "rate profile knots must increase");
  for (double r : rate_)
    if (!(r >= 0.0) || !std::isfinite(r)) fail(Errc::InvalidArgument, "rates must be finite and >= 0");
  cum_.assign(t_.size(), 0.0);
  for (std::size_t i = 1; i < t_.size(); ++i)
    cum_[i] = cum_[i - 1] + 0.5 * (rate_[i] + rate_[i - 1]) * (t_[i] - t_[i - 1]) / 60.0;
}

RateProfile RateProfile::constant(double rate) { return RateProfile({0.0}, {rate}); }

RateProfile RateProfile::linear(double r0, double r1, double duration_s) {
  return RateProfile({0.0, duration_s}, {r0, r1});
}

double RateProfile::rate_at(double t) const {
  if (t <= t_.front()) return rate_.front();
  if (t >= t_.back()) return rate_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double f = (t - t_[i]) / (t_[i + 1] - t_[i]);
  return rate_[i] + f * (rate_[i + 1] - rate_[i]);
}

double RateProfile::cycles(double t) const {
  // Integral from t_.front(), shifted so that cycles(0) = 0.
  auto from_front = [&](double u) {
    if (u <= t_.front()) return (u - t_.front()) * rate_.front() / 60.0;
    if (u >= t_.back()) return cum_.back() + (u - t_.back()) * rate_.back() / 60.0;
    const auto it = std::upper_bound(t_.begin(), t_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    return cum_[i] + 0.5 * (rate_[i] + rate_at(u)) * (u - t_[i]) / 60.0;
  };
  return from_front(t) - from_front(0.0);
}

double RateProfile::mean_rate(double a, double b) const {
  if (!(b > a)) return rate_at(a);
  return 60.0 * (cycles(b) - cycles(a)) / (b - a);
}

double pulse_shape(double cycles, const std::array<double, 3>& h) {
  const double norm = std::sqrt(h[0] * h[0] + h[1] * h[1] + h[2] * h[2]);
  const double phi = kTwoPi * cycles;
  return (h[0] * std::sin(phi) + h[1] * std::sin(2.0 * phi) + h[2] * std::sin(3.0 * phi)) / norm;
}

RateSeries windowed_truth(const RateProfile& profile, double duration_s, double fs, double window_s,
                          double hop_s) {
  const std::size_t n = sample_count(duration_s, fs);
  const auto width = static_cast<std::size_t>(std::llround(window_s * fs));
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hop_s * fs)));
  RateSeries out;
  out.window_s = static_cast<double>(width) / fs;
  out.hop_s = static_cast<double>(hop) / fs;
  for (const auto& w : sliding_windows(n, width, hop)) {
    const double a = static_cast<double>(w.start_index) / fs;
    const double b = static_cast<double>(w.start_index + w.length - 1) / fs;
    out.centers.push_back(0.5 * (a + b));
    out.rate.push_back(profile.mean_rate(a, b));
    out.valid.push_back(1);
  }
  return out;
}

TimeSeries clean_site_waveform(const SubjectSpec& spec, const SiteSpec& site, double fs) {
  const std::size_t n = sample_count(spec.duration_s, fs);
  const double delay = site.transit_ms / 1000.0;
  std::vector<double> x(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double resp = std::sin(kTwoPi * spec.resp.cycles(t));
      x[i] = site.amplitude * pulse_shape(spec.hr.cycles(t - delay), spec.harmonics) *
                 (1.0 + spec.resp_am_depth * resp) +
             spec.resp_baseline * resp;
    }
  });
  return TimeSeries(std::move(x), fs);
}

ContactSubject gen_contact_channels(const SubjectSpec& spec) {
  if (spec.sites.empty()) fail(Errc::InvalidArgument, "subject has no sites");
  const double fs = spec.contact_fs;
  ChannelSet channels;
  for (const auto& site : spec.sites) {
    if (site.transit_ms < 0.0 || site.transit_ms > 200.0)
      fail(Errc::InvalidArgument, "transit must lie in [0, 200] ms");
    auto x = clean_site_waveform(spec, site, fs).values();
    const CounterRng white(spec.seed, "contact/" + site.name + "/white");
    const CounterRng burst(spec.seed, "contact/" + site.name + "/burst");
    const CounterRng wander(spec.seed, "contact/" + site.name + "/wander");
    const double wander_phase = kTwoPi * wander.uniform(0);
    parallel_for(x.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const double t = static_cast<double>(i) / fs;
        double v = x[i];
        if (site.noise.white_sigma > 0.0) v += site.noise.white_sigma * white.normal(i);
        for (const auto& b : site.noise.bursts)
          if (t >= b.start_s && t < b.start_s + b.duration_s) v += b.sigma * burst.normal(i);
        if (site.noise.wander_amplitude != 0.0)
          v += site.noise.wander_amplitude * std::sin(kTwoPi * site.noise.wander_hz * t + wander_phase);
        x[i] = v;
      }
    });
    channels.add(site.name, TimeSeries(std::move(x), fs));
  }

  const CounterRng jitter(spec.seed, "guide/jitter");
  const auto ng = static_cast<std::size_t>(std::ceil(spec.duration_s * spec.guide_fs)) + 1;
  std::vector<double> gt(ng), gbpm(ng);
  for (std::size_t k = 0; k < ng; ++k) {
    gt[k] = static_cast<double>(k) / spec.guide_fs;
    const double j = spec.guide_jitter_bpm * (2.0 * jitter.uniform(k) - 1.0);
    gbpm[k] = std::clamp(spec.hr.rate_at(gt[k]) + j, 30.0, 220.0);
  }

  return {std::move(channels), GuideRate(std::move(gt), std::move(gbpm)),
          windowed_truth(spec.hr, spec.duration_s, fs, spec.truth_window_s, spec.truth_hop_s)};
}

RgbTrace gen_rgb_trace(const SubjectSpec& spec, const SiteSpec& site, const RgbOptions& opts) {
  if (!(opts.pulse_strength > 0.0) || opts.pulse_strength > 0.05)
    fail(Errc::InvalidArgument, "pulse strength must lie in (0, 0.05]");
  const double fs = spec.video_fs;
  const auto pulse = clean_site_waveform(spec, site, fs);
  const std::size_t n = pulse.size();
  constexpr std::array<double, 3> kHemoglobin{0.33, 0.77, 0.53};
  const auto& base = opts.baseline;

  std::array<double, 3> sigma{0.0, 0.0, 0.0};
  if (opts.noise_snr_db) {
    const double p_rms = stddev(pulse.samples());
    for (int c = 0; c < 3; ++c)
      sigma[c] = base[c] * opts.pulse_strength * kHemoglobin[c] * p_rms /
                 std::pow(10.0, *opts.noise_snr_db / 20.0);
  }
  const std::array<CounterRng, 3> rng{CounterRng(spec.seed, "rgb/" + site.name + "/r"),
                                      CounterRng(spec.seed, "rgb/" + site.name + "/g"),
                                      CounterRng(spec.seed, "rgb/" + site.name + "/b")};

  std::array<std::vector<double>, 3> ch{std::vector<double>(n), std::vector<double>(n),
                                        std::vector<double>(n)};
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double flicker = 1.0 + opts.flicker_amplitude * std::sin(kTwoPi * opts.flicker_hz * t);
      for (int c = 0; c < 3; ++c) {
        double v = base[c] * (1.0 + opts.pulse_strength * kHemoglobin[c] * pulse[i]) * flicker;
        if (sigma[c] > 0.0) v += sigma[c] * rng[c].normal(i);
        ch[c][i] = v;
      }
      if (opts.attack) {
        const auto& a = *opts.attack;
        if (t >= a.onset_s && t <= a.onset_s + a.duration_s && a.duration_s > 0.0) {
          const double f = (t - a.onset_s) / a.duration_s;
          const double amp = a.amplitude_start + f * (a.amplitude_end - a.amplitude_start);
          const double s = std::sin(kTwoPi * a.freq_bpm / 60.0 * t);
          ch[0][i] += base[0] * amp * s;
          ch[1][i] -= base[1] * amp * s;
        }
      }
    }
  });
  return RgbTrace(std::move(ch[0]), std::move(ch[1]), std::move(ch[2]), fs);
}

MotionSubject gen_motion_matrix(const SubjectSpec& spec, const MotionSpec& motion) {
  const double fs = spec.motion_fs;
  const std::size_t n = sample_count(spec.duration_s, fs);
  constexpr std::size_t d = MotionMatrix::kCells;
  std::vector<std::uint8_t> is_signal(d, 0);
  for (std::size_t c : motion.signal_columns) {
    if (c >= d) fail(Errc::InvalidArgument, "signal column out of range");
    is_signal[c] = 1;
  }
  const CounterRng noise(spec.seed, "motion/noise");
  std::vector<double> data(n * d);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double breath = motion.amplitude * std::sin(kTwoPi * spec.resp.cycles(t));
      for (std::size_t c = 0; c < d; ++c) {
        double v = is_signal[c] ? breath : 0.0;
        if (motion.noise_sigma > 0.0) v += motion.noise_sigma * noise.normal(i * d + c);
        data[i * d + c] = v;
      }
    }
  });
  return {MotionMatrix(std::move(data), n, fs),
          windowed_truth(spec.resp, spec.duration_s, fs, 30.0, 1.0)};
}

}  // namespace pulsekit
