// One line per acceptance criterion; exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pulsekit/filter.hpp"
#include "pulsekit/fusion.hpp"
#include "pulsekit/metrics.hpp"
#include "pulsekit/parallel.hpp"
#include "pulsekit/ptt.hpp"
#include "pulsekit/respiration.hpp"
#include "pulsekit/rppg.hpp"
#include "pulsekit/spectral.hpp"
#include "pulsekit/stats.hpp"
#include "pulsekit/synth.hpp"
#include "pulsekit_tools/report.hpp"
#include "pulsekit_tools/runner.hpp"

using namespace pulsekit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checks {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  Outcome outcome() const { return {pass_, pass_ ? notes_ : notes_ + " | FAILED: " + failures_}; }

 private:
  bool pass_ = true;
  std::string notes_;
  std::string failures_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> slice_matching(const std::vector<double>& full, const TimeSeries& ts) {
  const auto off = static_cast<std::size_t>(std::llround(ts.t0() * ts.fs()));
  return {full.begin() + static_cast<std::ptrdiff_t>(off),
          full.begin() + static_cast<std::ptrdiff_t>(off + ts.size())};
}

double mean_abs_error(const RateSeries& est, double truth) {
  double s = 0;
  for (double r : est.rate) s += std::abs(r - truth);
  return s / static_cast<double>(est.size());
}

// 1 -------------------------------------------------------------------------
Outcome dsp_fidelity() {
  Checks c;
  const auto start = std::chrono::steady_clock::now();
  double worst_h = 0;
  for (double fs : {90.0, 400.0}) {
    for (const auto& spec : {BandpassSpec::from_bpm(40, 180, 4), BandpassSpec::from_bpm(6, 24, 3),
                             BandpassSpec::from_bpm(42, 102, 2)}) {
      const auto f = butterworth_bandpass(spec, fs);
      for (int i = 1; i <= 1000; ++i) {
        const double hz = (fs / 2) * i / 1001.0;
        const double got = std::abs(frequency_response(f, hz, fs));
        worst_h = std::max(worst_h, std::abs(got - oracle::analog_bandpass_magnitude(
                                                       hz, fs, spec.low_hz, spec.high_hz, spec.order)));
      }
    }
  }
  c.require(worst_h < 1e-6, "|H| deviation " + fmt("%.2e", worst_h));
  c.note("max |H| error " + fmt("%.1e", worst_h));

  int worst_lag = 0;
  for (double fs : {90.0, 400.0}) {
    const auto f = butterworth_bandpass(BandpassSpec::from_bpm(40, 180, 4), fs);
    for (double hz : {0.8, 1.2, 2.0, 2.7}) {
      const auto n = static_cast<std::size_t>(60 * fs);
      const auto x = oracle::tone(hz, fs, n);
      const auto y = filtfilt(f, x);
      const auto m = static_cast<std::ptrdiff_t>(10 * fs);
      const std::vector<double> xi(x.begin() + m, x.end() - m);
      int best = 0;
      double best_r = -2;
      for (int lag = -20; lag <= 20; ++lag) {
        const std::vector<double> yi(y.begin() + m + lag, y.end() - m + lag);
        const double r = oracle::corr(xi, yi);
        if (r > best_r) {
          best_r = r;
          best = lag;
        }
      }
      worst_lag = std::max(worst_lag, std::abs(best));
    }
  }
  c.require(worst_lag == 0, "filtfilt lag " + std::to_string(worst_lag));
  c.note("filtfilt lag " + std::to_string(worst_lag) + " samples");

  double worst_env = 0;
  for (double amp : {0.5, 2.0}) {
    const auto x = oracle::tone(1.2, 400.0, 4000, amp);
    const auto env = hilbert_envelope(x);
    for (std::size_t i = 400; i < 3600; ++i) worst_env = std::max(worst_env, std::abs(env[i] / amp - 1));
  }
  c.require(worst_env < 0.01, "envelope error " + fmt("%.3f", worst_env));
  c.note("envelope error " + fmt("%.2e", worst_env));
  const double dt = seconds_since(start);
  c.require(dt < 5.0, "runtime " + fmt("%.1f s", dt));
  c.note("runtime " + fmt("%.2f s", dt));
  return c.outcome();
}

// 2 -------------------------------------------------------------------------
Outcome hr_estimation() {
  Checks c;
  double worst_tone = 0;
  for (double fs : {30.0, 90.0, 400.0})
    for (double bpm : {42.0, 60.0, 72.0, 95.5, 120.0, 151.3, 178.0}) {
      const auto hr = estimate_hr_series(TimeSeries(oracle::tone(bpm / 60, fs, static_cast<std::size_t>(60 * fs)), fs));
      for (double r : hr.rate) worst_tone = std::max(worst_tone, std::abs(r - bpm));
    }
  c.require(worst_tone <= 0.06, "tone error " + fmt("%.4f", worst_tone));
  c.note("max tone error " + fmt("%.4f bpm", worst_tone));

  double worst_chirp = 0;
  for (double fs : {90.0, 400.0}) {
    const double dur = 120.0;
    const auto hr = estimate_hr_series(TimeSeries(oracle::chirp(1.0, 2.0, dur, fs), fs));
    for (std::size_t i = 0; i < hr.size(); ++i)
      worst_chirp = std::max(worst_chirp, std::abs(hr.rate[i] - 60.0 * (1.0 + hr.centers[i] / dur)));
  }
  c.require(worst_chirp <= 2.0, "chirp error " + fmt("%.3f", worst_chirp));
  c.note("max chirp error " + fmt("%.3f bpm", worst_chirp));
  return c.outcome();
}

// 3 -------------------------------------------------------------------------
Outcome rppg_recovery() {
  Checks c;
  const auto start = std::chrono::steady_clock::now();
  for (const auto method : {RppgMethod::Pos, RppgMethod::Chrom}) {
    const std::string name = method == RppgMethod::Pos ? "POS" : "CHROM";
    RppgConfig cfg;
    cfg.method = method;
    double clean_worst = 0, noisy_worst = 0, noisy_sum = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SubjectSpec spec;
      spec.seed = 500 + seed;
      spec.duration_s = 60.0;
      spec.hr = RateProfile::linear(66.0 + seed % 5, 80.0 - seed % 7, 60.0);
      spec.sites = {SiteSpec{"face", 0.0, {}, 1.0}};
      const auto truth = windowed_truth(spec.hr, spec.duration_s, spec.video_fs, 10.0, 1.0);
      RgbOptions opts;
      if (seed < 5) {
        const auto clean = estimate_hr_series(extract_pulse(gen_rgb_trace(spec, spec.sites[0], opts), cfg));
        clean_worst = std::max(clean_worst, hr_errors(truth, clean).mae);
      }
      opts.noise_snr_db = 0.0;
      const auto noisy = estimate_hr_series(extract_pulse(gen_rgb_trace(spec, spec.sites[0], opts), cfg));
      const double mae = hr_errors(truth, noisy).mae;
      noisy_worst = std::max(noisy_worst, mae);
      noisy_sum += mae;
    }
    c.require(clean_worst < 0.5, name + " clean MAE " + fmt("%.3f", clean_worst));
    c.require(noisy_worst < 4.0, name + " 0 dB MAE " + fmt("%.3f", noisy_worst));
    c.note(name + " clean MAE " + fmt("%.3f", clean_worst) + ", 0 dB MAE worst " +
           fmt("%.3f", noisy_worst) + " mean " + fmt("%.3f", noisy_sum / 20));
  }
  const double dt = seconds_since(start);
  c.require(dt < 60.0, "runtime " + fmt("%.1f s", dt));
  c.note("runtime " + fmt("%.2f s", dt));
  return c.outcome();
}

// 4 -------------------------------------------------------------------------
Outcome adversarial_attack() {
  Checks c;
  SubjectSpec spec;
  spec.seed = 680;
  spec.duration_s = 240.0;
  spec.sites = {SiteSpec{"face", 0.0, {}, 1.0}};
  RgbOptions opts;
  const double onset = 100.0, length = 120.0;
  // Ramp from 5x to 10x the pulse amplitude.
  opts.attack = AttackSpec{120.0, onset, length, 5 * opts.pulse_strength, 10 * opts.pulse_strength};
  opts.noise_snr_db = 10.0;
  const auto hr = estimate_hr_series(pos(gen_rgb_trace(spec, spec.sites[0], opts)));
  double inside = 0, outside = 0;
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t i = 0; i < hr.size(); ++i) {
    const double a = hr.centers[i] - 5.0, b = hr.centers[i] + 5.0;
    if (a >= onset && b <= onset + length) {
      inside = std::max(inside, std::abs(hr.rate[i] - 120.0));
      ++n_in;
    } else if (b <= onset || a >= onset + length) {
      outside = std::max(outside, std::abs(hr.rate[i] - 72.0));
      ++n_out;
    }
  }
  c.require(n_in > 0 && inside <= 1.0, "inside error " + fmt("%.3f", inside));
  c.require(n_out > 0 && outside <= 1.0, "outside error " + fmt("%.3f", outside));
  c.note("POS inside attack: " + std::to_string(n_in) + " windows, max |HR-120| " + fmt("%.3f", inside));
  c.note("outside: " + std::to_string(n_out) + " windows, max |HR-72| " + fmt("%.3f", outside));
  return c.outcome();
}

// 5 -------------------------------------------------------------------------
SubjectSpec nine_channel_subject(std::uint64_t seed, double duration, bool bursts) {
  SubjectSpec spec;
  spec.seed = seed;
  spec.harmonics = {1.0, 0.0, 0.0};
  spec.duration_s = duration;
  spec.guide_jitter_bpm = 1.0;
  spec.hr = RateProfile({0, duration / 2, duration}, {68, 80, 74});
  for (int ch = 0; ch < 9; ++ch) {
    SiteSpec site{"site" + std::to_string(ch), 0.0, {}, 1.0};
    site.noise.white_sigma = 0.05;
    if (bursts)
      for (double t0 = 0.0; t0 < duration; t0 += 10.0) site.noise.bursts.push_back({t0 + ch * 1.1, 2.0, 4.0});
    spec.sites.push_back(site);
  }
  return spec;
}

Outcome fusion_robustness() {
  Checks c;
  const auto spec = nine_channel_subject(55, 120.0, true);
  // At most two channels are inside a burst at any instant.
  int worst_overlap = 0;
  for (double t = 0; t < spec.duration_s; t += 0.01) {
    int hit = 0;
    for (const auto& s : spec.sites)
      for (const auto& b : s.noise.bursts) hit += t >= b.start_s && t < b.start_s + b.duration_s;
    worst_overlap = std::max(worst_overlap, hit);
  }
  c.require(worst_overlap <= 2, "burst overlap " + std::to_string(worst_overlap));

  const auto subj = gen_contact_channels(spec);
  const auto out = fuse(subj.channels, subj.guide);
  const auto clean = clean_site_waveform(spec, spec.sites[0], spec.contact_fs).values();
  const double r = oracle::corr(out.values(), slice_matching(clean, out));
  const auto hr = estimate_hr_series(out);
  // Truth per fused window: mean of the instantaneous rate over the window.
  double mae = 0;
  for (std::size_t i = 0; i < hr.size(); ++i)
    mae += std::abs(hr.rate[i] - spec.hr.mean_rate(hr.centers[i] - 5.0, hr.centers[i] + 5.0));
  mae /= static_cast<double>(hr.size());
  c.require(r > 0.95, "r " + fmt("%.4f", r));
  c.require(mae < 1.0, "MAE " + fmt("%.3f", mae));
  c.note("r vs clean " + fmt("%.4f", r) + ", HR MAE " + fmt("%.3f bpm", mae));

  // Harmonic pulse: the guide-centred band keeps only the fundamental, so the
  // reference is the clean pulse through the same band.
  auto harmonic = nine_channel_subject(57, 120.0, true);
  harmonic.harmonics = {1.0, 0.4, 0.2};
  harmonic.hr = RateProfile::constant(72.0);
  harmonic.guide_jitter_bpm = 0.0;
  const auto hs = gen_contact_channels(harmonic);
  const auto hout = fuse(hs.channels, hs.guide);
  const auto href = filtfilt(butterworth_bandpass(BandpassSpec::from_bpm(42, 102, 2), harmonic.contact_fs),
                             clean_site_waveform(harmonic, harmonic.sites[0], harmonic.contact_fs));
  const double rh = oracle::corr(hout.values(), slice_matching(href.values(), hout));
  c.require(rh > 0.95, "harmonic r " + fmt("%.4f", rh));
  c.note("harmonic pulse r vs band-limited clean " + fmt("%.4f", rh));

  set_thread_count(1);
  const auto big = gen_contact_channels(nine_channel_subject(56, 600.0, false));
  const auto t0 = std::chrono::steady_clock::now();
  const auto long_out = fuse(big.channels, big.guide);
  const double dt = seconds_since(t0);
  c.require(dt < 60.0, "10 min fusion " + fmt("%.1f s", dt));
  c.require(long_out.size() == 600 * 400 - 4000 + 1, "output length");
  c.note("10 min x 9 ch x 400 Hz stride-1 in " + fmt("%.2f s", dt) + " (1 thread)");
  return c.outcome();
}

// 6 -------------------------------------------------------------------------
Outcome pulse_transit() {
  Checks c;
  for (double fs : {400.0, 90.0}) {
    // Band-limited pulse; 10 s at each end are cropped so filter start-up
    // transients do not differ between the two sites.
    SubjectSpec spec;
    spec.seed = 1;
    spec.duration_s = 80.0;
    spec.sites = {SiteSpec{"x", 0.0, {}, 1.0}, SiteSpec{"y", 50.0, {}, 1.0}};
    const auto band = BandpassSpec::from_bpm(40, 180, 4);
    const auto crop = [fs](const TimeSeries& ts) {
      const auto a = static_cast<std::ptrdiff_t>(10 * fs), b = static_cast<std::ptrdiff_t>(70 * fs);
      return TimeSeries({ts.values().begin() + a, ts.values().begin() + b}, fs, 10.0);
    };
    const auto x = crop(bandpass(clean_site_waveform(spec, spec.sites[0], fs), band));
    const auto y = crop(bandpass(clean_site_waveform(spec, spec.sites[1], fs), band));
    const auto lags = sliding_xcorr_lag(x, y);
    double worst = 0;
    for (double l : lags.lag_ms) worst = std::max(worst, std::abs(l - 50.0));
    const double tol = fs == 400.0 ? 0.5 : 6.0;
    c.require(worst <= tol, fmt("%.0f Hz", fs) + " error " + fmt("%.3f ms", worst));
    c.note(fmt("%.0f Hz", fs) + " max |lag-50| " + fmt("%.3f ms", worst));
  }

  // Twenty subjects; each has its own arm and leg transit around 20 and 60 ms,
  // measured from 90 fps rPPG traces.
  std::vector<double> arm, leg;
  const auto band = BandpassSpec::from_bpm(40, 180, 4);
  int ordered = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CounterRng rng(s, "acceptance/transit");
    SubjectSpec spec;
    spec.seed = 900 + s;
    spec.duration_s = 60.0;
    spec.hr = RateProfile::constant(60.0 + 2.0 * static_cast<double>(s % 10));
    spec.sites = {SiteSpec{"face", 0.0, {}, 1.0}, SiteSpec{"arm", 20.0 + 4.0 * rng.normal(0), {}, 1.0},
                  SiteSpec{"leg", 60.0 + 4.0 * rng.normal(1), {}, 1.0}};
    RgbOptions opts;
    opts.noise_snr_db = 10.0;
    const auto face = bandpass(pos(gen_rgb_trace(spec, spec.sites[0], opts)), band);
    const auto a = ptt_summary(sliding_xcorr_lag(face, bandpass(pos(gen_rgb_trace(spec, spec.sites[1], opts)), band)));
    const auto l = ptt_summary(sliding_xcorr_lag(face, bandpass(pos(gen_rgb_trace(spec, spec.sites[2], opts)), band)));
    arm.push_back(a.mean_ms);
    leg.push_back(l.mean_ms);
    ordered += l.mean_ms > a.mean_ms;
  }
  const auto kw = kruskal_wallis({arm, leg});
  double ma = 0, ml = 0;
  for (std::size_t i = 0; i < arm.size(); ++i) {
    ma += arm[i] / 20;
    ml += leg[i] / 20;
  }
  c.require(kw.p < 0.01, "Kruskal-Wallis p " + fmt("%.3g", kw.p));
  c.require(ml > ma, "leg mean not above arm mean");
  c.note("20 subjects: face->arm mean " + fmt("%.1f", ma) + " ms, face->leg " + fmt("%.1f", ml) +
         " ms, leg>arm in " + std::to_string(ordered) + "/20, KW p " + fmt("%.2e", kw.p));
  return c.outcome();
}

// 7 -------------------------------------------------------------------------
Outcome respiration() {
  Checks c;
  // Breathing rate swept 10 -> 20 -> 10 breaths/min.
  const double dur = 240.0;
  const RateProfile fm({0.0, dur / 2, dur}, {10.0, 20.0, 10.0});
  double worst_ppg = 0, worst_motion = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SubjectSpec spec;
    spec.seed = 70 + seed;
    spec.duration_s = dur;
    spec.resp = fm;
    spec.resp_am_depth = 0.3;
    spec.resp_baseline = 0.3;
    spec.contact_fs = 100.0;
    for (int ch = 0; ch < 9; ++ch) {
      spec.sites.push_back({"s" + std::to_string(ch), 5.0 * ch, {}, 1.0});
      spec.sites.back().noise.white_sigma = 0.1;
    }
    const auto contact = gen_contact_channels(spec);
    const auto ppg = resp_from_ppg(contact.channels).waveform;
    const auto truth_ppg = windowed_truth(fm, dur, spec.contact_fs, 30.0, 1.0);
    worst_ppg = std::max(worst_ppg, hr_errors(truth_ppg, estimate_resp_rate(ppg)).mae);

    const auto motion = gen_motion_matrix(spec);
    const auto m = resp_from_motion(motion.matrix).waveform;
    worst_motion = std::max(worst_motion, hr_errors(motion.truth, estimate_resp_rate(m)).mae);
  }
  c.require(worst_ppg <= 1.09, "PPG route MAE " + fmt("%.3f", worst_ppg));
  c.require(worst_motion <= 1.09, "motion route MAE " + fmt("%.3f", worst_motion));
  c.note("worst MAE over 5 seeds: PPG " + fmt("%.3f", worst_ppg) + ", motion " + fmt("%.3f", worst_motion) +
         " breaths/min");

  constexpr std::size_t k = MotionMatrix::kCells;
  auto data = oracle::gaussian(2000 * k, 3);
  for (std::size_t r = 0; r < 2000; ++r)
    for (std::size_t col = 1; col < k; ++col) data[r * k + col] += 0.7 * data[r * k + col - 1];
  const auto z = zca_whiten(MotionMatrix(data, 2000, 30.0)).whitened;
  std::vector<double> mu(k, 0.0);
  for (std::size_t r = 0; r < 2000; ++r)
    for (std::size_t col = 0; col < k; ++col) mu[col] += z(r, col) / 2000;
  double dev = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double s = 0;
      for (std::size_t r = 0; r < 2000; ++r) s += (z(r, a) - mu[a]) * (z(r, b) - mu[b]);
      dev = std::max(dev, std::abs(s / 2000 - (a == b ? 1.0 : 0.0)));
    }
  c.require(dev < 1e-6, "ZCA deviation " + fmt("%.2e", dev));
  c.note("ZCA |cov - I|max " + fmt("%.1e", dev));
  return c.outcome();
}

// 8 -------------------------------------------------------------------------
Outcome statistics() {
  Checks c;
  const CounterRng rng(8, "acceptance/stats");
  std::uint64_t k = 0;
  double kw_dev = 0, wx_dev = 0, bt_dev = 0;
  for (int trial = 0; trial < 300; ++trial) {
    // Integer-valued draws so ties are frequent.
    std::vector<std::vector<double>> groups(2 + rng.bits(k++) % 3);
    std::size_t total = 0;
    for (auto& g : groups) {
      g.resize(2 + rng.bits(k++) % 3);
      total += g.size();
      for (auto& v : g) v = static_cast<double>(rng.bits(k++) % 7);
    }
    if (total > 12) continue;
    bool varied = false, each_varied = true;
    for (const auto& g : groups) {
      bool gv = false;
      for (double v : g) {
        varied = varied || v != groups[0][0];
        gv = gv || v != g[0];
      }
      each_varied = each_varied && gv;
    }
    if (varied) {
      const auto r = kruskal_wallis(groups);
      const double h = oracle::kruskal_h(groups);
      kw_dev = std::max({kw_dev, std::abs(r.statistic - h),
                         std::abs(r.p - oracle::chi2_sf(h, static_cast<int>(groups.size()) - 1))});
    }
    if (each_varied) {
      const auto r = bartlett(groups);
      const double b = oracle::bartlett_stat(groups);
      bt_dev = std::max({bt_dev, std::abs(r.statistic - b),
                         std::abs(r.p - oracle::chi2_sf(b, static_cast<int>(groups.size()) - 1))});
    }
    std::vector<double> d(1 + rng.bits(k++) % 12);
    for (auto& v : d) v = static_cast<double>(static_cast<int>(rng.bits(k++) % 11) - 4);
    if (std::any_of(d.begin(), d.end(), [](double v) { return v != 0.0; })) {
      const auto r = wilcoxon_signed_rank(d, 0.05, WilcoxonMethod::Exact);
      wx_dev = std::max(wx_dev, std::abs(r.p - oracle::wilcoxon_enumerated_p(d)));
    }
  }
  c.require(kw_dev < 1e-12, "Kruskal-Wallis deviation " + fmt("%.2e", kw_dev));
  c.require(bt_dev < 1e-12, "Bartlett deviation " + fmt("%.2e", bt_dev));
  c.require(wx_dev < 1e-12, "Wilcoxon deviation " + fmt("%.2e", wx_dev));
  c.note("oracle deviation KW " + fmt("%.0e", kw_dev) + ", Bartlett " + fmt("%.0e", bt_dev) + ", Wilcoxon " +
         fmt("%.0e", wx_dev));

  for (std::size_t n : {20u, 5000u}) {
    int rejections = 0;
    for (int trial = 0; trial < 200; ++trial)
      rejections += shapiro_wilk(oracle::gaussian(n, 10000 * n + trial)).significant;
    const double rate = rejections / 200.0;
    c.require(rate >= 0.02 && rate <= 0.08, "Shapiro-Wilk n=" + std::to_string(n) + " rate " + fmt("%.3f", rate));
    c.note("Shapiro-Wilk n=" + std::to_string(n) + " rejection " + fmt("%.1f%%", 100 * rate));
  }
  c.require(bonferroni(0.05, 4) == 0.0125, "bonferroni(0.05,4)");
  c.require(bonferroni(0.05, 10) == 0.005, "bonferroni(0.05,10)");
  c.note("bonferroni exact");
  return c.outcome();
}

// 9 -------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).string();
    if (rel == "report.json") {
      auto rep = tools::load_report(e.path());
      rep.provenance.timestamp.clear();
      files[rel] = tools::to_json(rep).dump();
    } else {
      files[rel] = slurp(e.path());
    }
  }
  return files;
}

Outcome determinism() {
  Checks c;
  const auto root = fs::temp_directory_path() / "pulsekit_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto cfg = root / "config.json";
  std::ofstream(cfg) << nlohmann::json{{"synth", {{"duration_s", 45.0}, {"render_frames", true}}}}.dump();

  std::vector<std::map<std::string, std::string>> runs;
  int idx = 0;
  for (unsigned threads : {1u, 1u, 4u}) {
    tools::RunOptions opts;
    opts.out_dir = root / ("run" + std::to_string(idx++));
    opts.verbs = tools::parse_verbs("synth,fuse,rppg,ptt,resp-ppg,flow,resp-motion,stats");
    opts.seed = 2024;
    opts.threads = threads;
    opts.config = cfg;
    const auto outcome = tools::run(opts);
    c.require(outcome.exit_code == 0, "pipeline exit " + std::to_string(outcome.exit_code));
    runs.push_back(snapshot(opts.out_dir));
  }
  set_thread_count(1);
  std::size_t differing = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    c.require(runs[r].size() == runs[0].size(), "file sets differ");
    for (const auto& [name, body] : runs[0]) {
      const auto it = runs[r].find(name);
      if (it == runs[r].end() || it->second != body) ++differing;
    }
  }
  c.require(differing == 0, std::to_string(differing) + " files differ");
  c.note(std::to_string(runs[0].size()) + " artifacts bit-identical across 2 runs at 1 thread and 1 run at 4 threads");
  fs::remove_all(root);
  return c.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {"DSP fidelity", dsp_fidelity},
      {"HR estimation", hr_estimation},
      {"rPPG recovery", rppg_recovery},
      {"Adversarial attack", adversarial_attack},
      {"Fusion robustness", fusion_robustness},
      {"Pulse transit time", pulse_transit},
      {"Respiration", respiration},
      {"Statistics", statistics},
      {"Determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
