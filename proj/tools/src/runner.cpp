#include "pulsekit_tools/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "pulsekit/error.hpp"
#include "pulsekit/filter.hpp"
#include "pulsekit/metrics.hpp"
#include "pulsekit/parallel.hpp"
#include "pulsekit/ptt.hpp"
#include "pulsekit/respiration.hpp"
#include "pulsekit/rppg.hpp"
#include "pulsekit/signal_io.hpp"
#include "pulsekit/synth.hpp"
#include "pulsekit_tools/flow.hpp"
#include "pulsekit_tools/manifest.hpp"
#include "pulsekit_tools/raster.hpp"

#ifndef PULSEKIT_VERSION
#define PULSEKIT_VERSION "0.0.0"
#endif

namespace pulsekit::tools {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<std::string> parse_verbs(const std::string& list) {
  std::vector<std::string> requested;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    auto v = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    v.erase(0, v.find_first_not_of(" \t"));
    v.erase(v.find_last_not_of(" \t") + 1);
    if (!v.empty()) {
      const auto& order = verb_order();
      if (std::find(order.begin(), order.end(), v) == order.end())
        fail(Errc::InvalidArgument, "unknown verb '" + v + "'");
      requested.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (requested.empty()) fail(Errc::InvalidArgument, "no verbs requested");
  std::vector<std::string> out;
  for (const auto& v : verb_order())
    if (std::find(requested.begin(), requested.end(), v) != requested.end()) out.push_back(v);
  return out;
}

void write_rate_series(const fs::path& path, const RateSeries& s) {
  CsvTable t{{"center_s", "rate", "valid"}, {s.centers, s.rate, {}}};
  for (auto v : s.valid) t.columns[2].push_back(v);
  write_csv_table(path, t);
}

RateSeries read_rate_series(const fs::path& path) {
  const auto t = read_csv_table(path);
  if (t.header != std::vector<std::string>{"center_s", "rate", "valid"})
    fail(Errc::ParseError, path.string() + ": expected header center_s,rate,valid");
  RateSeries s;
  s.centers = t.columns[0];
  s.rate = t.columns[1];
  for (double v : t.columns[2]) s.valid.push_back(v != 0.0 ? 1 : 0);
  if (s.centers.size() >= 2) {
    std::vector<double> d;
    for (std::size_t i = 1; i < s.centers.size(); ++i) d.push_back(s.centers[i] - s.centers[i - 1]);
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    s.hop_s = d[d.size() / 2];
  }
  return s;
}

GuideRate read_guide(const fs::path& path) {
  const auto t = read_csv_table(path);
  if (t.header != std::vector<std::string>{"t", "bpm"})
    fail(Errc::ParseError, path.string() + ": expected header t,bpm");
  return GuideRate(t.columns[0], t.columns[1]);
}

void write_guide(const fs::path& path, const GuideRate& g) {
  write_csv_table(path, CsvTable{{"t", "bpm"}, {g.t(), g.bpm()}});
}

HrErrors aligned_errors(const RateSeries& truth, const RateSeries& estimate) {
  const double tol = 0.5 * std::max(truth.hop_s, estimate.hop_s) + 1e-9;
  std::vector<double> a, b;
  std::size_t j = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    while (j < truth.size() && truth.centers[j] < estimate.centers[i] - tol) ++j;
    if (j < truth.size() && std::abs(truth.centers[j] - estimate.centers[i]) <= tol) {
      a.push_back(truth.rate[j]);
      b.push_back(estimate.rate[i]);
    }
  }
  if (a.empty()) fail(Errc::MisalignedSeries, "no estimate window lines up with the truth series");
  return hr_errors(a, b);
}

namespace {

double valid_fraction(const RateSeries& s) {
  if (s.size() == 0) return 0.0;
  return static_cast<double>(std::count(s.valid.begin(), s.valid.end(), 1)) / static_cast<double>(s.size());
}

RateProfile profile(double start, double end, double duration) {
  return start == end ? RateProfile::constant(start) : RateProfile::linear(start, end, duration);
}

void write_series(const fs::path& path, const TimeSeries& ts, const std::string& name) {
  write_time_series(path, ts, name);
}

/// Common time span of two equally sampled series, nearest-sample aligned.
std::pair<TimeSeries, TimeSeries> overlap(const TimeSeries& a, const TimeSeries& b) {
  const double fs = a.fs();
  const auto shift = static_cast<long>(std::lround((b.t0() - a.t0()) * fs));
  const long a0 = std::max(0L, shift);
  const long b0 = std::max(0L, -shift);
  const long n = std::min(static_cast<long>(a.size()) - a0, static_cast<long>(b.size()) - b0);
  if (n < 2) fail(Errc::MisalignedSeries, "waveforms do not overlap in time");
  auto slice = [n](const TimeSeries& s, long off) {
    std::vector<double> v(s.values().begin() + off, s.values().begin() + off + n);
    return TimeSeries(std::move(v), s.fs(), s.time_at(static_cast<std::size_t>(off)));
  };
  return {slice(a, a0), slice(b, b0)};
}

class Runner {
 public:
  Runner(const RunOptions& opts, PipelineConfig cfg, std::optional<Manifest> manifest, std::uint64_t seed)
      : opts_(opts), cfg_(std::move(cfg)), manifest_(std::move(manifest)), seed_(seed) {}

  json run_verb(const std::string& verb) {
    if (verb == "synth") return synth();
    if (verb == "fuse") return fuse_verb();
    if (verb == "rppg") return rppg_verb();
    if (verb == "ptt") return ptt_verb();
    if (verb == "resp-ppg") return resp_ppg_verb();
    if (verb == "flow") return flow_verb();
    if (verb == "resp-motion") return resp_motion_verb();
    if (verb == "stats") return stats_verb();
    fail(Errc::InvalidArgument, "unknown verb '" + verb + "'");
  }

  std::vector<VerbError>& soft_errors() { return soft_errors_; }
  const std::optional<Manifest>& manifest() const { return manifest_; }

 private:
  fs::path out(const std::string& name) const { return opts_.out_dir / name; }

  const Manifest& need_manifest() const {
    if (!manifest_) fail(Errc::InvalidArgument, "no manifest: pass --manifest or run the synth verb first");
    return *manifest_;
  }

  const ChannelSet& contact() {
    if (!contact_) {
      const auto& m = need_manifest();
      if (!m.contact) fail(Errc::InvalidArgument, "manifest has no contact section");
      ChannelSet set;
      for (const auto& [name, p] : m.contact->sites) set.add(name, read_time_series(m.resolve(p), m.contact->fs));
      contact_ = std::move(set);
    }
    return *contact_;
  }

  std::optional<RateSeries> truth(bool resp) const {
    const auto& m = need_manifest();
    const auto& p = resp ? m.truth_resp : m.truth_hr;
    if (!p) return std::nullopt;
    return read_rate_series(m.resolve(*p));
  }

  json rate_summary(const RateSeries& s, const std::optional<RateSeries>& truth) const {
    json j = {{"windows", s.size()}, {"valid_fraction", valid_fraction(s)}};
    if (truth) j["errors"] = to_json(aligned_errors(*truth, s));
    return j;
  }

  json synth() {
    const auto& sc = cfg_.synth;
    fs::create_directories(opts_.out_dir);
    SubjectSpec spec;
    spec.hr = profile(sc.hr_start_bpm, sc.hr_end_bpm, sc.duration_s);
    spec.resp = profile(sc.resp_start_bpm, sc.resp_end_bpm, sc.duration_s);
    spec.seed = seed_;
    spec.duration_s = sc.duration_s;
    spec.contact_fs = sc.contact_fs;
    spec.video_fs = sc.video_fs;
    spec.guide_fs = sc.guide_fs;
    spec.motion_fs = sc.motion_fs;
    spec.resp_am_depth = sc.resp_am_depth;
    spec.resp_baseline = sc.resp_baseline;
    spec.guide_jitter_bpm = sc.guide_jitter_bpm;
    for (const auto& s : sc.contact_sites) spec.sites.push_back({s.name, s.transit_ms, {sc.white_sigma, {}, 0.0, 0.05}, 1.0});

    Manifest m;
    m.subject = "synthetic-" + std::to_string(seed_);
    m.seed = seed_;
    m.base_dir = opts_.out_dir;
    std::size_t files = 0;

    const auto subject = gen_contact_channels(spec);
    Manifest::Contact contact{sc.contact_fs, "a.u.", {}};
    for (const auto& [name, ts] : subject.channels) {
      const std::string file = "contact_" + name + ".csv";
      write_series(out(file), ts, name);
      contact.sites[name] = file;
      ++files;
    }
    m.contact = contact;
    write_guide(out("guide.csv"), subject.guide);
    write_rate_series(out("truth_hr.csv"), subject.truth);
    m.guide = "guide.csv";
    m.truth_hr = "truth_hr.csv";
    files += 2;

    Manifest::Rgb rgb{sc.video_fs, {}};
    for (const auto& s : sc.rgb_sites) {
      RgbOptions o;
      o.pulse_strength = sc.pulse_strength;
      o.noise_snr_db = sc.rgb_noise_snr_db;
      const auto trace = gen_rgb_trace(spec, SiteSpec{s.name, s.transit_ms, {}, 1.0}, o);
      const std::string file = "rgb_" + s.name + ".csv";
      write_rgb_trace(out(file), trace);
      rgb.sites[s.name] = file;
      ++files;
    }
    m.rgb = rgb;

    MotionSpec ms;
    ms.noise_sigma = sc.motion_noise_sigma;
    const auto motion = gen_motion_matrix(spec, ms);
    write_motion_matrix(out("motion.csv"), motion.matrix);
    write_rate_series(out("truth_resp.csv"), motion.truth);
    m.motion = Manifest::Motion{sc.motion_fs, "motion.csv"};
    m.truth_resp = "truth_resp.csv";
    files += 2;

    if (sc.render_frames) {
      const auto n = static_cast<std::size_t>(std::llround(sc.duration_s * sc.motion_fs));
      std::vector<double> offsets(n);
      for (std::size_t k = 0; k < n; ++k)
        offsets[k] = sc.frame_amplitude_px *
                     std::sin(2.0 * std::numbers::pi * spec.resp.cycles(static_cast<double>(k) / sc.motion_fs));
      fs::create_directories(out("frames"));
      const auto frames = render_shifted_frames(offsets, sc.frame_width, sc.frame_height, sc.frame_noise_sigma, seed_);
      for (std::size_t k = 0; k < frames.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu.pgm", k);
        write_pgm(out("frames") / name, frames[k]);
      }
      files += frames.size();
      m.frames = Manifest::Frames{"frames", Bbox{8, 8, sc.frame_width - 16, sc.frame_height - 16}, sc.motion_fs};
    }

    auto reference = [](const std::vector<SynthSite>& sites) {
      return std::min_element(sites.begin(), sites.end(),
                              [](const auto& a, const auto& b) { return a.transit_ms < b.transit_ms; });
    };
    if (!sc.contact_sites.empty()) {
      const auto ref = reference(sc.contact_sites);
      for (const auto& s : sc.contact_sites)
        if (s.name != ref->name) m.contact_pairs.emplace_back(ref->name, s.name);
    }
    json groups = json::object();
    json residuals = json::object();
    if (!sc.rgb_sites.empty()) {
      const auto ref = reference(sc.rgb_sites);
      for (const auto& s : sc.rgb_sites) {
        if (s.name == ref->name) continue;
        m.rppg_pairs.emplace_back(ref->name, s.name);
        const CounterRng rng(seed_, "population/" + s.name);
        const CounterRng res(seed_, "residual/" + s.name);
        json vals = json::array(), rvals = json::array();
        for (std::size_t i = 0; i < sc.population; ++i) {
          vals.push_back(s.transit_ms - ref->transit_ms + 5.0 * rng.normal(i));
          rvals.push_back(3.0 * res.normal(i));
        }
        groups[ref->name + "_to_" + s.name] = vals;
        residuals[s.name + "_contact_vs_rppg"] = rvals;
      }
    }
    {
      std::ofstream f(out("ptt_groups.json"));
      f << json{{"groups", groups}, {"residuals", residuals}}.dump(2) << '\n';
      m.stats_input = "ptt_groups.json";
      ++files;
    }

    m.config = to_json(cfg_);
    save_manifest(out("manifest.json"), m);
    manifest_ = load_manifest(out("manifest.json"));
    contact_.reset();
    return {{"manifest", "manifest.json"}, {"files", files + 1}, {"subject", m.subject}};
  }

  json fuse_verb() {
    const auto& m = need_manifest();
    if (!m.guide) fail(Errc::InvalidArgument, "manifest has no guide rate");
    const auto guide = read_guide(m.resolve(*m.guide));
    fused_ = fuse(contact(), guide, cfg_.fusion);
    write_series(out("fused.csv"), *fused_, "fused");
    const auto hr = estimate_rate_series(*fused_, cfg_.rate);
    write_rate_series(out("fused_hr.csv"), hr);
    json j = {{"samples", fused_->size()}, {"fs", fused_->fs()}, {"t0", fused_->t0()},
              {"channels", contact().names()}, {"hr", rate_summary(hr, truth(false))}};
    return j;
  }

  json rppg_verb() {
    const auto& m = need_manifest();
    if (!m.rgb) fail(Errc::InvalidArgument, "manifest has no rgb section");
    json j = json::object();
    const auto t = truth(false);
    for (const auto& [site, p] : m.rgb->sites) {
      const auto trace = read_rgb_trace(m.resolve(p), m.rgb->fs);
      auto pulse = extract_pulse(trace, cfg_.rppg);
      write_series(out("rppg_" + site + ".csv"), pulse, "pulse");
      const auto hr = estimate_rate_series(pulse, cfg_.rate);
      write_rate_series(out("rppg_" + site + "_hr.csv"), hr);
      json r = {{"method", cfg_.rppg.method == RppgMethod::Pos ? "pos" : "chrom"}, {"hr", rate_summary(hr, t)}};
      if (fused_) {
        const auto [ref, est] = overlap(resample(*fused_, pulse.fs()), pulse);
        const auto mx = mxcorr(ref, est, 1.0);
        r["r_wave"] = waveform_corr(ref, est);
        r["mxcorr"] = mx.r_max;
        r["mxcorr_lag_s"] = mx.lag_s;
      }
      rppg_.insert_or_assign(site, std::move(pulse));
      j[site] = r;
    }
    return j;
  }

  json ptt_pair(const TimeSeries& x, const TimeSeries& y, const std::string& xn, const std::string& yn,
                const std::string& file) {
    const auto lags = sliding_xcorr_lag(x, y, cfg_.ptt, xn, yn);
    CsvTable t{{"center_s", "lag_ms", "peak_r"}, {lags.centers, lags.lag_ms, lags.peak_r}};
    // Gap windows keep NaN lag and r.
    write_csv_table(out(file), t);
    json j;
    try {
      j = to_json(ptt_summary(lags, cfg_.ptt));
    } catch (const Error& e) {
      soft_errors_.push_back({"ptt", std::string(to_string(e.code())), e.what(), is_validation_error(e.code())});
      j = {{"x", xn}, {"y", yn}, {"error", e.what()}};
    }
    j["file"] = file;
    j["gaps"] = std::count(lags.valid.begin(), lags.valid.end(), 0);
    j["low_correlation"] = std::count(lags.low_correlation.begin(), lags.low_correlation.end(), 1);
    return j;
  }

  json ptt_verb() {
    const auto& m = need_manifest();
    json j = {{"contact", json::array()}, {"rppg", json::array()}};
    std::map<std::string, TimeSeries> filtered;
    auto contact_site = [&](const std::string& name) -> const TimeSeries& {
      auto it = filtered.find(name);
      if (it == filtered.end()) it = filtered.emplace(name, bandpass(contact().at(name), cfg_.ptt_prefilter)).first;
      return it->second;
    };
    for (const auto& [x, y] : m.contact_pairs)
      j["contact"].push_back(ptt_pair(contact_site(x), contact_site(y), x, y, "ptt_" + x + "_" + y + ".csv"));
    for (const auto& [x, y] : m.rppg_pairs) {
      for (const auto& s : {x, y}) {
        if (rppg_.count(s)) continue;
        rppg_.insert_or_assign(s, extract_pulse(read_rgb_trace(m.resolve(m.rgb->sites.at(s)), m.rgb->fs), cfg_.rppg));
      }
      const auto& xs = rppg_.at(x);
      const auto& ys = rppg_.at(y);
      const auto xf = cfg_.rppg.apply_bandpass ? xs : bandpass(xs, cfg_.ptt_prefilter);
      const auto yf = cfg_.rppg.apply_bandpass ? ys : bandpass(ys, cfg_.ptt_prefilter);
      j["rppg"].push_back(ptt_pair(xf, yf, x, y, "ptt_rppg_" + x + "_" + y + ".csv"));
    }
    return j;
  }

  json resp_ppg_verb() {
    const auto res = resp_from_ppg(contact(), cfg_.resp);
    write_series(out("resp_ppg.csv"), res.waveform, "resp");
    const auto rate = estimate_rate_series(res.waveform, cfg_.resp_rate);
    write_rate_series(out("resp_ppg_rate.csv"), rate);
    return {{"used", res.used}, {"skipped", res.skipped}, {"rate", rate_summary(rate, truth(true))}};
  }

  json flow_verb() {
    const auto& m = need_manifest();
    if (!m.frames) fail(Errc::InvalidArgument, "manifest has no frames section");
    flow_ = vertical_flow(m.resolve(m.frames->dir), m.frames->bbox, m.frames->fs, cfg_.flow);
    write_motion_matrix(out("motion_flow.csv"), *flow_);
    return {{"rows", flow_->rows()}, {"file", "motion_flow.csv"}};
  }

  json resp_motion_verb() {
    const auto& m = need_manifest();
    std::optional<MotionMatrix> mm;
    std::string source;
    if (flow_) {
      mm = *flow_;
      source = "flow";
    } else if (m.motion) {
      mm = read_motion_matrix(m.resolve(m.motion->path), m.motion->fs);
      source = m.motion->path;
    } else {
      fail(Errc::InvalidArgument, "no motion matrix: add a motion section or run the flow verb");
    }
    const auto res = resp_from_motion(*mm, cfg_.resp);
    write_series(out("resp_motion.csv"), res.waveform, "resp");
    const auto rate = estimate_rate_series(res.waveform, cfg_.resp_rate);
    write_rate_series(out("resp_motion_rate.csv"), rate);
    return {{"source", source},
            {"components", res.components},
            {"component_snr", res.component_snr},
            {"output_snr", res.output_snr},
            {"low_confidence", res.low_confidence},
            {"below_epsilon", res.below_epsilon},
            {"rate", rate_summary(rate, truth(true))}};
  }

  json stats_verb() {
    const auto& m = need_manifest();
    if (!m.stats_input) fail(Errc::InvalidArgument, "manifest has no stats input");
    const auto path = m.resolve(*m.stats_input);
    std::ifstream in(path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail(Errc::ParseError, path.string() + ": " + e.what());
    }
    auto read = [&](const char* key) {
      std::vector<NamedSample> out;
      if (!j.contains(key)) return out;
      try {
        for (const auto& [name, v] : j.at(key).items()) out.push_back({name, v.get<std::vector<double>>()});
      } catch (const json::exception& e) {
        fail(Errc::ParseError, path.string() + ": " + e.what());
      }
      return out;
    };
    return to_json(ptt_site_analysis(read("groups"), read("residuals"), cfg_.stats));
  }

  const RunOptions& opts_;
  PipelineConfig cfg_;
  std::optional<Manifest> manifest_;
  std::uint64_t seed_;
  std::optional<ChannelSet> contact_;
  std::optional<TimeSeries> fused_;
  std::map<std::string, TimeSeries> rppg_;
  std::optional<MotionMatrix> flow_;
  std::vector<VerbError> soft_errors_;
};

}  // namespace

RunOutcome run(const RunOptions& opts) {
  set_thread_count(opts.threads == 0 ? 1 : opts.threads);
  std::optional<Manifest> manifest;
  if (opts.manifest) manifest = load_manifest(*opts.manifest);

  PipelineConfig cfg;
  if (manifest) apply_overrides(cfg, manifest->config);
  if (opts.config) {
    std::ifstream in(*opts.config);
    if (!in) fail(Errc::IoError, "cannot open config '" + opts.config->string() + "'");
    try {
      apply_overrides(cfg, json::parse(in));
    } catch (const json::exception& e) {
      fail(Errc::ParseError, opts.config->string() + ": " + e.what());
    }
  }
  const std::uint64_t seed = opts.seed ? *opts.seed : (manifest && manifest->seed ? *manifest->seed : 0);
  fs::create_directories(opts.out_dir);

  Report report;
  report.verbs = opts.verbs;
  report.provenance = {config_hash(cfg), seed, PULSEKIT_VERSION, utc_timestamp()};

  Runner runner(opts, cfg, std::move(manifest), seed);
  for (const auto& verb : opts.verbs) {
    try {
      report.results[verb] = runner.run_verb(verb);
    } catch (const Error& e) {
      report.errors.push_back({verb, std::string(to_string(e.code())), e.what(), is_validation_error(e.code())});
    } catch (const std::exception& e) {
      report.errors.push_back({verb, "Internal", e.what(), false});
    }
  }
  for (auto& e : runner.soft_errors()) report.errors.push_back(std::move(e));
  report.subject = runner.manifest() ? runner.manifest()->subject : std::string();

  save_report(opts.out_dir / "report.json", report);
  RunOutcome outcome{std::move(report), 0};
  for (const auto& e : outcome.report.errors) {
    if (e.validation) {
      outcome.exit_code = 2;
      break;
    }
    outcome.exit_code = 3;
  }
  return outcome;
}

}  // namespace pulsekit::tools
