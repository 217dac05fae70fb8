#include "pulsekit_tools/config.hpp"

#include <algorithm>
#include <cstdio>

#include "pulsekit/error.hpp"

namespace pulsekit::tools {

using nlohmann::json;

namespace {

json band_json(const BandpassSpec& b) {
  return {{"low_hz", b.low_hz}, {"high_hz", b.high_hz}, {"order", b.order}};
}

json rate_json(const RateEstimatorConfig& r) {
  return {{"window_s", r.window_s},           {"hop_s", r.hop_s},
          {"band_low_hz", r.band_low_hz},     {"band_high_hz", r.band_high_hz},
          {"resolution_hz", r.resolution_hz}, {"min_peak_fraction", r.min_peak_fraction}};
}

json sites_json(const std::vector<SynthSite>& sites) {
  json a = json::array();
  for (const auto& s : sites) a.push_back({{"name", s.name}, {"transit_ms", s.transit_ms}});
  return a;
}

// Reads the keys of one section, rejecting anything not listed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) fail(Errc::ParseError, "config section '" + name_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& field) {
    seen_.push_back(key);
    if (!j_.contains(key)) return;
    try {
      j_.at(key).get_to(field);
    } catch (const json::exception& e) {
      fail(Errc::ParseError, "config " + name_ + "." + key + ": " + e.what());
    }
  }
  const json* sub(const char* key) {
    seen_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end())
        fail(Errc::ParseError, "unknown config key " + name_ + "." + k);
  }

 private:
  const json& j_;
  std::string name_;
  std::vector<std::string> seen_;
};

void read_band(const json& j, const std::string& name, BandpassSpec& b) {
  Section s(j, name);
  s.get("low_hz", b.low_hz);
  s.get("high_hz", b.high_hz);
  s.get("order", b.order);
  s.finish();
}

void read_rate(const json& j, const std::string& name, RateEstimatorConfig& r) {
  Section s(j, name);
  s.get("window_s", r.window_s);
  s.get("hop_s", r.hop_s);
  s.get("band_low_hz", r.band_low_hz);
  s.get("band_high_hz", r.band_high_hz);
  s.get("resolution_hz", r.resolution_hz);
  s.get("min_peak_fraction", r.min_peak_fraction);
  s.finish();
}

void read_sites(const json& j, const std::string& name, std::vector<SynthSite>& sites) {
  if (!j.is_array()) fail(Errc::ParseError, "config " + name + " must be an array");
  sites.clear();
  for (const auto& e : j) {
    SynthSite site;
    Section s(e, name);
    s.get("name", site.name);
    s.get("transit_ms", site.transit_ms);
    s.finish();
    sites.push_back(site);
  }
}

}  // namespace

json to_json(const PipelineConfig& c) {
  json j;
  j["fusion"] = {{"window_s", c.fusion.window_s},
                 {"stride", c.fusion.stride},
                 {"delta_bpm", c.fusion.delta_bpm},
                 {"filter_order", c.fusion.filter_order},
                 {"envelope_epsilon", c.fusion.envelope_epsilon},
                 {"rate_quantum_bpm", c.fusion.rate_quantum_bpm}};
  j["rate"] = rate_json(c.rate);
  j["rppg"] = {{"method", c.rppg.method == RppgMethod::Pos ? "pos" : "chrom"},
               {"window_s", c.rppg.window_s},
               {"bandpass", band_json(c.rppg.bandpass)},
               {"apply_bandpass", c.rppg.apply_bandpass}};
  j["ptt"] = {{"window_s", c.ptt.window_s},         {"stride_s", c.ptt.stride_s},
              {"max_lag_s", c.ptt.max_lag_s},       {"accept_lag_s", c.ptt.accept_lag_s},
              {"subsample", c.ptt.subsample},       {"min_peak_r", c.ptt.min_peak_r},
              {"prefilter", band_json(c.ptt_prefilter)}};
  j["resp"] = {{"ppg_band", band_json(c.resp.ppg_band)},
               {"snr_low_bpm", c.resp.snr_low_bpm},
               {"snr_high_bpm", c.resp.snr_high_bpm},
               {"n_components", c.resp.n_components},
               {"zca_relative_epsilon", c.resp.zca.relative_epsilon},
               {"zca_max_deficient_fraction", c.resp.zca.max_deficient_fraction},
               {"min_output_snr", c.resp.min_output_snr}};
  j["resp_rate"] = rate_json(c.resp_rate);
  j["stats"] = {{"alpha", c.stats.alpha},
                {"normality_family", c.stats.normality_family},
                {"residual_family", c.stats.residual_family}};
  j["flow"] = {{"max_shift_px", c.flow.max_shift_px}};
  const auto& s = c.synth;
  j["synth"] = {{"duration_s", s.duration_s},
                {"hr_start_bpm", s.hr_start_bpm},
                {"hr_end_bpm", s.hr_end_bpm},
                {"resp_start_bpm", s.resp_start_bpm},
                {"resp_end_bpm", s.resp_end_bpm},
                {"contact_fs", s.contact_fs},
                {"video_fs", s.video_fs},
                {"guide_fs", s.guide_fs},
                {"motion_fs", s.motion_fs},
                {"resp_am_depth", s.resp_am_depth},
                {"resp_baseline", s.resp_baseline},
                {"white_sigma", s.white_sigma},
                {"guide_jitter_bpm", s.guide_jitter_bpm},
                {"pulse_strength", s.pulse_strength},
                {"rgb_noise_snr_db", s.rgb_noise_snr_db ? json(*s.rgb_noise_snr_db) : json(nullptr)},
                {"motion_noise_sigma", s.motion_noise_sigma},
                {"render_frames", s.render_frames},
                {"frame_width", s.frame_width},
                {"frame_height", s.frame_height},
                {"frame_amplitude_px", s.frame_amplitude_px},
                {"frame_noise_sigma", s.frame_noise_sigma},
                {"population", s.population},
                {"contact_sites", sites_json(s.contact_sites)},
                {"rgb_sites", sites_json(s.rgb_sites)}};
  return j;
}

void apply_overrides(PipelineConfig& c, const json& o) {
  if (o.is_null()) return;
  Section root(o, "config");
  if (auto* j = root.sub("fusion")) {
    Section s(*j, "fusion");
    s.get("window_s", c.fusion.window_s);
    s.get("stride", c.fusion.stride);
    s.get("delta_bpm", c.fusion.delta_bpm);
    s.get("filter_order", c.fusion.filter_order);
    s.get("envelope_epsilon", c.fusion.envelope_epsilon);
    s.get("rate_quantum_bpm", c.fusion.rate_quantum_bpm);
    s.finish();
  }
  if (auto* j = root.sub("rate")) read_rate(*j, "rate", c.rate);
  if (auto* j = root.sub("rppg")) {
    Section s(*j, "rppg");
    std::string method = c.rppg.method == RppgMethod::Pos ? "pos" : "chrom";
    s.get("method", method);
    if (method == "pos") c.rppg.method = RppgMethod::Pos;
    else if (method == "chrom") c.rppg.method = RppgMethod::Chrom;
    else fail(Errc::ParseError, "rppg.method must be 'pos' or 'chrom'");
    s.get("window_s", c.rppg.window_s);
    if (auto* b = s.sub("bandpass")) read_band(*b, "rppg.bandpass", c.rppg.bandpass);
    s.get("apply_bandpass", c.rppg.apply_bandpass);
    s.finish();
  }
  if (auto* j = root.sub("ptt")) {
    Section s(*j, "ptt");
    s.get("window_s", c.ptt.window_s);
    s.get("stride_s", c.ptt.stride_s);
    s.get("max_lag_s", c.ptt.max_lag_s);
    s.get("accept_lag_s", c.ptt.accept_lag_s);
    s.get("subsample", c.ptt.subsample);
    s.get("min_peak_r", c.ptt.min_peak_r);
    if (auto* b = s.sub("prefilter")) read_band(*b, "ptt.prefilter", c.ptt_prefilter);
    s.finish();
  }
  if (auto* j = root.sub("resp")) {
    Section s(*j, "resp");
    if (auto* b = s.sub("ppg_band")) read_band(*b, "resp.ppg_band", c.resp.ppg_band);
    s.get("snr_low_bpm", c.resp.snr_low_bpm);
    s.get("snr_high_bpm", c.resp.snr_high_bpm);
    s.get("n_components", c.resp.n_components);
    s.get("zca_relative_epsilon", c.resp.zca.relative_epsilon);
    s.get("zca_max_deficient_fraction", c.resp.zca.max_deficient_fraction);
    s.get("min_output_snr", c.resp.min_output_snr);
    s.finish();
  }
  if (auto* j = root.sub("resp_rate")) read_rate(*j, "resp_rate", c.resp_rate);
  if (auto* j = root.sub("stats")) {
    Section s(*j, "stats");
    s.get("alpha", c.stats.alpha);
    s.get("normality_family", c.stats.normality_family);
    s.get("residual_family", c.stats.residual_family);
    s.finish();
  }
  if (auto* j = root.sub("flow")) {
    Section s(*j, "flow");
    s.get("max_shift_px", c.flow.max_shift_px);
    s.finish();
  }
  if (auto* j = root.sub("synth")) {
    auto& y = c.synth;
    Section s(*j, "synth");
    s.get("duration_s", y.duration_s);
    s.get("hr_start_bpm", y.hr_start_bpm);
    s.get("hr_end_bpm", y.hr_end_bpm);
    s.get("resp_start_bpm", y.resp_start_bpm);
    s.get("resp_end_bpm", y.resp_end_bpm);
    s.get("contact_fs", y.contact_fs);
    s.get("video_fs", y.video_fs);
    s.get("guide_fs", y.guide_fs);
    s.get("motion_fs", y.motion_fs);
    s.get("resp_am_depth", y.resp_am_depth);
    s.get("resp_baseline", y.resp_baseline);
    s.get("white_sigma", y.white_sigma);
    s.get("guide_jitter_bpm", y.guide_jitter_bpm);
    s.get("pulse_strength", y.pulse_strength);
    if (auto* v = s.sub("rgb_noise_snr_db")) {
      if (v->is_null()) y.rgb_noise_snr_db.reset();
      else if (v->is_number()) y.rgb_noise_snr_db = v->get<double>();
      else fail(Errc::ParseError, "synth.rgb_noise_snr_db must be a number or null");
    }
    s.get("motion_noise_sigma", y.motion_noise_sigma);
    s.get("render_frames", y.render_frames);
    s.get("frame_width", y.frame_width);
    s.get("frame_height", y.frame_height);
    s.get("frame_amplitude_px", y.frame_amplitude_px);
    s.get("frame_noise_sigma", y.frame_noise_sigma);
    s.get("population", y.population);
    if (auto* v = s.sub("contact_sites")) read_sites(*v, "synth.contact_sites", y.contact_sites);
    if (auto* v = s.sub("rgb_sites")) read_sites(*v, "synth.rgb_sites", y.rgb_sites);
    s.finish();
  }
  root.finish();
}

std::string config_hash(const PipelineConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pulsekit::tools
