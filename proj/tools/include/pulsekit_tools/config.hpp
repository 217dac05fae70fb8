#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pulsekit/filter.hpp"
#include "pulsekit/fusion.hpp"
#include "pulsekit/ptt.hpp"
#include "pulsekit/respiration.hpp"
#include "pulsekit/rppg.hpp"
#include "pulsekit/spectral.hpp"
#include "pulsekit_tools/flow.hpp"

namespace pulsekit::tools {

struct SynthSite {
  std::string name;
  double transit_ms = 0.0;
};

/// Parameters of the subject written by the `synth` verb.
struct SynthScenario {
  double duration_s = 60.0;
  double hr_start_bpm = 72.0;
  double hr_end_bpm = 72.0;
  double resp_start_bpm = 15.0;
  double resp_end_bpm = 15.0;
  double contact_fs = 400.0;
  double video_fs = 90.0;
  double guide_fs = 60.0;
  double motion_fs = 30.0;
  double resp_am_depth = 0.3;
  double resp_baseline = 0.3;
  double white_sigma = 0.1;
  double guide_jitter_bpm = 1.0;
  double pulse_strength = 0.005;
  std::optional<double> rgb_noise_snr_db;
  double motion_noise_sigma = 0.1;
  bool render_frames = false;
  std::size_t frame_width = 64;
  std::size_t frame_height = 64;
  double frame_amplitude_px = 3.0;
  /// Gaussian sensor noise in grey levels.
  double frame_noise_sigma = 2.0;
  /// Subjects per group in the synthetic PTT population for `stats`.
  std::size_t population = 20;
  std::vector<SynthSite> contact_sites{{"head", 0},       {"neck", 5},        {"chest", 10},
                                       {"left_arm", 20},  {"right_arm", 20},  {"left_hand", 35},
                                       {"right_hand", 35}, {"left_leg", 60},  {"right_leg", 60}};
  std::vector<SynthSite> rgb_sites{{"face", 0}, {"arm", 20}, {"leg", 60}};
};

/// Every tunable of the runner, defaulting to the published parameters.
struct PipelineConfig {
  FusionConfig fusion;
  RateEstimatorConfig rate = pulse_rate_config();
  RppgConfig rppg;
  PttConfig ptt;
  BandpassSpec ptt_prefilter = BandpassSpec::from_bpm(40.0, 180.0, 4);
  RespConfig resp;
  RateEstimatorConfig resp_rate = resp_rate_config();
  SiteAnalysisConfig stats;
  FlowConfig flow;
  SynthScenario synth;
};

nlohmann::json to_json(const PipelineConfig& cfg);

/// Applies the keys present in `overrides` on top of `cfg`. Unknown
/// sections or keys throw ParseError.
void apply_overrides(PipelineConfig& cfg, const nlohmann::json& overrides);

/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace pulsekit::tools
