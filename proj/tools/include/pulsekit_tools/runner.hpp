#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pulsekit/fusion.hpp"
#include "pulsekit/spectral.hpp"
#include "pulsekit_tools/config.hpp"
#include "pulsekit_tools/report.hpp"

namespace pulsekit::tools {

/// All verbs in the order they execute.
inline const std::vector<std::string>& verb_order() {
  static const std::vector<std::string> order{"synth", "fuse",  "rppg",        "ptt",
                                              "resp-ppg", "flow", "resp-motion", "stats"};
  return order;
}

/// Parses a comma-separated verb list, drops duplicates and sorts it into
/// execution order. Unknown names throw InvalidArgument.
std::vector<std::string> parse_verbs(const std::string& list);

struct RunOptions {
  std::optional<std::filesystem::path> manifest;
  std::filesystem::path out_dir = ".";
  std::vector<std::string> verbs;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::optional<std::filesystem::path> config;
};

struct RunOutcome {
  Report report;
  /// 0 success, 2 validation error, 3 numerical error.
  int exit_code = 0;
};

/// Executes the verbs and writes report.json into out_dir. Manifest and
/// config loading errors propagate; per-verb failures are recorded in the
/// report and later verbs still run.
RunOutcome run(const RunOptions& opts);

/// Rate series files: `center_s,rate,valid`.
void write_rate_series(const std::filesystem::path& path, const RateSeries& s);
RateSeries read_rate_series(const std::filesystem::path& path);

/// Guide files: `t,bpm`.
GuideRate read_guide(const std::filesystem::path& path);
void write_guide(const std::filesystem::path& path, const GuideRate& g);

/// Windows of `estimate` whose centre lies within half a hop of a `truth`
/// window, paired in order. Throws MisalignedSeries when none match.
HrErrors aligned_errors(const RateSeries& truth, const RateSeries& estimate);

}  // namespace pulsekit::tools
