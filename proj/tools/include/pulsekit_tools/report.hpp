#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pulsekit/metrics.hpp"
#include "pulsekit/ptt.hpp"
#include "pulsekit/stats.hpp"

namespace pulsekit::tools {

struct VerbError {
  std::string verb;
  std::string code;
  std::string message;
  bool validation = false;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;
};

/// Outcome of one run. `results` maps verb name to that verb's output
/// object; keys are serialised in sorted order.
struct Report {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string subject;
  Provenance provenance;
  std::vector<std::string> verbs;
  nlohmann::json results = nlohmann::json::object();
  std::vector<VerbError> errors;
};

nlohmann::json to_json(const Report& r);
/// Throws ParseError on a schema mismatch.
Report report_from_json(const nlohmann::json& j);

void save_report(const std::filesystem::path& path, const Report& r);
Report load_report(const std::filesystem::path& path);

nlohmann::json to_json(const TestResult& t);
nlohmann::json to_json(const PttSummary& s);
nlohmann::json to_json(const HrErrors& e);
nlohmann::json to_json(const SiteAnalysisReport& r);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace pulsekit::tools
