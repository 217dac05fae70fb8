#include "pulsekit_tools/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "pulsekit/error.hpp"

namespace pulsekit::tools {

using nlohmann::json;

namespace {

// JSON has no NaN; non-finite numbers become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const TestResult& t) {
  return {{"name", t.name},
          {"statistic", number(t.statistic)},
          {"p", number(t.p)},
          {"alpha_corrected", t.alpha_corrected},
          {"significant", t.significant}};
}

json to_json(const PttSummary& s) {
  return {{"x", s.site_x},           {"y", s.site_y},       {"mean_ms", s.mean_ms},
          {"median_ms", s.median_ms}, {"q1_ms", s.q1_ms},     {"q3_ms", s.q3_ms},
          {"iqr_ms", s.iqr_ms},      {"retained", s.retained}, {"total", s.total},
          {"retention", s.retention}};
}

json to_json(const HrErrors& e) {
  return {{"me", e.me}, {"mae", e.mae}, {"rmse", e.rmse}, {"n", e.n}};
}

json to_json(const SiteAnalysisReport& r) {
  json j;
  j["normality"] = json::array();
  for (const auto& t : r.normality) j["normality"].push_back(to_json(t));
  j["equal_variance"] = to_json(r.equal_variance);
  j["location"] = to_json(r.location);
  j["residuals"] = json::array();
  for (const auto& t : r.residuals) j["residuals"].push_back(to_json(t));
  return j;
}

json to_json(const Report& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["subject"] = r.subject;
  j["provenance"] = {{"config_hash", r.provenance.config_hash},
                     {"seed", r.provenance.seed},
                     {"tool_version", r.provenance.tool_version},
                     {"timestamp", r.provenance.timestamp}};
  j["verbs"] = r.verbs;
  j["results"] = r.results;
  j["errors"] = json::array();
  for (const auto& e : r.errors)
    j["errors"].push_back({{"verb", e.verb}, {"code", e.code}, {"message", e.message}, {"validation", e.validation}});
  return j;
}

Report report_from_json(const json& j) {
  try {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != Report::kSchemaVersion)
      fail(Errc::ParseError, "unsupported report schema " + std::to_string(r.schema_version));
    r.subject = j.at("subject").get<std::string>();
    const auto& p = j.at("provenance");
    r.provenance = {p.at("config_hash").get<std::string>(), p.at("seed").get<std::uint64_t>(),
                    p.at("tool_version").get<std::string>(), p.at("timestamp").get<std::string>()};
    r.verbs = j.at("verbs").get<std::vector<std::string>>();
    r.results = j.at("results");
    for (const auto& e : j.at("errors"))
      r.errors.push_back({e.at("verb").get<std::string>(), e.at("code").get<std::string>(),
                          e.at("message").get<std::string>(), e.at("validation").get<bool>()});
    return r;
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("malformed report: ") + e.what());
  }
}

void save_report(const std::filesystem::path& path, const Report& r) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  out << to_json(r).dump(2) << '\n';
}

Report load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open '" + path.string() + "'");
  try {
    return report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    fail(Errc::ParseError, path.string() + ": " + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pulsekit::tools
