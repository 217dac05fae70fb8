#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pulsekit_tools/flow.hpp"

namespace pulsekit::tools {

/// Describes one recording. Paths are stored as written in the file and
/// resolved against the manifest's directory.
struct Manifest {
  static constexpr int kVersion = 1;

  struct Contact {
    double fs = 0.0;
    std::string units = "a.u.";
    std::map<std::string, std::string> sites;
  };
  struct Rgb {
    double fs = 0.0;
    std::map<std::string, std::string> sites;
  };
  struct Motion {
    double fs = 0.0;
    std::string path;
  };
  struct Frames {
    std::string dir;
    Bbox bbox;
    double fs = 0.0;
  };

  int version = kVersion;
  std::string subject;
  std::optional<std::uint64_t> seed;
  std::optional<Contact> contact;
  std::optional<std::string> guide;
  std::optional<Rgb> rgb;
  std::optional<Motion> motion;
  std::optional<std::string> truth_hr;
  std::optional<std::string> truth_resp;
  std::optional<Frames> frames;
  std::vector<std::pair<std::string, std::string>> contact_pairs;
  std::vector<std::pair<std::string, std::string>> rppg_pairs;
  std::optional<std::string> stats_input;
  nlohmann::json config = nlohmann::json::object();

  std::filesystem::path base_dir;
  std::filesystem::path resolve(const std::string& p) const { return base_dir / p; }
};

/// Parses and validates a manifest: the version must match, every referenced
/// file or directory must exist (IoError names the missing path), and site
/// pairs must name declared sites.
Manifest load_manifest(const std::filesystem::path& path);

nlohmann::json to_json(const Manifest& m);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace pulsekit::tools
