#include "pulsekit_tools/manifest.hpp"

#include <fstream>

#include "pulsekit/error.hpp"

namespace pulsekit::tools {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) fail(Errc::ParseError, ctx + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::ParseError, ctx + "." + key + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> read_pairs(const json& j, const std::string& ctx) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!j.is_array()) fail(Errc::ParseError, ctx + " must be an array of [x, y] pairs");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      fail(Errc::ParseError, ctx + " entries must be [x, y] string pairs");
    out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return out;
}

json pairs_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
  json a = json::array();
  for (const auto& [x, y] : pairs) a.push_back({x, y});
  return a;
}

void require_path(const Manifest& m, const std::string& p, bool directory = false) {
  const auto full = m.resolve(p);
  const bool ok = directory ? std::filesystem::is_directory(full) : std::filesystem::is_regular_file(full);
  if (!ok) fail(Errc::IoError, "manifest references missing " + std::string(directory ? "directory" : "file") +
                                   " '" + full.string() + "'");
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open manifest '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, path.string() + ": " + e.what());
  }
  if (!j.is_object()) fail(Errc::ParseError, path.string() + ": manifest must be a JSON object");
  const std::string ctx = "manifest";

  Manifest m;
  m.base_dir = path.parent_path();
  m.version = field<int>(j, "version", ctx);
  if (m.version != Manifest::kVersion)
    fail(Errc::ParseError, "unsupported manifest version " + std::to_string(m.version));
  m.subject = j.value("subject", std::string());
  if (j.contains("seed")) m.seed = field<std::uint64_t>(j, "seed", ctx);

  if (j.contains("contact")) {
    const auto& c = j.at("contact");
    Manifest::Contact contact;
    contact.fs = field<double>(c, "fs", "contact");
    contact.units = c.value("units", std::string("a.u."));
    contact.sites = field<std::map<std::string, std::string>>(c, "sites", "contact");
    if (contact.sites.empty()) fail(Errc::ParseError, "contact.sites is empty");
    m.contact = contact;
  }
  if (j.contains("guide")) m.guide = field<std::string>(j.at("guide"), "path", "guide");
  if (j.contains("rgb")) {
    const auto& c = j.at("rgb");
    m.rgb = Manifest::Rgb{field<double>(c, "fs", "rgb"), field<std::map<std::string, std::string>>(c, "sites", "rgb")};
  }
  if (j.contains("motion")) {
    const auto& c = j.at("motion");
    m.motion = Manifest::Motion{field<double>(c, "fs", "motion"), field<std::string>(c, "path", "motion")};
  }
  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    if (t.contains("hr")) m.truth_hr = field<std::string>(t, "hr", "truth");
    if (t.contains("resp")) m.truth_resp = field<std::string>(t, "resp", "truth");
  }
  if (j.contains("frames")) {
    const auto& f = j.at("frames");
    Manifest::Frames frames;
    frames.dir = field<std::string>(f, "dir", "frames");
    frames.fs = field<double>(f, "fs", "frames");
    const auto box = field<std::vector<std::size_t>>(f, "bbox", "frames");
    if (box.size() != 4) fail(Errc::ParseError, "frames.bbox must be [x, y, width, height]");
    frames.bbox = {box[0], box[1], box[2], box[3]};
    m.frames = frames;
  }
  if (j.contains("ptt")) {
    const auto& p = j.at("ptt");
    if (p.contains("contact_pairs")) m.contact_pairs = read_pairs(p.at("contact_pairs"), "ptt.contact_pairs");
    if (p.contains("rppg_pairs")) m.rppg_pairs = read_pairs(p.at("rppg_pairs"), "ptt.rppg_pairs");
  }
  if (j.contains("stats")) m.stats_input = field<std::string>(j.at("stats"), "input", "stats");
  if (j.contains("config")) m.config = j.at("config");

  for (const auto& [name, p] : m.contact ? m.contact->sites : std::map<std::string, std::string>{})
    require_path(m, p);
  if (m.rgb)
    for (const auto& [name, p] : m.rgb->sites) require_path(m, p);
  if (m.guide) require_path(m, *m.guide);
  if (m.motion) require_path(m, m.motion->path);
  if (m.truth_hr) require_path(m, *m.truth_hr);
  if (m.truth_resp) require_path(m, *m.truth_resp);
  if (m.frames) require_path(m, m.frames->dir, true);
  if (m.stats_input) require_path(m, *m.stats_input);

  for (const auto& [x, y] : m.contact_pairs)
    if (!m.contact || !m.contact->sites.count(x) || !m.contact->sites.count(y))
      fail(Errc::ParseError, "ptt.contact_pairs names unknown site in (" + x + ", " + y + ")");
  for (const auto& [x, y] : m.rppg_pairs)
    if (!m.rgb || !m.rgb->sites.count(x) || !m.rgb->sites.count(y))
      fail(Errc::ParseError, "ptt.rppg_pairs names unknown site in (" + x + ", " + y + ")");
  return m;
}

json to_json(const Manifest& m) {
  json j;
  j["version"] = m.version;
  j["subject"] = m.subject;
  if (m.seed) j["seed"] = *m.seed;
  if (m.contact) j["contact"] = {{"fs", m.contact->fs}, {"units", m.contact->units}, {"sites", m.contact->sites}};
  if (m.guide) j["guide"] = {{"path", *m.guide}};
  if (m.rgb) j["rgb"] = {{"fs", m.rgb->fs}, {"sites", m.rgb->sites}};
  if (m.motion) j["motion"] = {{"fs", m.motion->fs}, {"path", m.motion->path}};
  if (m.truth_hr || m.truth_resp) {
    json t = json::object();
    if (m.truth_hr) t["hr"] = *m.truth_hr;
    if (m.truth_resp) t["resp"] = *m.truth_resp;
    j["truth"] = t;
  }
  if (m.frames) {
    const auto& b = m.frames->bbox;
    j["frames"] = {{"dir", m.frames->dir}, {"fs", m.frames->fs}, {"bbox", {b.x, b.y, b.width, b.height}}};
  }
  if (!m.contact_pairs.empty() || !m.rppg_pairs.empty())
    j["ptt"] = {{"contact_pairs", pairs_json(m.contact_pairs)}, {"rppg_pairs", pairs_json(m.rppg_pairs)}};
  if (m.stats_input) j["stats"] = {{"input", *m.stats_input}};
  j["config"] = m.config;
  return j;
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  out << to_json(m).dump(2) << '\n';
}

}  // namespace pulsekit::tools
