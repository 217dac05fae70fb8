#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pulsekit/error.hpp"
#include "pulsekit/respiration.hpp"
#include "pulsekit_tools/config.hpp"
#include "pulsekit_tools/flow.hpp"
#include "pulsekit_tools/manifest.hpp"
#include "pulsekit_tools/raster.hpp"
#include "pulsekit_tools/report.hpp"
#include "pulsekit_tools/runner.hpp"

using namespace pulsekit;
using namespace pulsekit::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pulsekit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const auto p = dir / "override.json";
  std::ofstream(p) << j.dump();
  return p;
}

const nlohmann::json kShort = {{"synth", {{"duration_s", 40.0}, {"population", 8}}}};

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(PULSEKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Verbs, ParseAndOrder) {
  EXPECT_EQ(parse_verbs("stats,synth,fuse"), (std::vector<std::string>{"synth", "fuse", "stats"}));
  EXPECT_EQ(parse_verbs("ptt,rppg"), (std::vector<std::string>{"rppg", "ptt"}));
  EXPECT_THROW(parse_verbs("synth,bogus"), Error);
  EXPECT_THROW(parse_verbs(""), Error);
}

TEST(Config, DefaultsMatchDocumentedParameters) {
  const PipelineConfig c;
  EXPECT_EQ(c.fusion.window_s, 10.0);
  EXPECT_EQ(c.fusion.delta_bpm, 30.0);
  EXPECT_EQ(c.ptt.window_s, 5.0);
  EXPECT_EQ(c.ptt.stride_s, 0.010);
  EXPECT_EQ(c.ptt.max_lag_s, 0.300);
  EXPECT_EQ(c.ptt.accept_lag_s, 0.200);
  EXPECT_NEAR(c.rppg.bandpass.low_hz * 60, 40.0, 1e-12);
  EXPECT_NEAR(c.rppg.bandpass.high_hz * 60, 180.0, 1e-12);
  EXPECT_EQ(c.rppg.bandpass.order, 4);
  EXPECT_NEAR(c.resp.ppg_band.low_hz * 60, 6.0, 1e-12);
  EXPECT_NEAR(c.resp.ppg_band.high_hz * 60, 24.0, 1e-12);
  EXPECT_EQ(c.resp.ppg_band.order, 3);
}

TEST(Config, OverridesAreStrictAndRoundTrip) {
  PipelineConfig c;
  const auto before = config_hash(c);
  EXPECT_EQ(before.size(), 16u);
  apply_overrides(c, {{"ptt", {{"window_s", 4.0}}}, {"rppg", {{"method", "chrom"}}}});
  EXPECT_EQ(c.ptt.window_s, 4.0);
  EXPECT_EQ(c.rppg.method, RppgMethod::Chrom);
  EXPECT_NE(config_hash(c), before);

  PipelineConfig again;
  apply_overrides(again, to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
  EXPECT_EQ(config_hash(again), config_hash(c));

  try {
    apply_overrides(c, {{"ptt", {{"windw_s", 4.0}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
  }
  EXPECT_THROW(apply_overrides(c, {{"nonsense", 1}}), Error);
  EXPECT_THROW(apply_overrides(c, {{"ptt", {{"window_s", "five"}}}}), Error);
}

TEST(Manifest, MissingFileIsNamed) {
  const auto dir = scratch("manifest");
  std::ofstream(dir / "a.csv") << "t,x\n0,1\n0.0025,2\n";
  nlohmann::json j = {{"version", 1},
                      {"subject", "s1"},
                      {"contact", {{"fs", 400.0}, {"units", "au"}, {"sites", {{"a", "a.csv"}, {"b", "gone.csv"}}}}}};
  std::ofstream(dir / "manifest.json") << j.dump();
  try {
    load_manifest(dir / "manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoError);
    EXPECT_NE(std::string(e.what()).find("gone.csv"), std::string::npos);
  }
  EXPECT_NE(run_cli("--manifest " + (dir / "manifest.json").string() + " --verbs fuse --out " +
                    (dir / "out").string()),
            0);
  j["version"] = 7;
  std::ofstream(dir / "manifest.json") << j.dump();
  EXPECT_THROW(load_manifest(dir / "manifest.json"), Error);
}

TEST(Report, RoundTripIsLossless) {
  Report r;
  r.subject = "s";
  r.provenance = {"0123456789abcdef", 42, "0.1.0", "2026-01-01T00:00:00Z"};
  r.verbs = {"fuse", "stats"};
  r.results["stats"] = to_json(make_test_result("kruskal_wallis", 3.5, 0.1234567890123, 0.05));
  r.results["nan"] = to_json(TestResult{"x", NAN, 0.5, 0.05, false});
  r.errors.push_back({"ptt", "AllRejected", "nothing kept", false});
  const auto dir = scratch("report");
  save_report(dir / "r.json", r);
  const auto back = load_report(dir / "r.json");
  save_report(dir / "r2.json", back);
  EXPECT_EQ(slurp(dir / "r.json"), slurp(dir / "r2.json"));
  EXPECT_EQ(back.provenance.seed, 42u);
  EXPECT_EQ(back.errors.at(0).code, "AllRejected");
  EXPECT_TRUE(back.results["nan"]["statistic"].is_null());
}

TEST(Run, SynthFuseRoundTrip) {
  const auto dir = scratch("fuse");
  RunOptions opts;
  opts.out_dir = dir;
  opts.verbs = parse_verbs("synth,fuse");
  opts.seed = 4;
  opts.config = write_config(dir, kShort);
  const auto outcome = run(opts);
  ASSERT_EQ(outcome.exit_code, 0);
  EXPECT_LT(outcome.report.results["fuse"]["hr"]["errors"]["mae"].get<double>(), 0.5);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "fused.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Run, DeterministicApartFromTimestamp) {
  std::vector<std::string> reports;
  std::vector<std::string> lags;
  for (unsigned threads : {1u, 3u}) {
    const auto dir = scratch("det" + std::to_string(threads));
    RunOptions opts;
    opts.out_dir = dir;
    opts.verbs = parse_verbs("synth,fuse,rppg,ptt,resp-ppg,resp-motion,stats");
    opts.seed = 8;
    opts.threads = threads;
    opts.config = write_config(dir, kShort);
    ASSERT_EQ(run(opts).exit_code, 0);
    auto rep = load_report(dir / "report.json");
    rep.provenance.timestamp.clear();
    reports.push_back(to_json(rep).dump());
    lags.push_back(slurp(dir / "ptt_head_left_leg.csv") + slurp(dir / "fused.csv") +
                   slurp(dir / "resp_motion.csv"));
  }
  EXPECT_EQ(reports[0], reports[1]);
  EXPECT_EQ(lags[0], lags[1]);
}

TEST(Run, ManifestDrivenRerun) {
  const auto dir = scratch("rerun");
  RunOptions opts;
  opts.out_dir = dir;
  opts.verbs = parse_verbs("synth");
  opts.seed = 2;
  opts.config = write_config(dir, kShort);
  ASSERT_EQ(run(opts).exit_code, 0);

  RunOptions again;
  again.manifest = dir / "manifest.json";
  again.out_dir = dir / "second";
  again.verbs = parse_verbs("fuse,stats");
  const auto outcome = run(again);
  EXPECT_EQ(outcome.exit_code, 0);
  EXPECT_EQ(outcome.report.provenance.seed, 2u);
  EXPECT_TRUE(outcome.report.results["stats"]["location"]["significant"].get<bool>());
}

TEST(Run, ValidationErrorExitCode) {
  const auto dir = scratch("badcfg");
  RunOptions opts;
  opts.out_dir = dir;
  opts.verbs = parse_verbs("fuse");
  // No manifest and no synth: the fuse verb cannot find its inputs.
  const auto outcome = run(opts);
  EXPECT_EQ(outcome.exit_code, 2);
  EXPECT_FALSE(outcome.report.errors.empty());
  EXPECT_EQ(run_cli("--verbs synth --threads 0"), 2);
  EXPECT_EQ(run_cli("--verbs"), 2);
  EXPECT_EQ(run_cli("--verbs synth --out " + dir.string() + " --config " + (dir / "nope.json").string()), 2);
}

TEST(RateSeriesFile, RoundTrip) {
  RateSeries s;
  s.centers = {5, 6, 7, 8};
  s.rate = {71.5, 72.25, 0.0, 73.0};
  s.valid = {1, 1, 0, 1};
  const auto dir = scratch("rates");
  write_rate_series(dir / "r.csv", s);
  const auto back = read_rate_series(dir / "r.csv");
  EXPECT_EQ(back.centers, s.centers);
  EXPECT_EQ(back.rate, s.rate);
  EXPECT_EQ(back.valid, s.valid);
  EXPECT_EQ(back.hop_s, 1.0);
  const auto e = aligned_errors(s, back);
  EXPECT_EQ(e.n, 4u);
  EXPECT_EQ(e.mae, 0.0);
}

TEST(Raster, PgmRoundTripAndPpmLuma) {
  const auto dir = scratch("raster");
  Image img{3, 2, {0, 10, 20, 30, 40, 255}};
  write_pgm(dir / "a.pgm", img);
  const auto back = read_pnm(dir / "a.pgm");
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.pixels, img.pixels);

  std::ofstream(dir / "b.ppm") << "P3\n# comment\n2 1\n255\n255 0 0  0 0 255\n";
  const auto rgb = read_pnm(dir / "b.ppm");
  EXPECT_NEAR(rgb.at(0, 0), 0.299 * 255, 0.5);
  EXPECT_NEAR(rgb.at(1, 0), 0.114 * 255, 0.5);
  std::ofstream(dir / "c.pgm") << "P9\n1 1\n255\n0\n";
  EXPECT_THROW(read_pnm(dir / "c.pgm"), Error);
  EXPECT_EQ(list_frames(dir).size(), 3u);
}

TEST(Flow, ConstantTranslation) {
  std::vector<double> off;
  for (int i = 0; i < 12; ++i) off.push_back(static_cast<double>(i));
  const auto frames = render_shifted_frames(off, 64, 64);
  const auto m = vertical_flow(frames, {8, 8, 48, 48}, 30.0);
  EXPECT_EQ(m.rows(), 11u);
  for (double v : m.data()) EXPECT_NEAR(v, 1.0, 0.1);
}

TEST(Flow, StaticFramesAreZero) {
  const auto frames = render_shifted_frames(std::vector<double>(5, 0.0), 64, 64);
  const auto m = vertical_flow(frames, {8, 8, 48, 48}, 30.0);
  for (double v : m.data()) EXPECT_EQ(v, 0.0);
}

TEST(Flow, Errors) {
  auto frames = render_shifted_frames({0.0, 1.0}, 64, 64);
  frames.push_back(Image{32, 32, std::vector<double>(32 * 32, 0.0)});
  try {
    vertical_flow(frames, {8, 8, 48, 48}, 30.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FrameSizeMismatch);
  }
  EXPECT_THROW(vertical_flow(render_shifted_frames({0.0, 1.0}, 64, 64), {60, 60, 20, 20}, 30.0), Error);
}

TEST(Flow, BreathingOscillationRate) {
  const double fs = 30.0;
  std::vector<double> off;
  for (int i = 0; i < 60 * 30 + 1; ++i) off.push_back(3.0 * std::sin(2 * M_PI * 0.25 * i / fs));
  const auto m = vertical_flow(render_shifted_frames(off, 64, 64, 2.0, 1), {8, 8, 48, 48}, fs);
  const auto resp = resp_from_motion(m);
  for (double r : estimate_resp_rate(resp.waveform).rate) EXPECT_NEAR(r, 15.0, 0.5);
}
