#include <iostream>

#include "CLI11.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit_tools/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pulsekit: multi-site pulse, transit-time and respiration pipelines"};
  std::string manifest, config, verbs;
  std::string out = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto* manifest_opt = app.add_option("--manifest", manifest, "Recording manifest (JSON)");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--verbs", verbs,
                 "Comma-separated subset of synth,fuse,rppg,ptt,resp-ppg,resp-motion,stats,flow")
      ->required();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for synth (overrides the manifest seed)");
  app.add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 1024u));
  auto* config_opt = app.add_option("--config", config, "JSON overriding pipeline defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  pulsekit::tools::RunOptions opts;
  opts.out_dir = out;
  opts.threads = threads;
  if (*manifest_opt) opts.manifest = manifest;
  if (*config_opt) opts.config = config;
  if (*seed_opt) opts.seed = seed;

  try {
    opts.verbs = pulsekit::tools::parse_verbs(verbs);
    const auto outcome = pulsekit::tools::run(opts);
    for (const auto& e : outcome.report.errors) std::cerr << e.verb << ": " << e.message << '\n';
    return outcome.exit_code;
  } catch (const pulsekit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pulsekit::is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
