#include <benchmark/benchmark.h>

#include "pulsekit/filter.hpp"
#include "pulsekit/fusion.hpp"
#include "pulsekit/ptt.hpp"
#include "pulsekit/respiration.hpp"
#include "pulsekit/rppg.hpp"
#include "pulsekit/spectral.hpp"
#include "pulsekit/synth.hpp"

using namespace pulsekit;

namespace {

SubjectSpec contact_subject(double duration, std::size_t sites) {
  SubjectSpec spec;
  spec.seed = 1;
  spec.duration_s = duration;
  for (std::size_t i = 0; i < sites; ++i) {
    spec.sites.push_back({"s" + std::to_string(i), 5.0 * static_cast<double>(i), {}, 1.0});
    spec.sites.back().noise.white_sigma = 0.1;
  }
  return spec;
}

void BM_FuseNineChannels(benchmark::State& state) {
  const auto subj = gen_contact_channels(contact_subject(static_cast<double>(state.range(0)), 9));
  for (auto _ : state) benchmark::DoNotOptimize(fuse(subj.channels, subj.guide));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 400 * 9);
}
BENCHMARK(BM_FuseNineChannels)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_SlidingXcorr(benchmark::State& state) {
  const auto spec = contact_subject(static_cast<double>(state.range(0)), 2);
  const auto subj = gen_contact_channels(spec);
  const auto& x = subj.channels.at("s0");
  const auto& y = subj.channels.at("s1");
  for (auto _ : state) benchmark::DoNotOptimize(sliding_xcorr_lag(x, y));
}
BENCHMARK(BM_SlidingXcorr)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_StftHr(benchmark::State& state) {
  const auto spec = contact_subject(static_cast<double>(state.range(0)), 1);
  const auto ts = clean_site_waveform(spec, spec.sites[0], 90.0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_hr_series(ts));
}
BENCHMARK(BM_StftHr)->Arg(60)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_Filtfilt(benchmark::State& state) {
  const auto spec = contact_subject(600.0, 1);
  const auto ts = clean_site_waveform(spec, spec.sites[0], 400.0);
  const auto f = butterworth_bandpass(BandpassSpec::from_bpm(40, 180, 4), 400.0);
  for (auto _ : state) benchmark::DoNotOptimize(filtfilt(f, ts));
}
BENCHMARK(BM_Filtfilt)->Unit(benchmark::kMillisecond);

void BM_Pos(benchmark::State& state) {
  auto spec = contact_subject(120.0, 1);
  const auto trace = gen_rgb_trace(spec, spec.sites[0]);
  for (auto _ : state) benchmark::DoNotOptimize(pos(trace));
}
BENCHMARK(BM_Pos)->Unit(benchmark::kMillisecond);

void BM_RespFromMotion(benchmark::State& state) {
  SubjectSpec spec;
  spec.seed = 2;
  spec.duration_s = 120.0;
  const auto m = gen_motion_matrix(spec).matrix;
  for (auto _ : state) benchmark::DoNotOptimize(resp_from_motion(m));
}
BENCHMARK(BM_RespFromMotion)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
