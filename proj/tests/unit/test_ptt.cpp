#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pulsekit/error.hpp"
#include "pulsekit/filter.hpp"
#include "pulsekit/ptt.hpp"
#include "pulsekit/stats.hpp"
#include "pulsekit/synth.hpp"

using namespace pulsekit;

namespace {

SubjectSpec two_sites(double transit_ms, double duration = 30.0, double sigma = 0.0,
                      std::uint64_t seed = 1) {
  SubjectSpec spec;
  spec.seed = seed;
  spec.duration_s = duration;
  spec.sites = {SiteSpec{"x", 0.0, {}, 1.0}, SiteSpec{"y", transit_ms, {}, 1.0}};
  for (auto& s : spec.sites) s.noise.white_sigma = sigma;
  return spec;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

LagSeries constant_series(std::vector<double> lags) {
  LagSeries s;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    s.centers.push_back(static_cast<double>(i));
    s.lag_ms.push_back(lags[i]);
    s.peak_r.push_back(0.9);
    s.valid.push_back(1);
    s.low_correlation.push_back(0);
  }
  return s;
}

}  // namespace

TEST(SlidingXcorr, ConstructedShift) {
  const auto spec = two_sites(50.0);
  const auto x = clean_site_waveform(spec, spec.sites[0], 400.0);
  const auto y = clean_site_waveform(spec, spec.sites[1], 400.0);
  PttConfig cfg;
  const auto refined = sliding_xcorr_lag(x, y, cfg);
  ASSERT_GT(refined.size(), 100u);
  for (std::size_t i = 0; i < refined.size(); ++i) {
    EXPECT_NEAR(refined.lag_ms[i], 50.0, 0.5);
    EXPECT_LE(std::abs(refined.lag_ms[i]), 300.0);
  }
  cfg.subsample = false;
  const auto coarse = sliding_xcorr_lag(x, y, cfg);
  for (double l : coarse.lag_ms) EXPECT_NEAR(l, 50.0, 2.5);
}

TEST(SlidingXcorr, FractionalShiftNeedsRefinement) {
  const auto spec = two_sites(51.3);
  const auto x = clean_site_waveform(spec, spec.sites[0], 400.0);
  const auto y = clean_site_waveform(spec, spec.sites[1], 400.0);
  PttConfig cfg;
  cfg.subsample = false;
  const auto coarse = sliding_xcorr_lag(x, y, cfg);
  cfg.subsample = true;
  const auto fine = sliding_xcorr_lag(x, y, cfg);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    EXPECT_NEAR(fine.lag_ms[i], 51.3, 0.5);
    // Refinement stays within one sample period of the integer peak.
    EXPECT_LE(std::abs(fine.lag_ms[i] - coarse.lag_ms[i]), 2.5 + 1e-9);
  }
}

TEST(SlidingXcorr, IdenticalSignals) {
  const auto spec = two_sites(0.0, 12.0);
  const auto x = clean_site_waveform(spec, spec.sites[0], 400.0);
  const auto s = sliding_xcorr_lag(x, x);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.lag_ms[i], 0.0);
    EXPECT_NEAR(s.peak_r[i], 1.0, 1e-12);
  }
}

TEST(SlidingXcorr, NoisyTransitMedian) {
  const double sigma = (1.0 / std::sqrt(2.0)) / std::sqrt(10.0);
  const auto spec = two_sites(30.0, 60.0, sigma, 9);
  const auto subj = gen_contact_channels(spec);
  const auto band = BandpassSpec::from_bpm(40, 180, 4);
  const auto x = bandpass(subj.channels.at("x"), band);
  const auto y = bandpass(subj.channels.at("y"), band);
  const auto s = sliding_xcorr_lag(x, y);
  EXPECT_NEAR(median(s.lag_ms), 30.0, 5.0);
}

TEST(SlidingXcorr, Antisymmetry) {
  const auto spec = two_sites(37.0, 20.0, 0.1, 4);
  const auto subj = gen_contact_channels(spec);
  const auto band = BandpassSpec::from_bpm(40, 180, 4);
  const auto x = bandpass(subj.channels.at("x"), band);
  const auto y = bandpass(subj.channels.at("y"), band);
  const auto xy = sliding_xcorr_lag(x, y);
  const auto yx = sliding_xcorr_lag(y, x);
  ASSERT_EQ(xy.size(), yx.size());
  for (std::size_t i = 0; i < xy.size(); ++i) EXPECT_NEAR(xy.lag_ms[i], -yx.lag_ms[i], 0.5);
}

TEST(SlidingXcorr, AffineInvariance) {
  const auto spec = two_sites(20.0, 15.0, 0.2, 6);
  const auto subj = gen_contact_channels(spec);
  const auto& x = subj.channels.at("x");
  const auto& y = subj.channels.at("y");
  std::vector<double> y2 = y.values();
  for (auto& v : y2) v = 3.5 * v - 12.0;
  const auto a = sliding_xcorr_lag(x, y);
  const auto b = sliding_xcorr_lag(x, TimeSeries(y2, y.fs(), y.t0()));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.lag_ms[i], b.lag_ms[i], 1e-6);
}

TEST(SlidingXcorr, WindowGeometryAndGaps) {
  const double fs = 400.0;
  const std::size_t n = 4000;
  auto x = oracle::gaussian(n, 1);
  auto y = oracle::gaussian(n, 2);
  // A flat stretch longer than a window plus both lag margins.
  for (std::size_t i = 1000; i < 3400; ++i) y[i] = 0.0;
  const auto s = sliding_xcorr_lag(TimeSeries(x, fs), TimeSeries(y, fs));
  const std::size_t w = 2000, l = 120, stride = 4;
  EXPECT_EQ(s.size(), (n - w - 2 * l) / stride + 1);
  bool saw_gap = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s.valid[i]) {
      saw_gap = true;
      EXPECT_TRUE(std::isnan(s.lag_ms[i]));
    } else {
      EXPECT_GE(s.peak_r[i], -1.0);
      EXPECT_LE(s.peak_r[i], 1.0);
    }
  }
  EXPECT_TRUE(saw_gap);
}

TEST(SlidingXcorr, Errors) {
  const TimeSeries a(oracle::gaussian(4000, 1), 400.0);
  EXPECT_THROW(sliding_xcorr_lag(a, TimeSeries(oracle::gaussian(4000, 2), 90.0)), Error);
  PttConfig bad;
  bad.max_lag_s = 3.0;
  EXPECT_THROW(sliding_xcorr_lag(a, a, bad), Error);
  bad = {};
  bad.accept_lag_s = 0.4;
  EXPECT_THROW(sliding_xcorr_lag(a, a, bad), Error);
  const TimeSeries short_a(oracle::gaussian(2100, 1), 400.0);
  try {
    sliding_xcorr_lag(short_a, short_a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooShort);
  }
}

TEST(PttSummary, ConstantAndOutliers) {
  const auto flat = ptt_summary(constant_series(std::vector<double>(50, 50.0)));
  EXPECT_DOUBLE_EQ(flat.mean_ms, 50.0);
  EXPECT_DOUBLE_EQ(flat.median_ms, 50.0);
  EXPECT_DOUBLE_EQ(flat.iqr_ms, 0.0);
  EXPECT_EQ(flat.retained, 50u);

  std::vector<double> lags(100, 50.0);
  for (std::size_t i = 0; i < 100; i += 10) lags[i] = 280.0;
  const auto s = ptt_summary(constant_series(lags));
  EXPECT_DOUBLE_EQ(s.mean_ms, 50.0);
  EXPECT_EQ(s.retained, 90u);
  EXPECT_EQ(s.total, 100u);
  EXPECT_DOUBLE_EQ(s.retention, 0.9);

  try {
    ptt_summary(constant_series({250.0, -290.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AllRejected);
  }
}

TEST(PttSummary, QuartilesType7) {
  const auto s = ptt_summary(constant_series({1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_DOUBLE_EQ(s.q1_ms, 2.75);
  EXPECT_DOUBLE_EQ(s.q3_ms, 6.25);
  EXPECT_DOUBLE_EQ(s.median_ms, 4.5);
}

TEST(PttSummary, FaceArmLegOrdering) {
  SubjectSpec spec;
  spec.seed = 12;
  spec.duration_s = 60.0;
  spec.sites = {SiteSpec{"face", 0.0, {}, 1.0}, SiteSpec{"arm", 20.0, {}, 1.0},
                SiteSpec{"leg", 60.0, {}, 1.0}};
  for (auto& s : spec.sites) s.noise.white_sigma = 0.1;
  const auto subj = gen_contact_channels(spec);
  const auto band = BandpassSpec::from_bpm(40, 180, 4);
  const auto face = bandpass(subj.channels.at("face"), band);
  const auto arm = ptt_summary(sliding_xcorr_lag(face, bandpass(subj.channels.at("arm"), band)));
  const auto leg = ptt_summary(sliding_xcorr_lag(face, bandpass(subj.channels.at("leg"), band)));
  EXPECT_NEAR(arm.mean_ms, 20.0, 5.0);
  EXPECT_NEAR(leg.mean_ms, 60.0, 5.0);
  EXPECT_GT(leg.mean_ms, arm.mean_ms);
  EXPECT_NEAR(leg.mean_ms - arm.mean_ms, 40.0, 5.0);
}

TEST(SiteAnalysis, IdenticalAndDisjointGroups) {
  std::vector<double> a{3.1, 4.7, 2.2, 5.9, 4.4, 3.3, 6.1, 2.8};
  const auto same = ptt_site_analysis({{"a", a}, {"b", a}});
  EXPECT_GT(same.location.p, 0.99);
  EXPECT_FALSE(same.location.significant);
  EXPECT_EQ(same.normality.size(), 2u);
  EXPECT_DOUBLE_EQ(same.normality[0].alpha_corrected, 0.0125);

  std::vector<double> lo, hi;
  for (int i = 1; i <= 20; ++i) {
    lo.push_back(i);
    hi.push_back(i + 20);
  }
  const auto split = ptt_site_analysis({{"lo", lo}, {"hi", hi}});
  // Maximal H for two groups of 20: all of one group's ranks below the other's.
  EXPECT_NEAR(split.location.statistic, oracle::kruskal_h({lo, hi}), 1e-10);
  EXPECT_NEAR(split.location.statistic, 12.0 / (40 * 41) * (210.0 * 210 / 20 + 610.0 * 610 / 20) - 3 * 41,
              1e-10);
  EXPECT_LT(split.location.p, 1e-6);
  EXPECT_TRUE(split.location.significant);
}

TEST(SiteAnalysis, ResidualsUseTenfoldCorrection) {
  std::vector<double> a{1, 2, 3, 4, 5, 6}, b{2, 3, 4, 5, 6, 8};
  const auto rep = ptt_site_analysis({{"a", a}, {"b", b}}, {{"face_contact_vs_rppg", oracle::gaussian(30, 4)}});
  ASSERT_EQ(rep.residuals.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.residuals[0].alpha_corrected, 0.005);
  EXPECT_EQ(rep.residuals[0].significant, rep.residuals[0].p < 0.005);
}

TEST(SiteAnalysis, SymmetricResidualsRarelyReject) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> nd(0.0, 1.0);
  int rejections = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> r(30);
    for (auto& v : r) v = nd(gen);
    const auto rep = ptt_site_analysis({{"a", {1, 2, 3}}, {"b", {2, 3, 5}}}, {{"res", r}});
    rejections += rep.residuals[0].significant;
  }
  EXPECT_LE(rejections, 4);
}

TEST(SiteAnalysis, InsufficientData) {
  for (const auto& groups : std::vector<std::vector<NamedSample>>{
           {{"a", {1, 2, 3}}}, {{"a", {1, 2, 3}}, {"b", {1, 2}}}}) {
    try {
      ptt_site_analysis(groups);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InsufficientData);
    }
  }
}
