#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pulsekit/signal.hpp"
#include "pulsekit/stats.hpp"

namespace pulsekit {

struct PttConfig {
  double window_s = 5.0;
  double stride_s = 0.010;
  double max_lag_s = 0.300;
  /// Summary keeps windows with |lag| <= accept_lag_s.
  double accept_lag_s = 0.200;
  /// Parabolic refinement of the correlation peak.
  bool subsample = true;
  /// Windows whose peak r falls below this are flagged (not dropped).
  double min_peak_r = 0.3;
};

/// Per-window transit time between two sites. lag_ms > 0 means the second
/// site lags the first: y(t) ~ x(t - lag).
struct LagSeries {
  std::string site_x;
  std::string site_y;
  std::vector<double> centers;
  std::vector<double> lag_ms;
  std::vector<double> peak_r;
  /// 0 where a window had zero variance (lag and r are NaN there).
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> low_correlation;

  std::size_t size() const noexcept { return centers.size(); }
};

/// Sliding Pearson cross-correlation. For every window position the lag in
/// [-max_lag, +max_lag] maximising r between the x window and the shifted y
/// window is reported. Inputs must share the sampling rate and start time
/// and should already be bandpassed.
LagSeries sliding_xcorr_lag(const TimeSeries& x, const TimeSeries& y, const PttConfig& cfg = {},
                            std::string site_x = "x", std::string site_y = "y");

struct PttSummary {
  std::string site_x;
  std::string site_y;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double q1_ms = 0.0;
  double q3_ms = 0.0;
  double iqr_ms = 0.0;
  std::size_t retained = 0;
  std::size_t total = 0;
  double retention = 0.0;
};

/// Statistics over valid windows with |lag| <= accept_lag. Throws
/// AllRejected when nothing survives.
PttSummary ptt_summary(const LagSeries& series, const PttConfig& cfg = {});

/// Per-subject values for a site-difference analysis.
struct NamedSample {
  std::string name;
  std::vector<double> values;
};

struct SiteAnalysisConfig {
  double alpha = 0.05;
  /// Bonferroni family sizes for the normality and residual tests.
  int normality_family = 4;
  int residual_family = 10;
};

struct SiteAnalysisReport {
  std::vector<TestResult> normality;  // one Shapiro-Wilk per group
  TestResult equal_variance;          // Bartlett across groups
  TestResult location;                // Kruskal-Wallis across groups
  std::vector<TestResult> residuals;  // Wilcoxon per residual set
};

/// Shapiro-Wilk per group, Bartlett and Kruskal-Wallis across groups, and
/// a signed-rank test on each zero-centred residual set. Needs >= 2 groups
/// of >= 3 subjects; throws InsufficientData otherwise.
SiteAnalysisReport ptt_site_analysis(const std::vector<NamedSample>& groups,
                                     const std::vector<NamedSample>& residuals = {},
                                     const SiteAnalysisConfig& cfg = {});

}  // namespace pulsekit
