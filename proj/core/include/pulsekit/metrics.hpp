#pragma once

#include <span>

#include "pulsekit/signal.hpp"
#include "pulsekit/spectral.hpp"

namespace pulsekit {

struct HrErrors {
  double me = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
};

/// Mean, mean absolute and root-mean-square of pred - truth.
HrErrors hr_errors(std::span<const double> truth, std::span<const double> pred);

/// Window-aligned version: centres must agree to within half a hop.
/// Throws MisalignedSeries otherwise.
HrErrors hr_errors(const HrSeries& truth, const HrSeries& pred);

/// Pearson r between two equally sampled, equal-length waveforms.
double waveform_corr(const TimeSeries& a, const TimeSeries& b);

struct MxCorr {
  double r_max = 0.0;
  /// Positive when b lags a: b(t) ~ a(t - lag).
  double lag_s = 0.0;
};

/// Largest Pearson r over integer-sample lags within +-max_lag_s, computed
/// on the overlapping part of the two signals at each lag.
MxCorr mxcorr(const TimeSeries& a, const TimeSeries& b, double max_lag_s = 1.0);

struct HrErrorReport {
  double me = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double r_wave = 0.0;
  double mxcorr = 0.0;
  double mxcorr_lag_s = 0.0;
  std::size_t n_windows = 0;
};

HrErrorReport evaluate(const HrSeries& truth_hr, const HrSeries& pred_hr,
                       const TimeSeries& truth_wave, const TimeSeries& pred_wave,
                       double max_lag_s = 1.0);

}  // namespace pulsekit
