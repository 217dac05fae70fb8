#include "pulsekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pulsekit/error.hpp"
#include "pulsekit/parallel.hpp"
#include "pulsekit/stats.hpp"

namespace pulsekit {

HrErrors hr_errors(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) fail(Errc::MisalignedSeries, "rate series differ in length");
  if (truth.empty()) fail(Errc::MisalignedSeries, "rate series are empty");
  double sum = 0.0, abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = pred[i] - truth[i];
    sum += e;
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(truth.size());
  return {sum / n, abs_sum / n, std::sqrt(sq_sum / n), truth.size()};
}

HrErrors hr_errors(const HrSeries& truth, const HrSeries& pred) {
  if (truth.size() != pred.size()) fail(Errc::MisalignedSeries, "rate series differ in length");
  const double hop = std::max(truth.hop_s, pred.hop_s);
  const double tol = hop > 0.0 ? 0.5 * hop : 1e-9;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (std::abs(truth.centers[i] - pred.centers[i]) > tol)
      fail(Errc::MisalignedSeries, "window centres differ by more than half a hop");
  return hr_errors(truth.rate, pred.rate);
}

double waveform_corr(const TimeSeries& a, const TimeSeries& b) {
  if (!same_rate(a.fs(), b.fs()) || a.size() != b.size())
    fail(Errc::MisalignedSeries, "waveforms differ in rate or length");
  return pearson(a.samples(), b.samples());
}

MxCorr mxcorr(const TimeSeries& a, const TimeSeries& b, double max_lag_s) {
  if (!same_rate(a.fs(), b.fs())) fail(Errc::MisalignedSeries, "waveforms differ in rate");
  if (!(max_lag_s >= 0.0)) fail(Errc::InvalidArgument, "max lag must be >= 0");
  const auto xa = a.samples();
  const auto xb = b.samples();
  const auto na = static_cast<std::ptrdiff_t>(xa.size());
  const auto nb = static_cast<std::ptrdiff_t>(xb.size());
  const auto lag = static_cast<std::ptrdiff_t>(std::llround(max_lag_s * a.fs()));
  const std::size_t nlags = static_cast<std::size_t>(2 * lag + 1);

  std::vector<double> r(nlags, std::numeric_limits<double>::quiet_NaN());
  parallel_for(nlags, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j) - lag;
      // Pairs a[i], b[i + k].
      const std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, -k);
      const std::ptrdiff_t i1 = std::min(na, nb - k);
      if (i1 - i0 < 2) continue;
      try {
        r[j] = pearson(xa.subspan(static_cast<std::size_t>(i0), static_cast<std::size_t>(i1 - i0)),
                       xb.subspan(static_cast<std::size_t>(i0 + k), static_cast<std::size_t>(i1 - i0)));
      } catch (const Error&) {
      }
    }
  });

  MxCorr best{-std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t j = 0; j < nlags; ++j) {
    if (std::isnan(r[j])) continue;
    const double lag_s = static_cast<double>(static_cast<std::ptrdiff_t>(j) - lag) / a.fs();
    // Ties go to the smallest |lag|.
    if (r[j] > best.r_max || (r[j] == best.r_max && std::abs(lag_s) < std::abs(best.lag_s)))
      best = {r[j], lag_s};
  }
  if (std::isinf(best.r_max)) fail(Errc::ZeroVariance, "no lag with non-constant overlap");
  return best;
}

HrErrorReport evaluate(const HrSeries& truth_hr, const HrSeries& pred_hr,
                       const TimeSeries& truth_wave, const TimeSeries& pred_wave,
                       double max_lag_s) {
  const auto e = hr_errors(truth_hr, pred_hr);
  const auto m = mxcorr(truth_wave, pred_wave, max_lag_s);
  HrErrorReport rep;
  rep.me = e.me;
  rep.mae = e.mae;
  rep.rmse = e.rmse;
  rep.n_windows = e.n;
  rep.r_wave = waveform_corr(truth_wave, pred_wave);
  rep.mxcorr = m.r_max;
  rep.mxcorr_lag_s = m.lag_s;
  return rep;
}

}  // namespace pulsekit
