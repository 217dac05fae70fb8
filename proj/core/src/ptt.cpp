#include "pulsekit/ptt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pulsekit/error.hpp"
#include "pulsekit/parallel.hpp"

namespace pulsekit {

namespace {

// Windows are processed in fixed-size chunks so that prefix sums always start
// at the same place, whatever the thread count.
constexpr std::size_t kChunkWindows = 1024;

double global_variance(std::span<const double> v) {
  const double mu = mean(v);
  long double ss = 0.0L;
  for (double s : v) ss += static_cast<long double>(s - mu) * (s - mu);
  return static_cast<double>(ss / static_cast<long double>(v.size()));
}

std::vector<long double> prefix(std::span<const double> v, std::size_t begin, std::size_t end,
                                bool squared) {
  std::vector<long double> p(end - begin + 1, 0.0L);
  for (std::size_t i = begin; i < end; ++i) {
    const long double s = v[i];
    p[i - begin + 1] = p[i - begin] + (squared ? s * s : s);
  }
  return p;
}

}  // namespace

LagSeries sliding_xcorr_lag(const TimeSeries& x, const TimeSeries& y, const PttConfig& cfg,
                            std::string site_x, std::string site_y) {
  if (!same_rate(x.fs(), y.fs())) fail(Errc::InvalidArgument, "PTT inputs differ in sampling rate");
  const double fs = x.fs();
  if (std::abs(x.t0() - y.t0()) > 0.5 / fs)
    fail(Errc::InvalidArgument, "PTT inputs are not time aligned");
  if (!(cfg.window_s > 0) || !(cfg.stride_s > 0) || !(cfg.max_lag_s >= 0))
    fail(Errc::InvalidArgument, "PTT window, stride and max lag must be positive");
  if (cfg.max_lag_s >= cfg.window_s / 2) fail(Errc::InvalidArgument, "max lag must be under half a window");
  if (cfg.accept_lag_s > cfg.max_lag_s) fail(Errc::InvalidArgument, "accept lag exceeds max lag");

  const auto width = static_cast<std::size_t>(std::llround(cfg.window_s * fs));
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.stride_s * fs)));
  const auto max_lag = static_cast<std::size_t>(std::llround(cfg.max_lag_s * fs));
  const std::size_t n = std::min(x.size(), y.size());
  if (width < 2) fail(Errc::InvalidArgument, "PTT window shorter than two samples");
  if (n < width + 2 * max_lag) fail(Errc::TooShort, "signals shorter than one PTT window plus lag margins");

  const std::size_t first = max_lag;
  const std::size_t count = (n - width - 2 * max_lag) / stride + 1;
  const std::size_t nlags = 2 * max_lag + 1;
  const auto xs = x.samples();
  const auto ys = y.samples();
  const double x_floor = 1e-12 * global_variance(xs.subspan(0, n));
  const double y_floor = 1e-12 * global_variance(ys.subspan(0, n));
  const long double w = static_cast<long double>(width);

  LagSeries out;
  out.site_x = std::move(site_x);
  out.site_y = std::move(site_y);
  out.centers.resize(count);
  out.lag_ms.assign(count, std::numeric_limits<double>::quiet_NaN());
  out.peak_r.assign(count, std::numeric_limits<double>::quiet_NaN());
  out.valid.assign(count, 0);
  out.low_correlation.assign(count, 0);

  const std::size_t chunks = (count + kChunkWindows - 1) / kChunkWindows;
  parallel_for(chunks, [&](std::size_t c_begin, std::size_t c_end) {
    for (std::size_t c = c_begin; c < c_end; ++c) {
      const std::size_t w0 = c * kChunkWindows;
      const std::size_t w1 = std::min(count, w0 + kChunkWindows);
      const std::size_t xb = first + w0 * stride;
      const std::size_t xe = first + (w1 - 1) * stride + width;
      const std::size_t yb = xb - max_lag;
      const std::size_t ye = xe + max_lag;
      const auto px = prefix(xs, xb, xe, false);
      const auto pxx = prefix(xs, xb, xe, true);
      const auto py = prefix(ys, yb, ye, false);
      const auto pyy = prefix(ys, yb, ye, true);

      const std::size_t m = w1 - w0;
      std::vector<long double> sx(m), vx(m);
      std::vector<double> best_r(m, -std::numeric_limits<double>::infinity());
      std::vector<double> prev_r(m, std::numeric_limits<double>::quiet_NaN());
      std::vector<double> r_minus(m, std::numeric_limits<double>::quiet_NaN());
      std::vector<double> r_plus(m, std::numeric_limits<double>::quiet_NaN());
      std::vector<std::size_t> best_k(m, nlags);
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t o = j * stride;
        sx[j] = px[o + width] - px[o];
        vx[j] = (pxx[o + width] - pxx[o]) - sx[j] * sx[j] / w;
      }

      std::vector<long double> pxy(xe - xb + 1);
      for (std::size_t k = 0; k < nlags; ++k) {
        // y index of x[xb] at this lag is xb + k - max_lag = yb + k.
        pxy[0] = 0.0L;
        for (std::size_t i = 0; i + xb < xe; ++i)
          pxy[i + 1] = pxy[i] + static_cast<long double>(xs[xb + i]) * ys[yb + k + i];
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t o = j * stride;
          double r = std::numeric_limits<double>::quiet_NaN();
          const long double sy = py[o + k + width] - py[o + k];
          const long double vy = (pyy[o + k + width] - pyy[o + k]) - sy * sy / w;
          if (vx[j] / w > x_floor && vy / w > y_floor && vx[j] > 0 && vy > 0) {
            const long double cov = (pxy[o + width] - pxy[o]) - sx[j] * sy / w;
            r = std::clamp(static_cast<double>(cov / std::sqrt(vx[j] * vy)), -1.0, 1.0);
          }
          if (best_k[j] + 1 == k) r_plus[j] = r;
          if (!std::isnan(r) && r > best_r[j]) {
            best_r[j] = r;
            best_k[j] = k;
            r_minus[j] = prev_r[j];
            r_plus[j] = std::numeric_limits<double>::quiet_NaN();
          }
          prev_r[j] = r;
        }
      }

      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t wi = w0 + j;
        const std::size_t start = first + wi * stride;
        out.centers[wi] = x.t0() + (static_cast<double>(start) + 0.5 * static_cast<double>(width - 1)) / fs;
        if (best_k[j] == nlags) continue;
        double delta = 0.0;
        if (cfg.subsample && best_k[j] > 0 && best_k[j] + 1 < nlags && !std::isnan(r_minus[j]) &&
            !std::isnan(r_plus[j])) {
          const double denom = r_minus[j] - 2.0 * best_r[j] + r_plus[j];
          if (denom < 0.0) delta = std::clamp(0.5 * (r_minus[j] - r_plus[j]) / denom, -0.5, 0.5);
        }
        const double lag = static_cast<double>(best_k[j]) - static_cast<double>(max_lag) + delta;
        out.lag_ms[wi] = 1000.0 * lag / fs;
        out.peak_r[wi] = best_r[j];
        out.valid[wi] = 1;
        out.low_correlation[wi] = best_r[j] < cfg.min_peak_r ? 1 : 0;
      }
    }
  });
  return out;
}

namespace {

// Linear interpolation between closest ranks (type 7).
double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

PttSummary ptt_summary(const LagSeries& series, const PttConfig& cfg) {
  PttSummary s;
  s.site_x = series.site_x;
  s.site_y = series.site_y;
  s.total = series.size();
  const double limit = cfg.accept_lag_s * 1000.0 * (1.0 + 1e-12);
  std::vector<double> kept;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.valid[i] && std::abs(series.lag_ms[i]) <= limit) kept.push_back(series.lag_ms[i]);
  if (kept.empty()) fail(Errc::AllRejected, "no PTT window within the accepted lag range");
  std::sort(kept.begin(), kept.end());
  long double sum = 0.0L;
  for (double v : kept) sum += v;
  s.mean_ms = static_cast<double>(sum / static_cast<long double>(kept.size()));
  s.median_ms = quantile_sorted(kept, 0.5);
  s.q1_ms = quantile_sorted(kept, 0.25);
  s.q3_ms = quantile_sorted(kept, 0.75);
  s.iqr_ms = s.q3_ms - s.q1_ms;
  s.retained = kept.size();
  s.retention = static_cast<double>(kept.size()) / static_cast<double>(s.total);
  return s;
}

SiteAnalysisReport ptt_site_analysis(const std::vector<NamedSample>& groups,
                                     const std::vector<NamedSample>& residuals,
                                     const SiteAnalysisConfig& cfg) {
  if (groups.size() < 2) fail(Errc::InsufficientData, "site analysis needs at least two groups");
  for (const auto& g : groups)
    if (g.values.size() < 3)
      fail(Errc::InsufficientData, "group '" + g.name + "' has fewer than 3 subjects");
  for (const auto& r : residuals)
    if (r.values.size() < 3)
      fail(Errc::InsufficientData, "residual set '" + r.name + "' has fewer than 3 values");

  SiteAnalysisReport rep;
  std::vector<std::vector<double>> values;
  const double a_norm = bonferroni(cfg.alpha, cfg.normality_family);
  for (const auto& g : groups) {
    auto t = shapiro_wilk(g.values, a_norm);
    t.name = "shapiro_wilk:" + g.name;
    rep.normality.push_back(std::move(t));
    values.push_back(g.values);
  }
  rep.equal_variance = bartlett(values, cfg.alpha);
  rep.location = kruskal_wallis(values, cfg.alpha);

  const double a_res = bonferroni(cfg.alpha, cfg.residual_family);
  for (const auto& r : residuals) {
    std::vector<double> centred(r.values);
    const double mu = mean(centred);
    for (double& v : centred) v -= mu;
    auto t = wilcoxon_signed_rank(centred, a_res);
    t.name = "wilcoxon_signed_rank:" + r.name;
    rep.residuals.push_back(std::move(t));
  }
  return rep;
}

}  // namespace pulsekit
