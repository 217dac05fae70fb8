#include "pulsekit/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "pulsekit/error.hpp"

namespace pulsekit {

TestResult make_test_result(std::string name, double statistic, double p, double alpha) {
  TestResult r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.p = std::clamp(p, 0.0, 1.0);
  r.alpha_corrected = alpha;
  r.significant = r.p < alpha;
  return r;
}

double bonferroni(double alpha, int m) {
  if (m < 1) fail(Errc::InvalidArgument, "Bonferroni family size must be >= 1");
  return alpha / static_cast<double>(m);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(Errc::InvalidArgument, "pearson inputs differ in length");
  if (x.size() < 2) fail(Errc::SampleTooSmall, "pearson needs at least two pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) fail(Errc::ZeroVariance, "pearson input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Sum over tie groups of (t^3 - t).
double tie_term(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    sum += t * t * t - t;
    i = j + 1;
  }
  return sum;
}

double poly(const double* c, int nord, double x) {
  double ret = c[0];
  if (nord == 1) return ret;
  double p = x * c[nord - 1];
  for (int j = nord - 2; j > 0; --j) p = (p + c[j]) * x;
  return ret + p;
}

}  // namespace

double chi_square_sf(double x, double df) {
  if (!(df > 0.0)) fail(Errc::InvalidArgument, "chi-square df must be > 0");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double normal_sf(double z) { return 0.5 * boost::math::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

TestResult shapiro_wilk(std::span<const double> data, double alpha) {
  const std::size_t n = data.size();
  if (n < 3) fail(Errc::SampleTooSmall, "Shapiro-Wilk needs at least 3 values");
  if (n > 5000) fail(Errc::InvalidArgument, "Shapiro-Wilk supports at most 5000 values");

  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (range < 1e-19) fail(Errc::AllTied, "Shapiro-Wilk input has zero range");

  static constexpr double g[2] = {-2.273, 0.459};
  static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[3] = {-0.4803, -0.082676, 0.0030302};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half);  // a[0] pairs with the extremes
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    const double an25 = an + 0.25;
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - a[0] / ssumm2;
    std::size_t first_scaled = 1;
    double fac = 0.0;
    if (n > 5) {
      first_scaled = 2;
      const double a2 = -a[1] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] /= -fac;
  }

  // Antisymmetric coefficient per order statistic.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t mirror = n - 1 - i;
    if (i < mirror) coef[i] = -a[i];
    else if (i > mirror) coef[i] = a[mirror];
  }

  double sa = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += coef[i];
    sx += x[i] / range;
  }
  sa /= an;
  sx /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef[i] - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  // 1 - W, formed to avoid cancellation when W is close to 1.
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  double pw = 1.0;
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6/pi
    constexpr double stqr = 1.04719755119660;  // pi/3
    pw = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return make_test_result("shapiro_wilk", w, pw, alpha);
  }
  double y = std::log(w1);
  const double lxx = std::log(an);
  double m = 0.0, s = 1.0;
  if (n <= 11) {
    const double gamma = poly(g, 2, an);
    if (y >= gamma) return make_test_result("shapiro_wilk", w, 1e-99, alpha);
    y = -std::log(gamma - y);
    m = poly(c3, 4, an);
    s = std::exp(poly(c4, 4, an));
  } else {
    m = poly(c5, 4, lxx);
    s = std::exp(poly(c6, 3, lxx));
  }
  pw = normal_sf((y - m) / s);
  return make_test_result("shapiro_wilk", w, pw, alpha);
}

TestResult bartlett(const std::vector<std::vector<double>>& groups, double alpha) {
  const std::size_t k = groups.size();
  if (k < 2) fail(Errc::SampleTooSmall, "Bartlett's test needs at least two groups");
  double total = 0.0, pooled = 0.0, sum_log = 0.0, sum_inv = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) fail(Errc::SampleTooSmall, "Bartlett's test needs >= 2 values per group");
    const double ni = static_cast<double>(g.size());
    const double mu = std::accumulate(g.begin(), g.end(), 0.0) / ni;
    double ss = 0.0;
    for (double v : g) ss += (v - mu) * (v - mu);
    const double var = ss / (ni - 1.0);
    if (!(var > 0.0)) fail(Errc::AllTied, "Bartlett's test group has zero variance");
    total += ni;
    pooled += ss;
    sum_log += (ni - 1.0) * std::log(var);
    sum_inv += 1.0 / (ni - 1.0);
  }
  const double kk = static_cast<double>(k);
  const double sp = pooled / (total - kk);
  const double num = (total - kk) * std::log(sp) - sum_log;
  const double den = 1.0 + (sum_inv - 1.0 / (total - kk)) / (3.0 * (kk - 1.0));
  const double stat = num / den;
  return make_test_result("bartlett", stat, chi_square_sf(stat, kk - 1.0), alpha);
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha) {
  if (groups.size() < 2) fail(Errc::SampleTooSmall, "Kruskal-Wallis needs at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) fail(Errc::SampleTooSmall, "Kruskal-Wallis group is empty");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double n = static_cast<double>(pooled.size());
  const auto ranks = midranks(pooled);
  double h = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) r += ranks[offset + i];
    offset += g.size();
    h += r * r / static_cast<double>(g.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
  const double correction = 1.0 - tie_term(pooled) / (n * n * n - n);
  if (!(correction > 0.0)) fail(Errc::AllTied, "Kruskal-Wallis input is all tied");
  h = std::max(0.0, h / correction);
  const double df = static_cast<double>(groups.size() - 1);
  return make_test_result("kruskal_wallis", h, chi_square_sf(h, df), alpha);
}

TestResult wilcoxon_signed_rank(std::span<const double> x, double alpha, WilcoxonMethod method) {
  std::vector<double> d;
  for (double v : x)
    if (v != 0.0) d.push_back(v);
  if (d.empty()) fail(Errc::AllTied, "signed-rank input is all zeros");

  std::vector<double> mag(d.size());
  std::transform(d.begin(), d.end(), mag.begin(), [](double v) { return std::abs(v); });
  const auto ranks = midranks(mag);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0) w_plus += ranks[i];

  const std::size_t n = d.size();
  if (method == WilcoxonMethod::Auto) method = n <= 25 ? WilcoxonMethod::Exact : WilcoxonMethod::Normal;

  double p = 1.0;
  if (method == WilcoxonMethod::Exact) {
    if (n > 60) fail(Errc::InvalidArgument, "exact signed-rank distribution limited to n <= 60");
    // Doubled midranks are integers, so the permutation distribution of
    // 2*W+ is a subset-sum count.
    std::vector<std::size_t> r2(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      total += r2[i];
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    for (std::size_t r : r2)
      for (std::size_t s = total; s >= r; --s) {
        count[s] += count[s - r];
        if (s == r) break;
      }
    const auto w2 = static_cast<std::size_t>(std::llround(2.0 * w_plus));
    double lower = 0.0, upper = 0.0, all = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      all += count[s];
      if (s <= w2) lower += count[s];
      if (s >= w2) upper += count[s];
    }
    p = std::min(1.0, 2.0 * std::min(lower, upper) / all);
  } else {
    if (n < 6) fail(Errc::SampleTooSmall, "normal approximation needs at least 6 non-zero values");
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term(mag) / 48.0;
    if (!(var > 0.0)) fail(Errc::AllTied, "signed-rank variance is zero");
    double diff = w_plus - mu;
    const double correction = diff > 0 ? 0.5 : (diff < 0 ? -0.5 : 0.0);
    const double z = (diff - correction) / std::sqrt(var);
    p = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
  }
  return make_test_result("wilcoxon_signed_rank", w_plus, p, alpha);
}

}  // namespace pulsekit
