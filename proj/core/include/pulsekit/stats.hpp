#pragma once

#include <span>
#include <string>
#include <vector>

namespace pulsekit {

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p = 1.0;
  double alpha_corrected = 0.05;
  bool significant = false;
};

TestResult make_test_result(std::string name, double statistic, double p, double alpha);

/// alpha / m.
double bonferroni(double alpha, int m);

/// Pearson correlation; throws ZeroVariance if either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> midranks(std::span<const double> x);

/// Upper-tail probabilities.
double chi_square_sf(double x, double df);
double normal_sf(double z);
double normal_quantile(double p);

/// Shapiro-Wilk W and p-value following Royston's AS R94 algorithm,
/// 3 <= n <= 5000. Throws SampleTooSmall / AllTied.
TestResult shapiro_wilk(std::span<const double> x, double alpha = 0.05);

/// Bartlett's test for equal variances (sample variances, chi-square
/// reference with k-1 df). Each group needs >= 2 values.
TestResult bartlett(const std::vector<std::vector<double>>& groups, double alpha = 0.05);

/// Kruskal-Wallis H with midranks and the tie correction, chi-square
/// reference with k-1 df.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha = 0.05);

enum class WilcoxonMethod { Auto, Exact, Normal };

/// Two-sided signed-rank test of symmetry about zero. Exact zeros are
/// dropped. The statistic is the positive rank sum. Auto uses the exact
/// permutation distribution for n <= 25 and the normal approximation (tie
/// variance correction, continuity correction) above that.
TestResult wilcoxon_signed_rank(std::span<const double> x, double alpha = 0.05,
                                WilcoxonMethod method = WilcoxonMethod::Auto);

}  // namespace pulsekit
