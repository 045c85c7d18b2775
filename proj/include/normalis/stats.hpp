#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace normalis {

struct KsReport {
  double statistic = 0;  // sup |F_a - F_b|
  double critical = 0;   // asymptotic critical value at alpha
  double p_value = 1;    // asymptotic Kolmogorov tail
  double alpha = 0.01;
  std::size_t n = 0, m = 0;
  bool pass = false;     // statistic <= critical
};

/// Asymptotic two-sample critical value c(alpha) * sqrt((n+m)/(n*m)), c(alpha) = sqrt(-ln(alpha/2)/2).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

/// Two-sample Kolmogorov-Smirnov test; ties between samples are handled exactly.
/// Inputs are sorted copies, so the result is independent of input order.
KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

struct ChiSquareReport {
  double statistic = 0;
  double dof = 0;
  double p_value = 1;
  double alpha = 0.001;
  bool pass = false;  // p_value >= alpha
};

/// Pearson chi-square against equal cell probabilities.
ChiSquareReport chi_square_uniform(const std::vector<std::uint64_t>& counts, double alpha);

/// Mean and standard error of the mean.
struct MeanEstimate {
  double mean = 0;
  double standard_error = 0;
};
MeanEstimate mean_and_stderr(const std::vector<double>& xs);

}  // namespace normalis
