#include "normalis/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "normalis/error.hpp"

namespace normalis {

namespace {

// Q_KS(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x) {
  if (x < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must lie in (0,1)");
  if (n == 0 || m == 0) throw InputError("KS test needs nonempty samples");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  KsReport r;
  r.alpha = alpha;
  r.n = a.size();
  r.m = b.size();
  r.critical = ks_critical_value(alpha, r.n, r.m);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  const double n = static_cast<double>(r.n), m = static_cast<double>(r.m);
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  r.statistic = d;
  const double ne = n * m / (n + m);
  const double sq = std::sqrt(ne);
  r.p_value = kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d);
  r.pass = d <= r.critical;
  return r;
}

ChiSquareReport chi_square_uniform(const std::vector<std::uint64_t>& counts, double alpha) {
  if (counts.size() < 2) throw InputError("chi-square needs at least two cells");
  ChiSquareReport r;
  r.alpha = alpha;
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0) throw InputError("chi-square needs a positive total count");
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  r.statistic = stat;
  r.dof = static_cast<double>(counts.size() - 1);
  r.p_value = boost::math::gamma_q(r.dof / 2, stat / 2);
  r.pass = r.p_value >= alpha;
  return r;
}

MeanEstimate mean_and_stderr(const std::vector<double>& xs) {
  MeanEstimate e;
  if (xs.empty()) return e;
  // Two-pass with compensated sums; order is fixed by the input order.
  double sum = 0, c = 0;
  for (double x : xs) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  const double n = static_cast<double>(xs.size());
  e.mean = sum / n;
  if (xs.size() < 2) return e;
  double ss = 0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.standard_error = std::sqrt(ss / (n - 1) / n);
  return e;
}

}  // namespace normalis
