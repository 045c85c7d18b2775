#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "normalis/algebra.hpp"
#include "normalis/disintegration.hpp"
#include "normalis/ifs.hpp"
#include "normalis/interval.hpp"

namespace normalis {

/// F_xi(mu) = integral of e^{2 pi i xi x}. The true transform lies in
/// enclosure() = value widened by tail_bound in both components.
struct FourierValue {
  ComplexInterval value;           // truncated product, rounding included
  std::size_t truncation_terms = 0;
  double tail_bound = 0;           // |F - value| <= tail_bound for the exact truncation
  ComplexInterval enclosure() const { return value.inflated(tail_bound); }
  Interval modulus() const { return enclosure().abs(); }
};

struct FourierOptions {
  Bits bits = kDefaultWorkingPrecision;
  std::size_t max_terms = 100000;
};

/// prod_{n>=0} sum_i p_i e^{2 pi i xi t_i lambda^n}, translations recentred at
/// c = sum p_i t_i. Truncated after m+1 factors with
/// exp(2 pi |xi| max|t_i - c| |lambda|^{m+1} / (1 - |lambda|)) - 1 <= target_error.
FourierValue fourier_product(const EquicontractiveIFS& ifs, const ProbVector& p, const Interval& xi,
                             double target_error, const FourierOptions& options = {});
FourierValue fourier_product(const EquicontractiveIFS& ifs, const ProbVector& p, const ExactNumber& xi,
                             double target_error, const FourierOptions& options = {});

/// Same product with per-level factors sum_{i in omega_n} (p_i / q_{omega_n}) e^{2 pi i xi t_i lambda^n}.
FourierValue fourier_model(const ModelWord& omega, const EquicontractiveIFS& ifs, const ProbVector& p,
                           const ModelAlphabet& alphabet, const Interval& xi, double target_error,
                           const FourierOptions& options = {});

struct McEstimate {
  double re = 0, im = 0;
  double stderr_re = 0, stderr_im = 0;
  std::size_t n = 0;
  double stderr_modulus() const;  // sqrt(se_re^2 + se_im^2)
};

/// (1/N) sum_j e^{2 pi i xi x_j} over x_j = sample(j), j < N; requires N >= 1000.
McEstimate fourier_mc(const std::function<double(std::uint64_t)>& sample, double xi, std::size_t N,
                      unsigned workers = 0);

/// Finite measure sum_j w_j delta_{x_j}; weights positive and summing to exactly 1.
class AtomicMeasure {
 public:
  AtomicMeasure(std::vector<mpq_class> positions, std::vector<mpq_class> weights);
  static AtomicMeasure dirac(const mpq_class& y) { return AtomicMeasure({y}, {mpq_class(1)}); }

  const std::vector<mpq_class>& positions() const { return x_; }
  const std::vector<mpq_class>& weights() const { return w_; }
  std::size_t size() const { return x_.size(); }

  ComplexInterval fourier(const mpq_class& xi, Bits bits = kDefaultWorkingPrecision) const;
  ComplexInterval fourier(const Interval& xi) const;
  /// delta_y * mu.
  AtomicMeasure translated(const mpq_class& y) const;

 private:
  std::vector<mpq_class> x_;
  std::vector<mpq_class> w_;
};

/// S_t(x) = t x acting by push-forward.
struct ScaleOp {
  mpq_class factor;
  AtomicMeasure apply(const AtomicMeasure& mu) const;
  EquicontractiveIFS apply(const EquicontractiveIFS& ifs) const;  // S_t mu_p is the measure of t * t_i
};

struct DiracModulusReport {
  Interval shifted;   // |F_l(delta_y * mu)|
  Interval original;  // |F_l(mu)|
  bool equal = false; // enclosures intersect
};

DiracModulusReport dirac_modulus_check(const AtomicMeasure& mu, const mpq_class& y, long l,
                                       Bits bits = kDefaultWorkingPrecision);

struct QuadratureOptions {
  double tolerance = 1e-6;
  std::size_t max_evaluations = 4000000;
};

struct Lemma32Report {
  double lhs = 0;             // integral_0^1 |F_l(S_{lambda^{-t}} nu)|^2 dt
  double quadrature_error = 0;
  mpq_class correlation;      // sum over |x_j - x_k| < r of w_j w_k
  double rhs = 0;             // correlation + 1 / (r |l| log(1/lambda))
  std::size_t evaluations = 0;
  bool holds = false;         // lhs <= rhs + quadrature_error
};

/// Throws PrecisionError when the adaptive Simpson rule cannot reach the tolerance
/// within max_evaluations (the message carries the achieved error estimate).
Lemma32Report lemma32_check(const AtomicMeasure& nu, double lambda, long l, const mpq_class& r,
                            const QuadratureOptions& options = {});

/// Random atomic measure: 1..20 atoms at multiples of 2^-20 in [0, 1), integer weights 1..16 normalized.
AtomicMeasure random_atomic_measure(std::uint64_t seed, std::uint64_t index);

struct Lemma32Sweep {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_excess = 0;  // max of lhs - rhs - quadrature_error (negative when every check holds)
  double max_ratio = 0;   // max of lhs / rhs
  std::size_t evaluations = 0;
};

/// Every (measure, r, l) with r = 2^-1 .. 2^-10 and l = +-1 .. +-5.
Lemma32Sweep lemma32_sweep(std::size_t measures, double lambda, std::uint64_t seed, unsigned workers = 0,
                           const QuadratureOptions& options = {});

/// The Bernoulli convolution: law of sum_n +-lambda^n with fair signs (maps lambda x -+ 1).
EquicontractiveIFS bernoulli_ifs(const ExactNumber& lambda);

struct FrequencyScanEntry {
  long n = 0;
  double xi = 0;
  FourierValue value;
};

/// |F_{lambda^{-n}}(mu_lambda)| for n = 0..n_max, frequencies from exact powering.
std::vector<FrequencyScanEntry> bernoulli_scan(const ExactNumber& lambda, long n_max, double target_error,
                                               Bits bits = 1024, unsigned workers = 0);

/// bernoulli_scan after certifying that 1/lambda is Pisot and lambda in (1/2, 1).
std::vector<FrequencyScanEntry> erdos_scan(const ExactNumber& lambda, long n_max, double target_error,
                                           Bits bits = 1024, unsigned workers = 0);

struct BlowupFactor {
  long nprime = 0;                  // floor(theta n)
  Interval scale;                   // b^n lambda^{nprime}
  std::optional<mpq_class> exact;   // exact scale when lambda is rational
  bool in_range = false;            // scale in [1, 1/lambda)
};

BlowupFactor blowup_factor(const RotationNumber& rot, long n, Bits bits = kDefaultWorkingPrecision);
BlowupFactor blowup_factor(long b, const ExactNumber& lambda, long n, Bits bits = kDefaultWorkingPrecision);

}  // namespace normalis
