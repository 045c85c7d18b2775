#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "normalis/algebra.hpp"
#include "normalis/ifs.hpp"
#include "normalis/stats.hpp"

namespace normalis {

/// Certified base-b digits d_1 .. d_N of a point x in [0, 1]:
/// x lies in [sum d_j b^-j, sum d_j b^-j + b^-N).
struct DigitStream {
  long base = 2;
  std::vector<std::uint32_t> digits;
  std::size_t requested = 0;
  /// Extraction stopped early: every enclosure reached straddled a cell boundary.
  bool boundary = false;
  std::size_t size() const { return digits.size(); }
};

/// Returns an enclosure of the same point for a symbolic depth and working precision.
using PointRefiner = std::function<CertifiedPoint(std::size_t depth, Bits bits)>;

struct ExtractionBudget {
  std::size_t depth = 0;  // initial symbolic depth
  Bits bits = 0;          // initial working precision
  int max_rounds = 6;     // each round doubles depth and precision
};

/// depth = ceil(N log b / -log lambda) + 8, bits = N log2 b + 64.
ExtractionBudget extraction_budget(const EquicontractiveIFS& ifs, long b, std::size_t N);

/// Certified digits of the point described by `refine`.
DigitStream extract_digits(const PointRefiner& refine, long b, std::size_t N, const ExtractionBudget& budget);
/// Certified digits of sample `index` of a sampler on a system with hull inside [0, 1].
DigitStream extract_sample_digits(const PointSampler& sampler, std::uint64_t index, long b, std::size_t N);
/// Exact digits of a rational in [0, 1); b-adic rationals get the terminating expansion.
DigitStream extract_digits(const mpq_class& x, long b, std::size_t N);
/// Digits of the longest common prefix of the base-b expansions over an enclosure in [0, 1].
std::vector<std::uint32_t> certified_prefix(const Interval& enclosure, long b, std::size_t N);

/// Digits read after dropping the first n: sum_{j=1..K} d_{n+j} b^-j, exactly.
mpq_class shifted_prefix(const DigitStream& s, std::size_t n, std::size_t K);

/// Digits per fractional part so that the truncation error is below 2^-53.
std::size_t weyl_guard_digits(long b);

struct WeylSeries {
  long l = 1;
  std::vector<std::size_t> grid;
  std::vector<std::complex<double>> averages;  // A_N for N in grid
};

/// A_N = (1/N) sum_{n=1..N} e^{2 pi i l frac(b^n x)}, with frac(b^n x) read from
/// the shifted stream. Needs max(grid) + weyl_guard_digits(b) digits.
WeylSeries weyl_sums(const DigitStream& s, long l, const std::vector<std::size_t>& grid);

/// frac(b^n x) for n = 0 .. count-1 from the stream (count + guard digits required).
std::vector<double> orbit_values(const DigitStream& s, std::size_t count);

/// Exact one-dimensional star discrepancy of points in [0, 1).
double star_discrepancy(std::vector<double> points);

/// Overlapping k-gram counts against b^-k; N >= 10 b^k required.
ChiSquareReport kgram_test(const DigitStream& s, int k, double alpha = 0.001);

struct MonobitReport {
  double z = 0;   // largest |count_d - N/b| / sqrt(N (1/b)(1 - 1/b)) over digits d
  bool pass = false;  // |z| <= 4
};
MonobitReport monobit_test(const DigitStream& s, double z_max = 4.0);

/// Per-point normality statistics over the first N digits of a stream with at
/// least N + weyl_guard_digits(b) + 1 digits.
struct PointStatistics {
  std::size_t digits = 0;
  bool boundary = false;
  MonobitReport monobit;
  std::vector<ChiSquareReport> kgram;  // k = 1 .. max_k
  bool kgram_pass = false;             // every order passes
  double weyl_modulus = 0;             // |A_N| for the given l, n = 1 .. N
  double discrepancy = 0;              // D* of frac(b^n x), n = 0 .. N-1
};

PointStatistics analyze_stream(const DigitStream& s, std::size_t N, int max_k, long l, double alpha = 0.001);

struct RotationOrbit {
  Interval theta;
  std::vector<Interval> fractions;  // R_theta^n 0 = frac(n theta), n = 1 .. size
  std::vector<long> nprime;         // floor(theta n)
  bool periodic = false;            // theta rational; the orbit holds one period
  long period = 0;
  double discrepancy = 0;           // D* of the fractions
};

RotationOrbit rotation_orbit(long b, const ExactNumber& lambda, std::size_t N);

/// A_m(x): the first floor(theta m) digits of the point.
DigitWord partition_cell(const CertifiedPoint& x, long m, const RotationNumber& rot);

}  // namespace normalis
