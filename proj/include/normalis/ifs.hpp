#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "normalis/algebra.hpp"
#include "normalis/interval.hpp"
#include "normalis/rng.hpp"

namespace normalis {

/// Finite word (i_0, ..., i_m) over the index set {0, ..., m-1} of an IFS.
using DigitWord = std::vector<std::uint32_t>;

/// Closed interval with exact endpoints.
struct ExactInterval {
  ExactNumber lo;
  ExactNumber hi;
  ExactNumber width() const { return hi - lo; }
  Interval approx(Bits bits) const { return lo.approx(bits).hull(hi.approx(bits)); }
  bool contains(const ExactInterval& inner) const { return lo <= inner.lo && inner.hi <= hi; }
  /// Strict closed-interval disjointness: touching endpoints are not disjoint.
  bool disjoint_from(const ExactInterval& other) const { return hi < other.lo || other.hi < lo; }
};

/// Probability vector with exact rational weights summing to exactly 1.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<mpq_class> weights);
  static ProbVector uniform(std::size_t m);

  std::size_t size() const { return w_.size(); }
  const mpq_class& operator[](std::size_t i) const { return w_[i]; }
  const std::vector<mpq_class>& weights() const { return w_; }
  bool fully_supported() const;

 private:
  std::vector<mpq_class> w_;
};

/// The maps phi_i(x) = lambda x + t_i sharing one ratio lambda, 0 < |lambda| < 1.
///
/// The system remembers how it was derived: `provenance()` lists the applied
/// normalization steps and (frame_scale, frame_shift) give the affine change of
/// coordinates y = scale * x + shift from the original frame to the current one.
class EquicontractiveIFS {
 public:
  EquicontractiveIFS(ExactNumber lambda, std::vector<ExactNumber> translations);

  const ExactNumber& lambda() const { return lambda_; }
  const std::vector<ExactNumber>& translations() const { return t_; }
  std::size_t size() const { return t_.size(); }
  const std::vector<std::string>& provenance() const { return provenance_; }
  const ExactNumber& frame_scale() const { return frame_scale_; }
  const ExactNumber& frame_shift() const { return frame_shift_; }

  /// Distinct translation values.
  std::size_t distinct_translations() const;
  /// lambda in (0,1) and attractor hull inside [0, 1).
  bool is_normalized() const;
  void validate_word(const DigitWord& word) const;

  /// Copy with provenance and frame carried over.
  EquicontractiveIFS derived(ExactNumber lambda, std::vector<ExactNumber> translations, std::string step) const;
  EquicontractiveIFS with_frame(ExactNumber scale, ExactNumber shift, std::string step) const;

  /// Double-precision snapshot used by fast samplers.
  double lambda_double() const { return lambda_d_; }
  const std::vector<double>& translations_double() const { return t_d_; }

 private:
  ExactNumber lambda_;
  std::vector<ExactNumber> t_;
  std::vector<std::string> provenance_;
  ExactNumber frame_scale_{1L};
  ExactNumber frame_shift_{0L};
  double lambda_d_ = 0;
  std::vector<double> t_d_;
};

/// A sampled point of the attractor: a digit word of depth m+1 and an enclosure of
/// sum_{n<=m} t_{i_n} lambda^n + lambda^{m+1} Conv(X), which holds every continuation.
struct CertifiedPoint {
  DigitWord digits;
  Interval enclosure;
};

/// Drop maps of zero weight. Throws InputError when fewer than two maps or
/// fewer than two distinct translations remain (the measure would be a Dirac mass).
std::pair<EquicontractiveIFS, ProbVector> trim_support(const EquicontractiveIFS& ifs, const ProbVector& p);

/// For lambda < 0, the m^2 maps phi_i o phi_j (index i * m + j) with ratio lambda^2
/// and weights p_i p_j; identity for lambda > 0.
std::pair<EquicontractiveIFS, ProbVector> square_if_negative(const EquicontractiveIFS& ifs, const ProbVector& p);

/// Conv(X) = [min t_i, max t_i] / (1 - lambda). Requires lambda in (0,1).
ExactInterval attractor_hull(const EquicontractiveIFS& ifs);

/// Conjugate by x -> (x - a)/(c (b - a)), c = 2, so the hull becomes [0, 1/2].
/// A system whose hull already lies in [0, 1/2] is returned unchanged (identity step recorded).
EquicontractiveIFS normalize_to_unit(const EquicontractiveIFS& ifs);

/// Image of Conv(X) under phi_{i_0} o ... o phi_{i_k}; Conv(X) for the empty word.
ExactInterval cylinder_interval(const EquicontractiveIFS& ifs, const DigitWord& word);

struct SeparatedPair {
  int M = 0;
  DigitWord first;
  DigitWord second;
};

/// Smallest M <= max_m, then lexicographically smallest (first < second), with
/// strictly disjoint cylinder intervals. nullopt when none exists up to max_m.
std::optional<SeparatedPair> find_separated_pair(const EquicontractiveIFS& ifs, int max_m);

/// The M-fold composed system: maps indexed by words of length M in lexicographic
/// order (word index = sum i_n m^{M-1-n}), ratio lambda^M, weights products.
std::pair<EquicontractiveIFS, ProbVector> compose_power(const EquicontractiveIFS& ifs, const ProbVector& p, int M);

/// Word index of a length-M word in compose_power order.
std::uint32_t word_index(const DigitWord& word, std::size_t m);

/// prod_n p_{i_n}: the mass of the symbolic cylinder (the geometric mass when
/// first-level images are disjoint).
mpq_class cylinder_measure(const ProbVector& p, const DigitWord& word);

/// Draws digits i.i.d. with law p from 32-bit counter words: digit = first i with
/// word < floor((p_0 + ... + p_i) 2^32).
class DigitLaw {
 public:
  explicit DigitLaw(const std::vector<mpq_class>& weights);
  std::uint32_t draw(std::uint32_t word) const;
  std::size_t size() const { return thresholds_.size(); }

 private:
  std::vector<std::uint64_t> thresholds_;
};

/// Digit n of the result is law.draw(stream.word(n)).
DigitWord draw_digits(const DigitLaw& law, const CounterStream& stream, std::size_t count);

/// Sampler of mu_p bound to one (system, weights, seed); point `index` is fixed by
/// its counter stream, so deeper or more precise requests describe the same point.
class PointSampler {
 public:
  PointSampler(const EquicontractiveIFS& ifs, const ProbVector& p, std::uint64_t seed);

  DigitWord digits(std::uint64_t index, std::size_t count) const;
  CertifiedPoint point(std::uint64_t index, std::size_t depth, Bits bits = kDefaultWorkingPrecision) const;
  double value(std::uint64_t index, std::size_t depth) const;
  const EquicontractiveIFS& ifs() const { return ifs_; }

 private:
  EquicontractiveIFS ifs_;
  DigitLaw law_;
  std::uint64_t seed_;
};

/// sum_{n<=m} t_{i_n} lambda^n + lambda^{m+1} [a, b] evaluated in interval arithmetic.
Interval enclose_word(const EquicontractiveIFS& ifs, const DigitWord& digits, Bits bits);

/// Digits of sample `index`: digit n is a pure function of (seed, index, n).
DigitWord sample_digits(const ProbVector& p, std::uint64_t seed, std::uint64_t index, std::size_t count);

/// Certified sample of mu_p with depth+1 digits. Requires lambda in (0,1).
CertifiedPoint sample_point(const EquicontractiveIFS& ifs, const ProbVector& p, std::size_t depth,
                            std::uint64_t seed, std::uint64_t index = 0, Bits bits = kDefaultWorkingPrecision);

/// Double-precision value of the same sample (Horner over depth+1 digits); used by
/// statistical drivers where an absolute error near 1e-16 is immaterial.
double sample_point_double(const EquicontractiveIFS& ifs, const ProbVector& p, std::size_t depth,
                           std::uint64_t seed, std::uint64_t index);
double evaluate_digits_double(const EquicontractiveIFS& ifs, const DigitWord& digits);

}  // namespace normalis
