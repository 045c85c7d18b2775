#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "normalis/ifs.hpp"
#include "normalis/stats.hpp"

namespace normalis {

/// The alphabet Omega: block 0 is the pair {i', i''} (ascending), followed by the
/// singletons {i} of every other index in ascending order. q[k] is the total
/// p-weight of block k, so sum q = 1 exactly.
struct ModelAlphabet {
  std::vector<std::vector<std::uint32_t>> blocks;
  std::vector<mpq_class> q;
  std::uint32_t pair_first = 0;   // i'
  std::uint32_t pair_second = 0;  // i''
  std::vector<std::uint32_t> block_of;  // index i -> block containing i

  std::size_t size() const { return blocks.size(); }
  bool degenerate() const { return blocks.size() == 1; }
  static constexpr std::uint32_t kPairBlock = 0;
};

ModelAlphabet build_alphabet(std::size_t m, const ProbVector& p, std::uint32_t i_first, std::uint32_t i_second);

/// omega in Omega^N, generated lazily: block n is a pure function of (seed, index, n).
/// An explicit prefix, when given, overrides the generated blocks at the first positions.
/// shifted(k) is sigma^k omega.
class ModelWord {
 public:
  ModelWord(const ModelAlphabet& alphabet, std::uint64_t seed, std::uint64_t index = 0);
  static ModelWord with_prefix(const ModelAlphabet& alphabet, std::vector<std::uint32_t> prefix,
                               std::uint64_t seed = 0, std::uint64_t index = 0);
  /// Custom block law (used by deliberately corrupted controls); weights must sum to 1.
  ModelWord with_block_law(const std::vector<mpq_class>& law) const;

  std::uint32_t block(std::size_t n) const;
  std::vector<std::uint32_t> prefix(std::size_t length) const;
  ModelWord shifted(std::size_t k) const;

 private:
  std::vector<std::uint32_t> explicit_;
  DigitLaw law_;
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  std::size_t offset_ = 0;
  std::size_t blocks_ = 0;
};

ModelWord sample_omega(const ModelAlphabet& alphabet, std::uint64_t seed, std::uint64_t index = 0);

/// X_omega((i_n)): digits compatible with omega (i_n in omega_n).
struct ModelCylinder {
  ModelWord omega;
  DigitWord word;
};

bool is_compatible(const ModelCylinder& cyl, const ModelAlphabet& alphabet);

/// prod_n p_{i_n} / q_{omega_n}; InputError for incompatible words.
mpq_class model_cylinder_measure(const ModelCylinder& cyl, const ProbVector& p, const ModelAlphabet& alphabet);

/// (max{p_i', p_i''} / (p_i' + p_i''))^{number of pair blocks in the prefix}.
mpq_class atom_bound(const std::vector<std::uint32_t>& omega_prefix, const ProbVector& p, const ModelAlphabet& alphabet);

/// Samples of mu_omega. Digit n of point `index` uses counter word n of the same
/// stream as PointSampler, with the conditional law p_i / q_{omega_n} on omega_n;
/// for a single-block alphabet the digits coincide with those of PointSampler.
class ModelSampler {
 public:
  ModelSampler(const EquicontractiveIFS& ifs, const ProbVector& p, const ModelAlphabet& alphabet, std::uint64_t seed);

  DigitWord digits(const ModelWord& omega, std::uint64_t index, std::size_t count) const;
  CertifiedPoint point(const ModelWord& omega, std::uint64_t index, std::size_t depth,
                       Bits bits = kDefaultWorkingPrecision) const;
  double value(const ModelWord& omega, std::uint64_t index, std::size_t depth) const;

 private:
  EquicontractiveIFS ifs_;
  std::vector<DigitLaw> laws_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::uint64_t seed_;
};

CertifiedPoint sample_model_point(const ModelWord& omega, const EquicontractiveIFS& ifs, const ProbVector& p,
                                  const ModelAlphabet& alphabet, std::size_t depth, std::uint64_t seed,
                                  std::uint64_t index = 0, Bits bits = kDefaultWorkingPrecision);

/// A composed system together with an alphabet built on a separated pair.
struct SeparatedModel {
  EquicontractiveIFS ifs;
  ProbVector p;
  ModelAlphabet alphabet;
  int M = 1;
};

/// find_separated_pair, then compose_power(M) when M > 1, then build_alphabet on the pair.
SeparatedModel build_separated_model(const EquicontractiveIFS& ifs, const ProbVector& p, int max_m);

/// Depth at which lambda^{depth} diam(Conv X) drops below 2^-60 (double-precision samplers).
std::size_t double_depth(const EquicontractiveIFS& ifs);

struct DisintegrationOptions {
  double alpha = 0.01;
  std::size_t depth = 0;  // 0: double_depth(ifs)
  /// Block law for omega; empty means the alphabet weights q.
  std::vector<mpq_class> omega_law;
  unsigned workers = 0;   // 0: default_workers()
};

/// N direct mu_p samples against N two-stage samples (omega ~ P, x ~ mu_omega); KS report.
KsReport verify_disintegration(const EquicontractiveIFS& ifs, const ProbVector& p, const ModelAlphabet& alphabet,
                               std::size_t N, std::uint64_t seed, const DisintegrationOptions& options = {});

struct RestrictionReport {
  KsReport ks;
  mpq_class mass;             // mu_omega(X_omega(word))
  std::uint64_t attempts = 0; // rejection-sampling draws
  std::uint64_t prefix_mismatches = 0;  // accepted points whose digits do not start with word
};

/// mu_omega conditioned on the cylinder interval of `word` (rejection sampling) against
/// the push-forward of mu_{sigma^{m+1} omega} under phi_{i_0} o ... o phi_{i_m}.
RestrictionReport verify_restriction_identity(const ModelWord& omega, const DigitWord& word,
                                              const EquicontractiveIFS& ifs, const ProbVector& p,
                                              const ModelAlphabet& alphabet, std::size_t N, std::uint64_t seed,
                                              const DisintegrationOptions& options = {});

/// Stable derivation of independent sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace normalis
