#include "normalis/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "normalis/error.hpp"
#include "normalis/parallel.hpp"

namespace normalis {

namespace {

unsigned resolve_workers(unsigned w) { return w == 0 ? default_workers() : w; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void check_law(const std::vector<mpq_class>& law, std::size_t blocks) {
  if (law.size() != blocks) throw InputError("block law has " + std::to_string(law.size()) + " weights, expected " +
                                             std::to_string(blocks));
  mpq_class sum = 0;
  for (const auto& w : law) {
    if (sgn(w) < 0) throw InputError("block law has a negative weight");
    sum += w;
  }
  if (sum != 1) throw InputError("block law sums to " + sum.get_str() + ", expected 1");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt + 0x632BE59BD9B4E019ull));
}

ModelAlphabet build_alphabet(std::size_t m, const ProbVector& p, std::uint32_t i_first, std::uint32_t i_second) {
  if (p.size() != m) throw InputError("probability vector does not match the index set");
  if (i_first >= m || i_second >= m) throw InputError("pair index out of range");
  if (i_first == i_second) throw InputError("the pair needs two distinct indices");
  if (!p.fully_supported()) throw InputError("build_alphabet requires a fully supported probability vector");
  ModelAlphabet a;
  a.pair_first = std::min(i_first, i_second);
  a.pair_second = std::max(i_first, i_second);
  a.block_of.assign(m, 0);
  a.blocks.push_back({a.pair_first, a.pair_second});
  a.q.push_back(p[a.pair_first] + p[a.pair_second]);
  for (std::uint32_t i = 0; i < m; ++i) {
    if (i == a.pair_first || i == a.pair_second) continue;
    a.block_of[i] = static_cast<std::uint32_t>(a.blocks.size());
    a.blocks.push_back({i});
    a.q.push_back(p[i]);
  }
  return a;
}

ModelWord::ModelWord(const ModelAlphabet& alphabet, std::uint64_t seed, std::uint64_t index)
    : law_(alphabet.q), seed_(seed), index_(index), blocks_(alphabet.size()) {}

ModelWord ModelWord::with_prefix(const ModelAlphabet& alphabet, std::vector<std::uint32_t> prefix,
                                 std::uint64_t seed, std::uint64_t index) {
  ModelWord w(alphabet, seed, index);
  for (auto b : prefix)
    if (b >= w.blocks_) throw InputError("model word block " + std::to_string(b) + " outside the alphabet");
  w.explicit_ = std::move(prefix);
  return w;
}

ModelWord ModelWord::with_block_law(const std::vector<mpq_class>& law) const {
  check_law(law, blocks_);
  ModelWord out = *this;
  out.law_ = DigitLaw(law);
  return out;
}

std::uint32_t ModelWord::block(std::size_t n) const {
  const std::size_t pos = offset_ + n;
  if (pos < explicit_.size()) return explicit_[pos];
  return law_.draw(CounterStream(seed_, StreamTag::Omega, index_).word(pos));
}

std::vector<std::uint32_t> ModelWord::prefix(std::size_t length) const {
  std::vector<std::uint32_t> out(length);
  const CounterStream stream(seed_, StreamTag::Omega, index_);
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t pos = offset_ + n;
    out[n] = pos < explicit_.size() ? explicit_[pos] : law_.draw(stream.word(pos));
  }
  return out;
}

ModelWord ModelWord::shifted(std::size_t k) const {
  ModelWord out = *this;
  out.offset_ += k;
  return out;
}

ModelWord sample_omega(const ModelAlphabet& alphabet, std::uint64_t seed, std::uint64_t index) {
  return ModelWord(alphabet, seed, index);
}

bool is_compatible(const ModelCylinder& cyl, const ModelAlphabet& alphabet) {
  for (std::size_t n = 0; n < cyl.word.size(); ++n) {
    const auto i = cyl.word[n];
    if (i >= alphabet.block_of.size()) return false;
    if (alphabet.block_of[i] != cyl.omega.block(n)) return false;
  }
  return true;
}

mpq_class model_cylinder_measure(const ModelCylinder& cyl, const ProbVector& p, const ModelAlphabet& alphabet) {
  if (p.size() != alphabet.block_of.size()) throw InputError("probability vector does not match the alphabet");
  if (!is_compatible(cyl, alphabet)) throw InputError("word is not compatible with the model word");
  mpq_class mass = 1;
  for (std::size_t n = 0; n < cyl.word.size(); ++n) mass *= p[cyl.word[n]] / alphabet.q[cyl.omega.block(n)];
  return mass;
}

mpq_class atom_bound(const std::vector<std::uint32_t>& omega_prefix, const ProbVector& p,
                     const ModelAlphabet& alphabet) {
  const mpq_class& a = p[alphabet.pair_first];
  const mpq_class& b = p[alphabet.pair_second];
  const mpq_class ratio = (a > b ? a : b) / (a + b);
  mpq_class bound = 1;
  for (auto blk : omega_prefix)
    if (blk == ModelAlphabet::kPairBlock) bound *= ratio;
  return bound;
}

ModelSampler::ModelSampler(const EquicontractiveIFS& ifs, const ProbVector& p, const ModelAlphabet& alphabet,
                           std::uint64_t seed)
    : ifs_(ifs), members_(alphabet.blocks), seed_(seed) {
  if (p.size() != ifs.size() || alphabet.block_of.size() != ifs.size())
    throw InputError("alphabet and probability vector must match the IFS");
  laws_.reserve(alphabet.size());
  for (std::size_t k = 0; k < alphabet.size(); ++k) {
    std::vector<mpq_class> cond;
    for (auto i : alphabet.blocks[k]) cond.push_back(p[i] / alphabet.q[k]);
    laws_.emplace_back(cond);
  }
}

DigitWord ModelSampler::digits(const ModelWord& omega, std::uint64_t index, std::size_t count) const {
  const auto blocks = omega.prefix(count);
  const CounterStream stream(seed_, StreamTag::Digit, index);
  DigitWord out(count);
  for (std::size_t blk = 0; blk * 4 < count; ++blk) {
    const auto words = stream.block(blk);
    for (std::size_t lane = 0; lane < 4 && blk * 4 + lane < count; ++lane) {
      const std::size_t n = blk * 4 + lane;
      const auto& mem = members_[blocks[n]];
      out[n] = mem.size() == 1 ? mem[0] : mem[laws_[blocks[n]].draw(words[lane])];
    }
  }
  return out;
}

CertifiedPoint ModelSampler::point(const ModelWord& omega, std::uint64_t index, std::size_t depth, Bits bits) const {
  CertifiedPoint pt;
  pt.digits = digits(omega, index, depth + 1);
  pt.enclosure = enclose_word(ifs_, pt.digits, bits);
  return pt;
}

double ModelSampler::value(const ModelWord& omega, std::uint64_t index, std::size_t depth) const {
  return evaluate_digits_double(ifs_, digits(omega, index, depth + 1));
}

CertifiedPoint sample_model_point(const ModelWord& omega, const EquicontractiveIFS& ifs, const ProbVector& p,
                                  const ModelAlphabet& alphabet, std::size_t depth, std::uint64_t seed,
                                  std::uint64_t index, Bits bits) {
  if (!(ifs.lambda() > ExactNumber(0L))) throw InputError("sample_model_point requires 0 < lambda < 1");
  return ModelSampler(ifs, p, alphabet, seed).point(omega, index, depth, bits);
}

SeparatedModel build_separated_model(const EquicontractiveIFS& ifs, const ProbVector& p, int max_m) {
  const auto pair = find_separated_pair(ifs, max_m);
  if (!pair) throw InputError("no separated pair of cylinders up to M = " + std::to_string(max_m));
  SeparatedModel out{ifs, p, ModelAlphabet{}, pair->M};
  if (pair->M > 1) std::tie(out.ifs, out.p) = compose_power(ifs, p, pair->M);
  out.alphabet = build_alphabet(out.ifs.size(), out.p, word_index(pair->first, ifs.size()),
                                word_index(pair->second, ifs.size()));
  return out;
}

std::size_t double_depth(const EquicontractiveIFS& ifs) {
  const double diam = std::max(attractor_hull(ifs).width().to_double(), 1e-300);
  const double lam = std::fabs(ifs.lambda_double());
  const double d = std::ceil((-60.0 * std::log(2.0) - std::log(diam)) / std::log(lam));
  return static_cast<std::size_t>(std::clamp(d, 1.0, 4096.0));
}

KsReport verify_disintegration(const EquicontractiveIFS& ifs, const ProbVector& p, const ModelAlphabet& alphabet,
                               std::size_t N, std::uint64_t seed, const DisintegrationOptions& options) {
  if (N < 100) throw InputError("verify_disintegration needs N >= 100, got " + std::to_string(N));
  if (!ifs.is_normalized()) throw InputError("verify_disintegration requires a normalized IFS");
  if (!options.omega_law.empty()) check_law(options.omega_law, alphabet.size());
  const std::size_t depth = options.depth ? options.depth : double_depth(ifs);
  const PointSampler direct(ifs, p, derive_seed(seed, 1));
  const ModelSampler model(ifs, p, alphabet, derive_seed(seed, 3));
  const std::uint64_t omega_seed = derive_seed(seed, 2);
  std::vector<double> a(N), b(N);
  parallel_for(N, resolve_workers(options.workers), [&](std::size_t i) {
    a[i] = direct.value(i, depth);
    ModelWord omega(alphabet, omega_seed, i);
    if (!options.omega_law.empty()) omega = omega.with_block_law(options.omega_law);
    b[i] = model.value(omega, i, depth);
  });
  return ks_two_sample(std::move(a), std::move(b), options.alpha);
}

RestrictionReport verify_restriction_identity(const ModelWord& omega, const DigitWord& word,
                                              const EquicontractiveIFS& ifs, const ProbVector& p,
                                              const ModelAlphabet& alphabet, std::size_t N, std::uint64_t seed,
                                              const DisintegrationOptions& options) {
  if (N < 100) throw InputError("verify_restriction_identity needs N >= 100, got " + std::to_string(N));
  if (!(ifs.lambda() > ExactNumber(0L))) throw InputError("verify_restriction_identity requires 0 < lambda < 1");
  ifs.validate_word(word);
  RestrictionReport rep;
  rep.mass = model_cylinder_measure(ModelCylinder{omega, word}, p, alphabet);
  if (rep.mass < mpq_class(1, 1000000))
    throw InputError("cylinder mass " + rep.mass.get_str() + " is below 1e-6; rejection sampling is impractical");

  const std::size_t depth = (options.depth ? options.depth : double_depth(ifs)) + word.size();
  const unsigned workers = resolve_workers(options.workers);
  const Interval target = cylinder_interval(ifs, word).approx(80);
  const double lo = target.lo_double(), hi = target.hi_double();

  // Conditioned samples, collected in attempt order.
  const ModelSampler conditioned(ifs, p, alphabet, derive_seed(seed, 11));
  const double mass = rep.mass.get_d();
  const std::uint64_t max_attempts = static_cast<std::uint64_t>(50.0 * static_cast<double>(N) / mass) + 10000;
  std::vector<double> a;
  a.reserve(N);
  const std::size_t batch = 4096;
  std::vector<double> vals(batch);
  std::vector<char> prefix_ok(batch);
  std::uint64_t next = 0;
  while (a.size() < N) {
    if (next >= max_attempts)
      throw StatisticalFailure("rejection sampling accepted " + std::to_string(a.size()) + " of " +
                               std::to_string(N) + " points in " + std::to_string(next) + " attempts");
    parallel_for(batch, workers, [&](std::size_t k) {
      const DigitWord d = conditioned.digits(omega, next + k, depth + 1);
      vals[k] = evaluate_digits_double(ifs, d);
      prefix_ok[k] = std::equal(word.begin(), word.end(), d.begin());
    });
    for (std::size_t k = 0; k < batch && a.size() < N; ++k) {
      ++rep.attempts;
      if (vals[k] >= lo && vals[k] <= hi) {
        a.push_back(vals[k]);
        if (!prefix_ok[k]) ++rep.prefix_mismatches;
      }
    }
    next += batch;
  }

  // Push-forward of mu_{sigma^{m+1} omega} under phi_{i_0} o ... o phi_{i_m}.
  const ModelSampler tail(ifs, p, alphabet, derive_seed(seed, 12));
  const ModelWord shifted = omega.shifted(word.size());
  const double lam = ifs.lambda_double();
  const auto& t = ifs.translations_double();
  std::vector<double> b(N);
  parallel_for(N, workers, [&](std::size_t i) {
    double v = tail.value(shifted, i, depth - word.size());
    for (std::size_t k = word.size(); k-- > 0;) v = t[word[k]] + lam * v;
    b[i] = v;
  });
  rep.ks = ks_two_sample(std::move(a), std::move(b), options.alpha);
  return rep;
}

}  // namespace normalis
