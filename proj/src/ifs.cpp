#include "normalis/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "normalis/error.hpp"
#include "normalis/rng.hpp"

namespace normalis {

namespace {

void require_positive_ratio(const EquicontractiveIFS& ifs, const char* op) {
  if (ifs.lambda().sign() <= 0)
    throw InputError(std::string(op) + " needs lambda in (0,1); apply square_if_negative first");
}

constexpr std::size_t kMaxEnumeratedWords = 1u << 16;

}  // namespace

// ---------------------------------------------------------------------------

ProbVector::ProbVector(std::vector<mpq_class> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw InputError("probability vector is empty");
  mpq_class sum = 0;
  for (auto& w : w_) {
    w.canonicalize();
    if (w < 0) throw InputError("probability weight " + w.get_str() + " is negative");
    sum += w;
  }
  if (sum != 1) throw InputError("probabilities sum to " + sum.get_str() + ", not 1");
}

ProbVector ProbVector::uniform(std::size_t m) {
  return ProbVector(std::vector<mpq_class>(m, mpq_class(1, static_cast<unsigned long>(m))));
}

bool ProbVector::fully_supported() const {
  return std::all_of(w_.begin(), w_.end(), [](const mpq_class& w) { return w > 0; });
}

// ---------------------------------------------------------------------------

EquicontractiveIFS::EquicontractiveIFS(ExactNumber lambda, std::vector<ExactNumber> translations)
    : lambda_(std::move(lambda)), t_(std::move(translations)) {
  if (t_.empty()) throw InputError("an IFS needs at least one map");
  if (lambda_.is_zero() || abs(lambda_) >= ExactNumber(1L))
    throw InputError("|lambda| must lie in (0,1), got lambda = " + lambda_.to_string());
  lambda_d_ = lambda_.to_double();
  t_d_.reserve(t_.size());
  for (const auto& t : t_) t_d_.push_back(t.to_double());
}

std::size_t EquicontractiveIFS::distinct_translations() const {
  std::vector<ExactNumber> seen;
  for (const auto& t : t_)
    if (std::none_of(seen.begin(), seen.end(), [&](const ExactNumber& s) { return s == t; })) seen.push_back(t);
  return seen.size();
}

bool EquicontractiveIFS::is_normalized() const {
  if (lambda_.sign() <= 0) return false;
  const ExactInterval h = attractor_hull(*this);
  return h.lo.sign() >= 0 && h.hi < ExactNumber(1L);
}

void EquicontractiveIFS::validate_word(const DigitWord& word) const {
  for (auto d : word)
    if (d >= t_.size())
      throw InputError("digit " + std::to_string(d) + " is not an index of a " + std::to_string(t_.size()) + "-map IFS");
}

EquicontractiveIFS EquicontractiveIFS::derived(ExactNumber lambda, std::vector<ExactNumber> translations,
                                               std::string step) const {
  EquicontractiveIFS out(std::move(lambda), std::move(translations));
  out.provenance_ = provenance_;
  out.provenance_.push_back(std::move(step));
  out.frame_scale_ = frame_scale_;
  out.frame_shift_ = frame_shift_;
  return out;
}

EquicontractiveIFS EquicontractiveIFS::with_frame(ExactNumber scale, ExactNumber shift, std::string step) const {
  EquicontractiveIFS out = *this;
  out.provenance_.push_back(std::move(step));
  out.frame_scale_ = std::move(scale);
  out.frame_shift_ = std::move(shift);
  return out;
}

// ---------------------------------------------------------------------------

std::pair<EquicontractiveIFS, ProbVector> trim_support(const EquicontractiveIFS& ifs, const ProbVector& p) {
  if (p.size() != ifs.size())
    throw InputError("probability vector has " + std::to_string(p.size()) + " entries for " +
                     std::to_string(ifs.size()) + " maps");
  std::vector<ExactNumber> t;
  std::vector<mpq_class> w;
  std::vector<std::size_t> removed;
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    if (p[i] > 0) {
      t.push_back(ifs.translations()[i]);
      w.push_back(p[i]);
    } else {
      removed.push_back(i);
    }
  }
  if (t.size() < 2)
    throw InputError("degenerate measure: only " + std::to_string(t.size()) +
                     " map has positive weight, so mu is a Dirac mass at its fixed point");
  std::ostringstream step;
  step << "trim_support: ";
  if (removed.empty()) {
    step << "all " << ifs.size() << " maps have positive weight";
  } else {
    step << "removed maps {";
    for (std::size_t k = 0; k < removed.size(); ++k) step << (k ? "," : "") << removed[k];
    step << "}";
  }
  EquicontractiveIFS out = ifs.derived(ifs.lambda(), std::move(t), step.str());
  if (out.distinct_translations() < 2)
    throw InputError("degenerate measure: all retained maps share one translation, so mu is a Dirac mass");
  return {std::move(out), ProbVector(std::move(w))};
}

std::pair<EquicontractiveIFS, ProbVector> square_if_negative(const EquicontractiveIFS& ifs, const ProbVector& p) {
  if (p.size() != ifs.size()) throw InputError("probability vector does not match the IFS");
  if (ifs.lambda().sign() > 0) {
    return {ifs.derived(ifs.lambda(), ifs.translations(), "square_if_negative: lambda > 0, unchanged"), p};
  }
  const std::size_t m = ifs.size();
  std::vector<ExactNumber> t;
  std::vector<mpq_class> w;
  t.reserve(m * m);
  w.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      t.push_back(ifs.lambda() * ifs.translations()[j] + ifs.translations()[i]);
      w.push_back(p[i] * p[j]);
    }
  const ExactNumber sq = ifs.lambda() * ifs.lambda();
  std::string step = "square_if_negative: lambda = " + ifs.lambda().to_string() + " replaced by phi_i o phi_j, ratio " +
                     sq.to_string() + ", " + std::to_string(m * m) + " maps";
  return {ifs.derived(sq, std::move(t), std::move(step)), ProbVector(std::move(w))};
}

ExactInterval attractor_hull(const EquicontractiveIFS& ifs) {
  require_positive_ratio(ifs, "attractor_hull");
  ExactNumber lo = ifs.translations()[0], hi = lo;
  for (const auto& t : ifs.translations()) {
    if (t < lo) lo = t;
    if (t > hi) hi = t;
  }
  const ExactNumber denom = ExactNumber(1L) - ifs.lambda();
  return {lo / denom, hi / denom};
}

EquicontractiveIFS normalize_to_unit(const EquicontractiveIFS& ifs) {
  require_positive_ratio(ifs, "normalize_to_unit");
  const ExactInterval h = attractor_hull(ifs);
  if (h.lo == h.hi) throw InputError("degenerate hull [a,a]: the attractor is a single point");
  const ExactNumber half(mpq_class(1, 2));
  if (h.lo.sign() >= 0 && h.hi <= half)
    return ifs.with_frame(ifs.frame_scale(), ifs.frame_shift(),
                          "normalize_to_unit: identity, hull already inside [0,1/2]");
  // y = (x - a) / L with L = 2 (b - a); t' = (t - a (1 - lambda)) / L.
  const ExactNumber L = ExactNumber(2L) * (h.hi - h.lo);
  const ExactNumber one_minus = ExactNumber(1L) - ifs.lambda();
  std::vector<ExactNumber> t;
  t.reserve(ifs.size());
  for (const auto& ti : ifs.translations()) t.push_back((ti - h.lo * one_minus) / L);
  std::string step = "normalize_to_unit: x -> (x - a)/(2(b - a)) with [a,b] = [" + h.lo.to_string() + ", " +
                     h.hi.to_string() + "]";
  EquicontractiveIFS out = ifs.derived(ifs.lambda(), std::move(t), std::move(step));
  const ExactNumber scale = ifs.frame_scale() / L;
  const ExactNumber shift = (ifs.frame_shift() - h.lo) / L;
  return out.with_frame(scale, shift, "frame: y = " + scale.to_string() + " * x + " + shift.to_string());
}

ExactInterval cylinder_interval(const EquicontractiveIFS& ifs, const DigitWord& word) {
  ifs.validate_word(word);
  const ExactInterval h = attractor_hull(ifs);
  ExactNumber s(0L), pw(1L);
  for (auto d : word) {
    s += ifs.translations()[d] * pw;
    pw *= ifs.lambda();
  }
  return {s + pw * h.lo, s + pw * h.hi};
}

namespace {

std::vector<DigitWord> all_words(std::size_t m, int M) {
  std::size_t count = 1;
  for (int k = 0; k < M; ++k) {
    count *= m;
    if (count > kMaxEnumeratedWords) throw InputError("too many words to enumerate: " + std::to_string(m) + "^" + std::to_string(M));
  }
  std::vector<DigitWord> out;
  out.reserve(count);
  DigitWord w(static_cast<std::size_t>(M), 0);
  for (std::size_t c = 0; c < count; ++c) {
    out.push_back(w);
    for (int k = M - 1; k >= 0; --k) {
      if (++w[static_cast<std::size_t>(k)] < m) break;
      w[static_cast<std::size_t>(k)] = 0;
    }
  }
  return out;
}

}  // namespace

std::optional<SeparatedPair> find_separated_pair(const EquicontractiveIFS& ifs, int max_m) {
  require_positive_ratio(ifs, "find_separated_pair");
  for (int M = 1; M <= max_m; ++M) {
    const auto words = all_words(ifs.size(), M);
    std::vector<ExactInterval> cyl;
    std::vector<Interval> lo, hi;
    cyl.reserve(words.size());
    for (const auto& w : words) {
      cyl.push_back(cylinder_interval(ifs, w));
      lo.push_back(cyl.back().lo.approx(96));
      hi.push_back(cyl.back().hi.approx(96));
    }
    for (std::size_t a = 0; a < words.size(); ++a)
      for (std::size_t b = a + 1; b < words.size(); ++b) {
        // Certified overlap skips the exact comparison.
        if (hi[a].certainly_greater(lo[b]) && hi[b].certainly_greater(lo[a])) continue;
        if (cyl[a].disjoint_from(cyl[b])) return SeparatedPair{M, words[a], words[b]};
      }
  }
  return std::nullopt;
}

std::uint32_t word_index(const DigitWord& word, std::size_t m) {
  std::uint64_t idx = 0;
  for (auto d : word) idx = idx * m + d;
  return static_cast<std::uint32_t>(idx);
}

std::pair<EquicontractiveIFS, ProbVector> compose_power(const EquicontractiveIFS& ifs, const ProbVector& p, int M) {
  if (M < 1) throw InputError("composition power must be >= 1");
  if (M == 1) return {ifs, p};
  const auto words = all_words(ifs.size(), M);
  std::vector<ExactNumber> t;
  std::vector<mpq_class> w;
  t.reserve(words.size());
  w.reserve(words.size());
  for (const auto& word : words) {
    ExactNumber s(0L), pw(1L);
    for (auto d : word) {
      s += ifs.translations()[d] * pw;
      pw *= ifs.lambda();
    }
    t.push_back(s);
    w.push_back(cylinder_measure(p, word));
  }
  return {ifs.derived(ifs.lambda().pow(M), std::move(t),
                      "compose_power: " + std::to_string(M) + "-fold compositions, " + std::to_string(words.size()) +
                          " maps"),
          ProbVector(std::move(w))};
}

mpq_class cylinder_measure(const ProbVector& p, const DigitWord& word) {
  mpq_class m = 1;
  for (auto d : word) {
    if (d >= p.size()) throw InputError("digit " + std::to_string(d) + " out of range");
    m *= p[d];
  }
  return m;
}

// ---------------------------------------------------------------------------

DigitLaw::DigitLaw(const std::vector<mpq_class>& weights) {
  mpq_class cum = 0;
  const mpz_class scale = mpz_class(1) << 32;
  thresholds_.reserve(weights.size());
  for (const auto& w : weights) {
    cum += w;
    const mpq_class scaled = cum * scale;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    thresholds_.push_back(f.get_ui());
  }
  if (!thresholds_.empty()) thresholds_.back() = std::uint64_t{1} << 32;
}

std::uint32_t DigitLaw::draw(std::uint32_t word) const {
  const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), static_cast<std::uint64_t>(word));
  return static_cast<std::uint32_t>(it - thresholds_.begin());
}

DigitWord draw_digits(const DigitLaw& law, const CounterStream& stream, std::size_t count) {
  DigitWord out(count);
  for (std::size_t blk = 0; blk * 4 < count; ++blk) {
    const auto words = stream.block(blk);
    for (std::size_t lane = 0; lane < 4 && blk * 4 + lane < count; ++lane) out[blk * 4 + lane] = law.draw(words[lane]);
  }
  return out;
}

Interval enclose_word(const EquicontractiveIFS& ifs, const DigitWord& digits, Bits bits) {
  ifs.validate_word(digits);
  const ExactInterval h = attractor_hull(ifs);
  const Bits prec = bits + 32;
  const Interval lam = ifs.lambda().approx(prec);
  std::vector<Interval> t;
  t.reserve(ifs.size());
  for (const auto& ti : ifs.translations()) t.push_back(ti.approx(prec));
  Interval v = h.approx(prec);
  for (std::size_t k = digits.size(); k-- > 0;) {
    v *= lam;
    v += t[digits[k]];
  }
  return v;
}

PointSampler::PointSampler(const EquicontractiveIFS& ifs, const ProbVector& p, std::uint64_t seed)
    : ifs_(ifs), law_(p.weights()), seed_(seed) {
  if (p.size() != ifs.size()) throw InputError("probability vector does not match the IFS");
}

DigitWord PointSampler::digits(std::uint64_t index, std::size_t count) const {
  return draw_digits(law_, CounterStream(seed_, StreamTag::Digit, index), count);
}

CertifiedPoint PointSampler::point(std::uint64_t index, std::size_t depth, Bits bits) const {
  CertifiedPoint pt;
  pt.digits = digits(index, depth + 1);
  pt.enclosure = enclose_word(ifs_, pt.digits, bits);
  return pt;
}

double PointSampler::value(std::uint64_t index, std::size_t depth) const {
  return evaluate_digits_double(ifs_, digits(index, depth + 1));
}

DigitWord sample_digits(const ProbVector& p, std::uint64_t seed, std::uint64_t index, std::size_t count) {
  return draw_digits(DigitLaw(p.weights()), CounterStream(seed, StreamTag::Digit, index), count);
}

CertifiedPoint sample_point(const EquicontractiveIFS& ifs, const ProbVector& p, std::size_t depth, std::uint64_t seed,
                            std::uint64_t index, Bits bits) {
  require_positive_ratio(ifs, "sample_point");
  return PointSampler(ifs, p, seed).point(index, depth, bits);
}

double evaluate_digits_double(const EquicontractiveIFS& ifs, const DigitWord& digits) {
  const double lam = ifs.lambda_double();
  const auto& t = ifs.translations_double();
  double v = 0;
  for (std::size_t k = digits.size(); k-- > 0;) v = t[digits[k]] + lam * v;
  return v;
}

double sample_point_double(const EquicontractiveIFS& ifs, const ProbVector& p, std::size_t depth, std::uint64_t seed,
                           std::uint64_t index) {
  return PointSampler(ifs, p, seed).value(index, depth);
}

}  // namespace normalis
