#pragma once

#include <array>
#include <cstdint>

namespace normalis {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Independent stream families; each (seed, tag, index) names one stream.
enum class StreamTag : std::uint32_t {
  Digit = 1,    // symbolic digits of mu_p samples
  Omega = 2,    // model-word blocks
  Model = 3,    // digits inside a model word
  Fixture = 4,  // random test fixtures
  Uniform = 5,  // generic uniforms
};

/// Stateless stream: word(position) is a pure function of (seed, tag, index, position).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t index);

  std::uint32_t word(std::uint64_t position) const { return block(position >> 2)[position & 3u]; }
  /// Words 4b .. 4b+3.
  std::array<std::uint32_t, 4> block(std::uint64_t b) const;
  /// Uniform double in [0,1) with 53 random bits, built from words 2p and 2p+1.
  double uniform(std::uint64_t position) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t index_lo_;
  std::uint32_t index_hi_tag_;
};

/// Sequential reader over a CounterStream with a one-block cache.
class StreamReader {
 public:
  explicit StreamReader(CounterStream stream, std::uint64_t start = 0) : stream_(stream), position_(start) {}

  std::uint32_t next_u32();
  double next_uniform();
  /// Uniform integer in [0, n), rejection sampled (unbiased).
  std::uint64_t next_below(std::uint64_t n);
  std::uint64_t position() const { return position_; }

 private:
  CounterStream stream_;
  std::uint64_t position_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> cache_{};
};

}  // namespace normalis
