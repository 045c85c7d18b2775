#include "normalis/rng.hpp"

namespace normalis {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// splitmix64 finaliser: spreads the seed over both key words.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

CounterStream::CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  const std::uint64_t k = mix64(seed);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  index_lo_ = static_cast<std::uint32_t>(index);
  // Index must stay below 2^56; the top byte carries the tag.
  index_hi_tag_ = static_cast<std::uint32_t>((index >> 32) & 0x00FFFFFFu) | (static_cast<std::uint32_t>(tag) << 24);
}

std::array<std::uint32_t, 4> CounterStream::block(std::uint64_t b) const {
  return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), index_lo_, index_hi_tag_},
                    key_);
}

double CounterStream::uniform(std::uint64_t position) const {
  const std::uint64_t a = word(2 * position) >> 5;      // 27 bits
  const std::uint64_t b = word(2 * position + 1) >> 6;  // 26 bits
  return static_cast<double>((a << 26) | b) * 0x1.0p-53;
}

std::uint32_t StreamReader::next_u32() {
  const std::uint64_t block = position_ >> 2;
  if (block != cached_block_) {
    cache_ = stream_.block(block);
    cached_block_ = block;
  }
  return cache_[position_++ & 3u];
}

double StreamReader::next_uniform() {
  const std::uint64_t a = next_u32() >> 5;
  const std::uint64_t b = next_u32() >> 6;
  return static_cast<double>((a << 26) | b) * 0x1.0p-53;
}

std::uint64_t StreamReader::next_below(std::uint64_t n) {
  if (n <= 1) return 0;
  if (n <= (1ull << 32)) {
    const std::uint64_t limit = ((1ull << 32) / n) * n;
    for (;;) {
      const std::uint64_t w = next_u32();
      if (w < limit) return w % n;
    }
  }
  for (;;) {
    const std::uint64_t w = (static_cast<std::uint64_t>(next_u32()) << 32) | next_u32();
    const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
    if (w < limit) return w % n;
  }
}

}  // namespace normalis
