#include "normalis/precision.hpp"

#include <cstdlib>
#include <string>

#include "normalis/error.hpp"

namespace normalis {
namespace {

Bits initial_cap() {
  if (const char* env = std::getenv("NORMALIS_PRECISION_CAP")) {
    try {
      const long v = std::stol(env);
      if (v >= 64) return static_cast<Bits>(v);
    } catch (const std::exception&) {
    }
  }
  return kDefaultPrecisionCap;
}

std::atomic<Bits>& cap_slot() {
  static std::atomic<Bits> cap{initial_cap()};
  return cap;
}

std::atomic<Bits> g_max_used{0};

}  // namespace

Bits precision_cap() { return cap_slot().load(std::memory_order_relaxed); }

void set_precision_cap(Bits cap) {
  if (cap < 64) throw InputError("precision cap must be at least 64 bits");
  cap_slot().store(cap, std::memory_order_relaxed);
}

Bits max_precision_used() { return g_max_used.load(std::memory_order_relaxed); }

void note_precision_used(Bits bits) {
  Bits cur = g_max_used.load(std::memory_order_relaxed);
  while (bits > cur &&
         !g_max_used.compare_exchange_weak(cur, bits, std::memory_order_relaxed)) {
  }
}

void reset_precision_stats() { g_max_used.store(0, std::memory_order_relaxed); }

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return 2;
    case ErrorKind::Precision: return 3;
    case ErrorKind::Statistical: return 4;
    case ErrorKind::Internal: return 1;
  }
  return 1;
}

}  // namespace normalis
