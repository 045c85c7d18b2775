#pragma once

#include <cstddef>
#include <functional>

namespace normalis {

/// Worker count used by drivers that do not take an explicit one (default 1).
unsigned default_workers();
void set_default_workers(unsigned workers);

/// Runs body(i) for every i in [0, n) on up to `workers` threads. Each index is
/// processed exactly once and results must be written to per-index slots, so the
/// outcome does not depend on the schedule. If several indices throw, the
/// exception of the smallest failing index is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  parallel_for(n, default_workers(), body);
}

}  // namespace normalis
