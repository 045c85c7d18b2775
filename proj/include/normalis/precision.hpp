#pragma once

#include <mpfr.h>

#include <atomic>
#include <cstdint>

namespace normalis {

using Bits = mpfr_prec_t;

inline constexpr Bits kDefaultPrecisionCap = 8192;
inline constexpr Bits kDefaultWorkingPrecision = 128;

/// Process-wide escalation cap. Initialised from NORMALIS_PRECISION_CAP when set.
Bits precision_cap();
void set_precision_cap(Bits cap);

/// Largest working precision any escalation loop asked for (reported by the CLI).
Bits max_precision_used();
void note_precision_used(Bits bits);
void reset_precision_stats();

}  // namespace normalis
