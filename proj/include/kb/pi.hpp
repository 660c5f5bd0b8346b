#pragma once

#include <cstdint>
#include <string>

#include "kb/bits.hpp"

namespace kb {

/// First `count` bits of the fractional part of pi (0.00100100001111...).
///
/// Computed once per process to the largest requested budget with a
/// fixed-point Machin evaluation (pi = 16 atan(1/5) - 4 atan(1/239)) and
/// memoized. Bit 0 is the most significant fractional bit.
BitString pi_fraction_bits(std::size_t count);

/// Write/read the digit table as a raw-bit cache file (KBITS1 format, see
/// README). The CLI uses this; the library itself only memoizes in memory.
void save_pi_cache(const std::string& path, std::size_t count);
BitString load_pi_cache(const std::string& path);

} // namespace kb
