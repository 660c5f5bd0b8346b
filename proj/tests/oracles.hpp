#pragma once

// Independent reference implementations used only by tests. Each one takes a
// different algorithmic route than the library code it checks.

#include <cstdint>

#include "kb/bits.hpp"

namespace oracles {

/// Rule 110 next state as a literal case table (no rule-byte indexing).
bool rule110_cell(bool left, bool mid, bool right);

/// Next row on a circular lattice, cell by cell through the case table.
kb::BitString rule110_row(const kb::BitString& row);

kb::BitString rule110_evolve(kb::BitString row, std::uint64_t steps);

/// Hex digit of pi at 0-based fractional position `d`, extracted with the
/// Bailey-Borwein-Plouffe series in floating point (no big integers).
int pi_hex_digit(long d);

/// `count` fractional bits of pi starting at bit 0, via hex digits.
kb::BitString pi_bits_bbp(std::size_t count);

} // namespace oracles
