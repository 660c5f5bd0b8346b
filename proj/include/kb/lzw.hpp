#pragma once

#include <cstdint>
#include <string>

#include "kb/bits.hpp"
#include "kb/dataset.hpp"

namespace kb {
namespace lzw {

/// Fixed tax added by k_hat for the self-delimiting envelope around a code
/// stream (magic + length field of the on-disk format).
inline constexpr std::int64_t kHeaderBits = 16;

/// The dictionary stops growing at this many entries; code width is then
/// frozen at 24 bits.
inline constexpr std::uint32_t kDictionaryCap = 1u << 24;

/// Compress a bit string with the pinned binary LZW variant.
///
/// Dictionary starts with the two single-bit strings; after every emitted
/// code except the first, one entry is added: the concatenation of the
/// previous phrase and the current phrase (phrase-pair growth). Codes are
/// emitted MSB-first with width ceil(log2(dictionary size)) at emission
/// time. Empty input compresses to the empty string.
BitString compress(const BitString& x);

/// Exact inverse of compress. Throws DecodeError (with bit offset) on a
/// truncated stream or an out-of-range code.
BitString decompress(const BitString& code);

/// Upper-bound proxy for the algorithmic complexity of x:
/// len(compress(x)) + kHeaderBits. An upper bound, never the true value.
std::int64_t k_hat(const BitString& x);

/// Per-bit compressed length len(compress(x)) / len(x), clamped to [0, 2].
/// Throws on empty input.
double entropy_rate(const BitString& x);

} // namespace lzw

/// The (d, d_lzw, d_k) description-length triple for a dataset, plus the
/// entropy-rate estimate h and depth ratio r.
struct ComplexityReport {
    std::int64_t d = 0;      // raw length: count * width_bits
    std::int64_t d_lzw = 0;  // LZW code length of the concatenated stack
    std::int64_t d_k = 0;    // hint + count * ceil(log2 count)
    double h = 0.0;          // d_lzw / d, clamped to [0, 2]
    double r = 0.0;          // (h * d) / max(1, k_hat(concat))

    std::string to_json() const;
};

/// Compute all description lengths for a dataset. `k_star_hint` is the
/// registered description length of the generator (0 when unknown).
ComplexityReport description_lengths(const StackedDataset& d, std::int64_t k_star_hint);

/// Pinned depth cutoffs: deep when r >= 4, shallow when r <= 1.5,
/// indeterminate between.
std::string classify_depth(double r);

} // namespace kb
