#pragma once

#include <cstdint>
#include <string_view>

#include "kb/bits.hpp"

namespace kb {

/// Deterministic 64-bit generator (splitmix recurrence, constants pinned
/// below). Not a platform PRNG: every golden file in the repo depends on
/// this exact stream, so the constants must never change.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bit() {
        if (buffer_left_ == 0) {
            buffer_ = next_u64();
            buffer_left_ = 64;
        }
        bool b = (buffer_ >> 63) & 1u;
        buffer_ <<= 1;
        --buffer_left_;
        return b;
    }

    BitString next_bits(std::size_t count) {
        BitString s = BitString::zeros(count);
        for (std::size_t i = 0; i < count; ++i) s.set(i, next_bit());
        return s;
    }

    /// Independent child stream. Rng instances are single-owner; use this
    /// instead of sharing one generator across parallel work items.
    Rng split(std::uint64_t stream_id) {
        return Rng(next_u64() ^ (0xA0761D6478BD642FULL * (stream_id + 1)));
    }

private:
    std::uint64_t state_;
    std::uint64_t buffer_ = 0;
    int buffer_left_ = 0;
};

/// Seed-derivation rule used everywhere a run fans a single --seed out to
/// independent purposes: FNV-1a over the tag and index, mixed into the base.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte;
        h *= 0x100000001B3ULL;
    };
    for (char c : tag) mix(static_cast<std::uint8_t>(c));
    for (int i = 0; i < 8; ++i) mix((index >> (8 * i)) & 0xFF);
    Rng r(base ^ h);
    return r.next_u64();
}

} // namespace kb
