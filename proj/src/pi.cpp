#include "kb/pi.hpp"

#include <fstream>
#include <mutex>
#include <vector>

#include "kb/io.hpp"

namespace kb {
namespace {

// Little-endian limb big integer, fixed width. Only the operations the
// Machin series needs: divide by a small constant, add, subtract, shift.
using Big = std::vector<std::uint64_t>;

void div_small(Big& a, std::uint64_t d) {
    unsigned __int128 rem = 0;
    for (std::size_t i = a.size(); i-- > 0;) {
        unsigned __int128 cur = (rem << 64) | a[i];
        a[i] = static_cast<std::uint64_t>(cur / d);
        rem = cur % d;
    }
}

void add(Big& a, const Big& b) {
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        unsigned __int128 s = static_cast<unsigned __int128>(a[i]) + b[i] + carry;
        a[i] = static_cast<std::uint64_t>(s);
        carry = s >> 64;
    }
}

void sub(Big& a, const Big& b) {
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t bi = b[i] + borrow;
        borrow = (bi < borrow) || (a[i] < bi) ? 1 : 0;
        a[i] -= bi;
    }
}

void shl(Big& a, unsigned bits) {
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint64_t nxt = a[i] >> (64 - bits);
        a[i] = (a[i] << bits) | carry;
        carry = nxt;
    }
}

bool is_zero(const Big& a) {
    for (std::uint64_t w : a)
        if (w) return false;
    return true;
}

// arctan(1/x) scaled by 2^scale_bit.
Big atan_inv(std::uint64_t x, std::size_t limbs, std::size_t scale_bit) {
    Big term(limbs, 0);
    term[scale_bit / 64] = 1ULL << (scale_bit % 64);
    div_small(term, x);
    Big acc = term;
    std::uint64_t x2 = x * x;
    for (std::uint64_t k = 1;; ++k) {
        div_small(term, x2);
        if (is_zero(term)) break;
        Big t = term;
        div_small(t, 2 * k + 1);
        if (k % 2 == 1) sub(acc, t);
        else add(acc, t);
    }
    return acc;
}

BitString compute_pi_bits(std::size_t count) {
    const std::size_t guard = 128;
    const std::size_t scale_bit_offset = 4; // headroom for the integer part (pi < 4)
    std::size_t total_bits = count + guard + 64;
    std::size_t limbs = (total_bits + 63) / 64 + 1;
    std::size_t scale_bit = limbs * 64 - scale_bit_offset;

    Big a = atan_inv(5, limbs, scale_bit);
    shl(a, 4); // 16 atan(1/5)
    Big b = atan_inv(239, limbs, scale_bit);
    shl(b, 2); // 4 atan(1/239)
    sub(a, b);

    // Fraction bit j sits scale_bit-1-j below the top; integer part is 3.
    BitString out = BitString::zeros(count);
    for (std::size_t j = 0; j < count; ++j) {
        std::size_t pos = scale_bit - 1 - j;
        out.set(j, (a[pos / 64] >> (pos % 64)) & 1u);
    }
    return out;
}

std::mutex cache_mutex;
BitString cached;

} // namespace

BitString pi_fraction_bits(std::size_t count) {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (cached.size() < count) {
        std::size_t target = 4096;
        while (target < count) target *= 2;
        cached = compute_pi_bits(target);
    }
    return cached.slice(0, count);
}

void save_pi_cache(const std::string& path, std::size_t count) {
    write_bits_file(path, pi_fraction_bits(count));
}

BitString load_pi_cache(const std::string& path) {
    return read_bits_file(path);
}

} // namespace kb
