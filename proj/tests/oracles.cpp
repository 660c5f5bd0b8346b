#include "oracles.hpp"

#include <cmath>

namespace oracles {

bool rule110_cell(bool left, bool mid, bool right) {
    if (left && mid && right) return false;  // 111 -> 0
    if (left && mid && !right) return true;  // 110 -> 1
    if (left && !mid && right) return true;  // 101 -> 1
    if (left && !mid && !right) return false; // 100 -> 0
    if (!left && mid && right) return true;  // 011 -> 1
    if (!left && mid && !right) return true; // 010 -> 1
    if (!left && !mid && right) return true; // 001 -> 1
    return false;                            // 000 -> 0
}

kb::BitString rule110_row(const kb::BitString& row) {
    const std::size_t n = row.size();
    kb::BitString next = kb::BitString::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool l = row.bit((i + n - 1) % n);
        bool m = row.bit(i);
        bool r = row.bit((i + 1) % n);
        next.set(i, rule110_cell(l, m, r));
    }
    return next;
}

kb::BitString rule110_evolve(kb::BitString row, std::uint64_t steps) {
    for (std::uint64_t t = 0; t < steps; ++t) row = rule110_row(row);
    return row;
}

namespace {

// 16^e mod m by binary exponentiation.
double pow16_mod(long e, long m) {
    if (m == 1) return 0.0;
    std::uint64_t result = 1, base = 16 % static_cast<std::uint64_t>(m);
    std::uint64_t mm = static_cast<std::uint64_t>(m);
    std::uint64_t ee = static_cast<std::uint64_t>(e);
    while (ee > 0) {
        if (ee & 1) result = (result * base) % mm;
        base = (base * base) % mm;
        ee >>= 1;
    }
    return static_cast<double>(result);
}

// sum_k 16^(d-k) / (8k+j), fractional part only
double bbp_series(int j, long d) {
    double s = 0.0;
    for (long k = 0; k < d; ++k) {
        long denom = 8 * k + j;
        s += pow16_mod(d - k, denom) / static_cast<double>(denom);
        s -= std::floor(s);
    }
    for (long k = d; k <= d + 64; ++k) {
        double t = std::pow(16.0, static_cast<double>(d - k)) / static_cast<double>(8 * k + j);
        if (t < 1e-18) break;
        s += t;
    }
    return s - std::floor(s);
}

} // namespace

int pi_hex_digit(long d) {
    double x = 4.0 * bbp_series(1, d) - 2.0 * bbp_series(4, d) - bbp_series(5, d) - bbp_series(6, d);
    x = x - std::floor(x);
    return static_cast<int>(x * 16.0);
}

kb::BitString pi_bits_bbp(std::size_t count) {
    kb::BitString out = kb::BitString::zeros(count);
    std::size_t digits = (count + 3) / 4;
    for (std::size_t d = 0; d < digits; ++d) {
        int h = pi_hex_digit(static_cast<long>(d));
        for (int b = 0; b < 4; ++b) {
            std::size_t pos = d * 4 + static_cast<std::size_t>(b);
            if (pos < count) out.set(pos, (h >> (3 - b)) & 1);
        }
    }
    return out;
}

} // namespace oracles
