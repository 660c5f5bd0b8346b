#include "kb/genfn.hpp"

#include <bit>
#include <memory>

#include "kb/pi.hpp"
#include "kb/rng.hpp"

namespace kb {

BitString ca_step(const BitString& row, std::uint8_t rule) {
    const std::size_t n = row.size();
    BitString next = BitString::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned left = row.bit((i + n - 1) % n);
        unsigned mid = row.bit(i);
        unsigned right = row.bit((i + 1) % n);
        unsigned idx = (left << 2) | (mid << 1) | right;
        next.set(i, (rule >> idx) & 1u);
    }
    return next;
}

BitString ca_evolve(BitString row, std::uint8_t rule, std::uint64_t steps) {
    for (std::uint64_t t = 0; t < steps; ++t) row = ca_step(row, rule);
    return row;
}

GeneratingFunction sprite_genfn(int grid_h, int grid_w, const Sprite& sprite, int dx_bits, int dy_bits) {
    if (sprite.height > grid_h || sprite.width > grid_w)
        throw InvalidArgument("sprite larger than grid");
    if (sprite.pattern.size() != static_cast<std::size_t>(sprite.height) * sprite.width)
        throw InvalidArgument("sprite pattern size does not match its dimensions");
    if (dx_bits < 0 || dy_bits < 0 || dx_bits + dy_bits > 32)
        throw InvalidArgument("offset field widths out of range");

    GeneratingFunction g;
    g.id = "sprite" + std::to_string(grid_h) + "x" + std::to_string(grid_w);
    g.m = dx_bits + dy_bits;
    g.n = grid_h * grid_w;
    // kind tag + grid dims + sprite dims + offset field widths + pattern bits
    g.description_length = 16 + 16 + 16 + 16 + 16 + 8 + 8 +
                           static_cast<std::int64_t>(sprite.pattern.size());

    auto decode = [=](std::uint64_t theta) {
        std::uint64_t dy_mask = dy_bits >= 64 ? ~0ULL : ((1ULL << dy_bits) - 1);
        int dx = static_cast<int>((theta >> dy_bits) % static_cast<std::uint64_t>(grid_w));
        int dy = static_cast<int>((theta & dy_mask) % static_cast<std::uint64_t>(grid_h));
        return std::pair<int, int>(dx, dy);
    };

    Sprite sp = sprite;
    g.eval = [=](std::uint64_t theta) {
        auto [dx, dy] = decode(theta);
        BitString img = BitString::zeros(static_cast<std::size_t>(grid_h) * grid_w);
        for (int i = 0; i < sp.height; ++i)
            for (int j = 0; j < sp.width; ++j) {
                int r = (dy + i) % grid_h;
                int c = (dx + j) % grid_w;
                img.set(static_cast<std::size_t>(r) * grid_w + c, sp.pattern.bit(static_cast<std::size_t>(i) * sp.width + j));
            }
        return Image(std::move(img));
    };
    g.background_mask = [=](std::uint64_t theta) {
        auto [dx, dy] = decode(theta);
        BitString mask = BitString::ones(static_cast<std::size_t>(grid_h) * grid_w);
        for (int i = 0; i < sp.height; ++i)
            for (int j = 0; j < sp.width; ++j) {
                int r = (dy + i) % grid_h;
                int c = (dx + j) % grid_w;
                mask.set(static_cast<std::size_t>(r) * grid_w + c, false);
            }
        return mask;
    };
    return g;
}

GeneratingFunction rule110_genfn(int n, std::uint64_t t_max, const BitString& seed_row) {
    if (n < 3) throw InvalidArgument("lattice width must be at least 3");
    if (t_max < 1) throw InvalidArgument("t_max must be at least 1");
    if (seed_row.size() != static_cast<std::size_t>(n)) throw WidthMismatch(seed_row.size(), static_cast<std::size_t>(n));

    GeneratingFunction g;
    g.id = "rule110-" + std::to_string(n);
    g.m = static_cast<int>(std::bit_width(t_max));
    g.n = n;
    // kind tag + rule byte + width + t_max + seed row
    g.description_length = 16 + 8 + 16 + 16 + n;
    BitString seed = seed_row;
    g.eval = [=](std::uint64_t theta) {
        std::uint64_t steps = theta > t_max ? t_max : theta;
        return Image(ca_evolve(seed, 110, steps));
    };
    return g;
}

GeneratingFunction pi_digits_genfn(int m, int n, std::size_t budget_bits) {
    if (m < 0 || n < 1) throw InvalidArgument("bad pi genfn dimensions");
    std::size_t needed = (static_cast<std::size_t>(1) << m) * static_cast<std::size_t>(n);
    if (needed > budget_bits)
        throw BudgetExceeded(needed, budget_bits);

    GeneratingFunction g;
    g.id = "pi-" + std::to_string(m) + "x" + std::to_string(n);
    g.m = m;
    g.n = n;
    // kind tag + m + n + fixed allowance for the digit-extraction program
    g.description_length = 16 + 16 + 16 + 512;
    // One table for all thetas; shared so every eval reuses it.
    auto table = std::make_shared<BitString>(pi_fraction_bits(needed));
    g.eval = [table, n](std::uint64_t theta) {
        return Image(table->slice(static_cast<std::size_t>(theta) * n, static_cast<std::size_t>(n)));
    };
    return g;
}

Image apply_background(const GeneratingFunction& g, std::uint64_t theta, const BackgroundSpec& bg, int variant) {
    Image base = g.eval(theta);
    if (bg.policy == BackgroundPolicy::Blank || !g.has_mask()) return base;
    BitString mask = g.background_mask(theta);
    BitString bits = base.bits();
    Rng rng(derive_seed(bg.seed, "background", theta * 4096 + static_cast<std::uint64_t>(variant)));
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (mask.bit(i)) bits.set(i, rng.next_bit());
    return Image(std::move(bits));
}

StackedDataset build_stack(const GeneratingFunction& g, const std::vector<std::uint64_t>& params,
                           const BackgroundSpec& bg, Ordering order, std::uint64_t order_seed) {
    if (params.empty()) throw InvalidArgument("parameter list must be non-empty");
    int variants = bg.policy == BackgroundPolicy::SeededRandom ? bg.per_param : 1;
    StackedDataset d(static_cast<std::size_t>(g.n), Ordering::GeneratorOrder);
    for (std::uint64_t theta : params)
        for (int j = 0; j < variants; ++j) d.add(apply_background(g, theta, bg, j));
    d.set_provenance(Provenance{g.id, params});

    if (order == Ordering::CanonicalLexicographic) return d.sorted_lexicographic();
    if (order == Ordering::SeededPermutation) return shuffle_dataset(d, order_seed);
    return d;
}

std::vector<std::uint64_t> all_params(const GeneratingFunction& g) {
    std::vector<std::uint64_t> params(g.param_count());
    for (std::uint64_t i = 0; i < params.size(); ++i) params[i] = i;
    return params;
}

std::vector<GeneratingFunction> genfn_registry() {
    std::vector<GeneratingFunction> fns;
    fns.push_back(sprite_genfn(3, 3, Sprite::full(2, 2), 2, 2)); // n=9,  m=4
    fns.push_back(sprite_genfn(4, 4, Sprite::full(2, 2), 2, 2)); // n=16, m=4
    fns.push_back(sprite_genfn(8, 8, Sprite::full(2, 2), 3, 3)); // n=64, m=6
    fns.push_back(rule110_genfn(8, 7, BitString::parse("00010000")));
    fns.push_back(rule110_genfn(16, 15, BitString::parse("0000000010000000")));
    fns.push_back(pi_digits_genfn(3, 8));  // n=8,  64 pi bits
    fns.push_back(pi_digits_genfn(4, 16)); // n=16, 256 pi bits
    return fns;
}

GeneratingFunction genfn_by_id(const std::string& id) {
    for (auto& g : genfn_registry())
        if (g.id == id) return g;
    throw InvalidArgument("unknown generating function id: " + id);
}

} // namespace kb
