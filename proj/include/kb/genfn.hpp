#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kb/bits.hpp"
#include "kb/dataset.hpp"

namespace kb {

// --- elementary cellular automata -----------------------------------------

/// One step of an elementary CA on a circular lattice. Cell i's next state
/// is bit (4*left + 2*cell + right) of the rule number.
BitString ca_step(const BitString& row, std::uint8_t rule);
BitString ca_evolve(BitString row, std::uint8_t rule, std::uint64_t steps);

// --- generating functions ---------------------------------------------------

/// A registered map g: B^m -> B^n with an honest description length (the
/// size in bits of its canonical self-description, used as the k* hint in
/// complexity arithmetic). `background_mask`, when present, marks which of
/// the n output positions are background (1 = background) for a given
/// parameter value.
struct GeneratingFunction {
    std::string id;
    int m = 0;
    int n = 0;
    std::int64_t description_length = 0;
    std::function<Image(std::uint64_t)> eval;
    std::function<BitString(std::uint64_t)> background_mask;

    bool has_mask() const { return static_cast<bool>(background_mask); }
    std::uint64_t param_count() const { return m >= 63 ? ~0ULL : (1ULL << m); }
};

/// A binary sprite pattern with its own height and width.
struct Sprite {
    int height = 0;
    int width = 0;
    BitString pattern; // row-major, height*width bits

    static Sprite full(int h, int w) { return Sprite{h, w, BitString::ones(static_cast<std::size_t>(h) * w)}; }
};

/// g(theta) places `sprite` on a grid_h x grid_w toroidal grid at the offset
/// decoded from theta (dx in the high dx_bits, dy in the low dy_bits; both
/// wrap cyclically). Background = complement of the sprite's bounding box.
GeneratingFunction sprite_genfn(int grid_h, int grid_w, const Sprite& sprite, int dx_bits, int dy_bits);

/// g(theta) = the row after min(theta, t_max) steps of Rule 110 on a
/// circular lattice of width n starting from seed_row. Parameter values
/// above t_max clamp to t_max. m = ceil(log2(t_max+1)).
GeneratingFunction rule110_genfn(int n, std::uint64_t t_max, const BitString& seed_row);

/// g(theta) = n bits of the fractional binary expansion of pi starting at
/// bit position theta*n. Requires 2^m * n <= budget_bits.
GeneratingFunction pi_digits_genfn(int m, int n, std::size_t budget_bits = 1u << 16);

// --- stacking ---------------------------------------------------------------

enum class BackgroundPolicy { Blank, SeededRandom };

struct BackgroundSpec {
    BackgroundPolicy policy = BackgroundPolicy::Blank;
    int per_param = 1;      // images per theta under SeededRandom
    std::uint64_t seed = 0; // stream seed for the fills
};

/// The image for (theta, variant j) under a background policy: blank keeps
/// g(theta) as generated; seeded-random fills the masked positions from a
/// derived stream. build_stack and classifier_from_genfn share this rule so
/// the classifier recognizes exactly the images the stack builder makes.
Image apply_background(const GeneratingFunction& g, std::uint64_t theta, const BackgroundSpec& bg, int variant);

/// One image per (theta, background variant), in parameter-list order
/// unless `order` says otherwise. Duplicates are kept: a stack is a list.
StackedDataset build_stack(const GeneratingFunction& g, const std::vector<std::uint64_t>& params,
                           const BackgroundSpec& bg = {}, Ordering order = Ordering::GeneratorOrder,
                           std::uint64_t order_seed = 0);

/// All 2^m parameter values in integer order.
std::vector<std::uint64_t> all_params(const GeneratingFunction& g);

// --- registry ----------------------------------------------------------------

/// The desk-scale instances addressable by id from the CLI and tests.
std::vector<GeneratingFunction> genfn_registry();
GeneratingFunction genfn_by_id(const std::string& id);

} // namespace kb
