#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kb/bits.hpp"
#include "kb/rng.hpp"

namespace kb {

/// A fixed-width binary image: one point of image space B^n. Bits are
/// row-major, most significant bit first; width is the dimension n.
class Image {
public:
    Image() = default;
    explicit Image(BitString payload) : payload_(std::move(payload)) {}

    std::size_t width() const { return payload_.size(); }
    const BitString& bits() const { return payload_; }
    bool bit(std::size_t i) const { return payload_.bit(i); }

    friend bool operator==(const Image& a, const Image& b) { return a.payload_ == b.payload_; }
    friend bool operator!=(const Image& a, const Image& b) { return !(a == b); }
    friend bool operator<(const Image& a, const Image& b) { return a.payload_ < b.payload_; }

private:
    BitString payload_;
};

/// Number of differing bits between two equal-width images.
std::size_t hamming(const Image& a, const Image& b);

enum class Ordering {
    CanonicalLexicographic,
    SeededPermutation,
    GeneratorOrder,
};

std::string ordering_tag(Ordering o, std::uint64_t seed);
std::pair<Ordering, std::uint64_t> parse_ordering_tag(const std::string& tag);

/// Where a stack came from, for reports and manifests.
struct Provenance {
    std::string generator_id;
    std::vector<std::uint64_t> params;
};

/// Ordered list of equal-width images; the central data object. A stack is
/// a list, not a set: duplicates are allowed and order is meaningful.
class StackedDataset {
public:
    StackedDataset() = default;
    explicit StackedDataset(std::size_t width_bits, Ordering ordering = Ordering::GeneratorOrder)
        : width_bits_(width_bits), ordering_(ordering) {}

    void add(Image img);

    std::size_t count() const { return images_.size(); }
    std::size_t width_bits() const { return width_bits_; }
    bool empty() const { return images_.empty(); }
    const Image& image(std::size_t i) const { return images_[i]; }
    const std::vector<Image>& images() const { return images_; }

    Ordering ordering() const { return ordering_; }
    std::uint64_t order_seed() const { return order_seed_; }
    void set_ordering(Ordering o, std::uint64_t seed = 0) { ordering_ = o; order_seed_ = seed; }

    const std::optional<Provenance>& provenance() const { return provenance_; }
    void set_provenance(Provenance p) { provenance_ = std::move(p); }

    /// Same images sorted lexicographically; ordering tag set to canonical.
    StackedDataset sorted_lexicographic() const;

private:
    std::vector<Image> images_;
    std::size_t width_bits_ = 0;
    Ordering ordering_ = Ordering::GeneratorOrder;
    std::uint64_t order_seed_ = 0;
    std::optional<Provenance> provenance_;
};

/// Concatenate all images in stack order into one string of
/// count * width_bits bits.
BitString concat_dataset(const StackedDataset& d);

/// Deterministic Fisher-Yates permutation of the images; the result is
/// tagged seeded-permutation(seed).
StackedDataset shuffle_dataset(const StackedDataset& d, std::uint64_t seed);

} // namespace kb
