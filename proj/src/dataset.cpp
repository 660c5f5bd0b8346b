#include "kb/dataset.hpp"

#include <algorithm>
#include <bit>

namespace kb {

std::size_t hamming(const Image& a, const Image& b) {
    if (a.width() != b.width()) throw WidthMismatch(a.width(), b.width());
    const auto& ba = a.bits().bytes();
    const auto& bb = b.bits().bytes();
    std::size_t count = 0;
    for (std::size_t i = 0; i < ba.size(); ++i)
        count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(ba[i] ^ bb[i])));
    return count;
}

std::string ordering_tag(Ordering o, std::uint64_t seed) {
    switch (o) {
        case Ordering::CanonicalLexicographic: return "lex";
        case Ordering::GeneratorOrder: return "gen";
        case Ordering::SeededPermutation: return "perm:" + std::to_string(seed);
    }
    return "gen";
}

std::pair<Ordering, std::uint64_t> parse_ordering_tag(const std::string& tag) {
    if (tag == "lex") return {Ordering::CanonicalLexicographic, 0};
    if (tag == "gen") return {Ordering::GeneratorOrder, 0};
    if (tag.rfind("perm:", 0) == 0)
        return {Ordering::SeededPermutation, std::stoull(tag.substr(5))};
    throw MalformedDataset("unknown ordering tag: " + tag);
}

void StackedDataset::add(Image img) {
    if (images_.empty() && width_bits_ == 0) width_bits_ = img.width();
    if (img.width() != width_bits_)
        throw MalformedDataset("mixed image widths: " + std::to_string(img.width()) +
                               " in a stack of width " + std::to_string(width_bits_));
    images_.push_back(std::move(img));
}

StackedDataset StackedDataset::sorted_lexicographic() const {
    StackedDataset out = *this;
    std::sort(out.images_.begin(), out.images_.end());
    out.set_ordering(Ordering::CanonicalLexicographic);
    return out;
}

BitString concat_dataset(const StackedDataset& d) {
    if (d.empty()) throw MalformedDataset("cannot concatenate an empty dataset");
    BitString s;
    for (std::size_t i = 0; i < d.count(); ++i) s.append(d.image(i).bits());
    return s;
}

StackedDataset shuffle_dataset(const StackedDataset& d, std::uint64_t seed) {
    StackedDataset out = d;
    Rng rng(seed);
    std::vector<Image> imgs = d.images();
    for (std::size_t i = imgs.size(); i > 1; --i)
        std::swap(imgs[i - 1], imgs[rng.below(i)]);
    StackedDataset shuffled(d.width_bits(), Ordering::SeededPermutation);
    shuffled.set_ordering(Ordering::SeededPermutation, seed);
    if (d.provenance()) shuffled.set_provenance(*d.provenance());
    for (auto& im : imgs) shuffled.add(std::move(im));
    return shuffled;
}

} // namespace kb
