#include "kb/lzw.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <vector>

namespace kb {
namespace lzw {
namespace {

inline std::size_t code_width(std::uint32_t dict_size) {
    return static_cast<std::size_t>(std::bit_width(dict_size - 1));
}

struct TrieNode {
    std::int32_t child[2] = {-1, -1};
    std::int32_t code = -1;
};

class Trie {
public:
    Trie() {
        nodes_.reserve(1024);
        nodes_.emplace_back(); // root
    }

    std::int32_t step(std::int32_t node, bool bit) const {
        return nodes_[static_cast<std::size_t>(node)].child[bit];
    }
    std::int32_t code_at(std::int32_t node) const {
        return nodes_[static_cast<std::size_t>(node)].code;
    }

    /// Walk/extend along bits [from, from+len) of x starting at `node`;
    /// returns the final node.
    std::int32_t extend(std::int32_t node, const BitString& x, std::size_t from, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            bool b = x.bit(from + i);
            std::int32_t nxt = nodes_[static_cast<std::size_t>(node)].child[b];
            if (nxt < 0) {
                nxt = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
                nodes_[static_cast<std::size_t>(node)].child[b] = nxt;
            }
            node = nxt;
        }
        return node;
    }

    /// Assign `code` to `node` unless an earlier code already lives there
    /// (duplicate phrase-pair: the earliest id keeps winning the lookup).
    void claim(std::int32_t node, std::int32_t code) {
        auto& c = nodes_[static_cast<std::size_t>(node)].code;
        if (c < 0) c = code;
    }

private:
    std::vector<TrieNode> nodes_;
};

} // namespace

BitString compress(const BitString& x) {
    BitString out;
    if (x.empty()) return out;

    Trie trie;
    std::int32_t leaf0 = trie.extend(0, BitString::parse("0"), 0, 1);
    trie.claim(leaf0, 0);
    std::int32_t leaf1 = trie.extend(0, BitString::parse("1"), 0, 1);
    trie.claim(leaf1, 1);

    std::uint32_t size = 2;
    std::size_t pos = 0;
    std::size_t prev_pos = 0, prev_len = 0;
    bool have_prev = false;

    const std::size_t n = x.size();
    while (pos < n) {
        // Longest dictionary prefix of x[pos..]; singletons guarantee >= 1.
        std::int32_t node = 0;
        std::int32_t best_code = -1;
        std::size_t best_len = 0, len = 0;
        while (pos + len < n) {
            std::int32_t nxt = trie.step(node, x.bit(pos + len));
            if (nxt < 0) break;
            node = nxt;
            ++len;
            std::int32_t c = trie.code_at(node);
            if (c >= 0) {
                best_code = c;
                best_len = len;
            }
        }
        out.append_uint(static_cast<std::uint64_t>(best_code), code_width(size));

        if (have_prev && size < kDictionaryCap) {
            std::int32_t end = trie.extend(0, x, prev_pos, prev_len);
            end = trie.extend(end, x, pos, best_len);
            trie.claim(end, static_cast<std::int32_t>(size));
            ++size;
        }
        prev_pos = pos;
        prev_len = best_len;
        have_prev = true;
        pos += best_len;
    }
    return out;
}

BitString decompress(const BitString& code) {
    BitString out;
    if (code.empty()) return out;

    std::vector<BitString> entries;
    entries.reserve(1024);
    entries.push_back(BitString::parse("0"));
    entries.push_back(BitString::parse("1"));

    std::uint32_t size = 2;
    BitReader reader(code);
    BitString prev;
    bool have_prev = false;

    while (reader.remaining() > 0) {
        std::size_t width = code_width(size);
        std::size_t at = reader.offset();
        std::uint64_t c = reader.read(width);
        if (c >= size) throw DecodeError("code out of range", at);
        const BitString& cur = entries[static_cast<std::size_t>(c)];
        out.append(cur);

        if (have_prev && size < kDictionaryCap) {
            BitString entry = prev;
            entry.append(cur);
            entries.push_back(std::move(entry));
            ++size;
        }
        prev = entries[static_cast<std::size_t>(c)];
        have_prev = true;
    }
    return out;
}

std::int64_t k_hat(const BitString& x) {
    return static_cast<std::int64_t>(compress(x).size()) + kHeaderBits;
}

double entropy_rate(const BitString& x) {
    if (x.empty()) throw InvalidArgument("entropy rate of an empty string is undefined");
    double rate = static_cast<double>(compress(x).size()) / static_cast<double>(x.size());
    return std::clamp(rate, 0.0, 2.0);
}

} // namespace lzw

ComplexityReport description_lengths(const StackedDataset& dataset, std::int64_t k_star_hint) {
    BitString s = concat_dataset(dataset);
    ComplexityReport rep;
    rep.d = static_cast<std::int64_t>(s.size());
    rep.d_lzw = static_cast<std::int64_t>(lzw::compress(s).size());
    std::int64_t count = static_cast<std::int64_t>(dataset.count());
    std::int64_t log_count = std::bit_width(static_cast<std::uint64_t>(count - 1));
    rep.d_k = k_star_hint + count * log_count;
    rep.h = std::clamp(static_cast<double>(rep.d_lzw) / static_cast<double>(rep.d), 0.0, 2.0);
    std::int64_t kh = rep.d_lzw + lzw::kHeaderBits;
    rep.r = (rep.h * static_cast<double>(rep.d)) / static_cast<double>(std::max<std::int64_t>(1, kh));
    return rep;
}

std::string ComplexityReport::to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "{\"d\":" << d << ",\"d_k\":" << d_k << ",\"d_lzw\":" << d_lzw
       << ",\"h\":" << h << ",\"r\":" << r << "}";
    return os.str();
}

std::string classify_depth(double r) {
    if (r >= 4.0) return "deep";
    if (r <= 1.5) return "shallow";
    return "indeterminate";
}

} // namespace kb
