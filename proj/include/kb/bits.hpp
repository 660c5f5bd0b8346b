#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kb/errors.hpp"

namespace kb {

/// Arbitrary-length sequence of bits, packed MSB-first into bytes.
///
/// Bit i lives in byte i/8 under mask 0x80 >> (i%8); padding bits in the
/// last byte are kept zero so byte-wise comparison and hashing are exact.
/// This is the universal currency of the workbench: images, datasets,
/// code streams and serialized networks are all BitStrings.
class BitString {
public:
    BitString() = default;

    static BitString zeros(std::size_t n) {
        BitString s;
        s.size_ = n;
        s.bytes_.assign((n + 7) / 8, 0);
        return s;
    }

    static BitString ones(std::size_t n) {
        BitString s = zeros(n);
        for (std::size_t i = 0; i < n; ++i) s.set(i, true);
        return s;
    }

    /// Parse a string of '0'/'1' characters.
    static BitString parse(std::string_view text) {
        BitString s = zeros(text.size());
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c != '0' && c != '1') throw InvalidArgument("bit string must be 0/1 only");
            s.set(i, c == '1');
        }
        return s;
    }

    /// Low `nbits` of `value`, most significant first.
    static BitString from_uint(std::uint64_t value, std::size_t nbits) {
        BitString s = zeros(nbits);
        for (std::size_t i = 0; i < nbits; ++i)
            s.set(i, (value >> (nbits - 1 - i)) & 1u);
        return s;
    }

    static BitString from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
        if (bytes.size() * 8 < nbits) throw InvalidArgument("byte buffer shorter than bit count");
        BitString s;
        s.size_ = nbits;
        s.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((nbits + 7) / 8));
        if (nbits % 8 != 0 && !s.bytes_.empty())
            s.bytes_.back() &= static_cast<std::uint8_t>(0xFF00u >> (nbits % 8));
        return s;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool bit(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }
    bool operator[](std::size_t i) const { return bit(i); }

    void set(std::size_t i, bool v) {
        std::uint8_t mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
        if (v) bytes_[i >> 3] |= mask;
        else bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    void push_back(bool v) {
        if (size_ % 8 == 0) bytes_.push_back(0);
        ++size_;
        set(size_ - 1, v);
    }

    /// Append the low `width` bits of `value`, most significant first.
    void append_uint(std::uint64_t value, std::size_t width) {
        for (std::size_t i = 0; i < width; ++i)
            push_back((value >> (width - 1 - i)) & 1u);
    }

    void append(const BitString& other) {
        if (size_ % 8 == 0) {
            bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
            size_ += other.size_;
        } else {
            for (std::size_t i = 0; i < other.size_; ++i) push_back(other.bit(i));
        }
    }

    /// Bits [from, from+len) as a new string.
    BitString slice(std::size_t from, std::size_t len) const {
        BitString s = zeros(len);
        for (std::size_t i = 0; i < len; ++i) s.set(i, bit(from + i));
        return s;
    }

    /// Interpret the whole string (size <= 64) as an unsigned integer, MSB first.
    std::uint64_t to_uint() const {
        if (size_ > 64) throw InvalidArgument("bit string too long for uint64");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < size_; ++i) v = (v << 1) | static_cast<std::uint64_t>(bit(i));
        return v;
    }

    std::string to_string() const {
        std::string t(size_, '0');
        for (std::size_t i = 0; i < size_; ++i)
            if (bit(i)) t[i] = '1';
        return t;
    }

    /// Packed bytes, MSB-first, last byte zero-padded.
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.size_ == b.size_ && a.bytes_ == b.bytes_;
    }
    friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }

    /// Lexicographic order on the bit sequence (shorter prefix first).
    friend bool operator<(const BitString& a, const BitString& b) {
        std::size_t n = a.size_ < b.size_ ? a.size_ : b.size_;
        for (std::size_t i = 0; i < n; ++i) {
            bool x = a.bit(i), y = b.bit(i);
            if (x != y) return y;
        }
        return a.size_ < b.size_;
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

/// Cursor that consumes fixed-width codes from a BitString, MSB first.
class BitReader {
public:
    explicit BitReader(const BitString& s) : src_(&s) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return src_->size() - pos_; }

    std::uint64_t read(std::size_t width) {
        if (remaining() < width) throw DecodeError("truncated code stream", pos_);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i, ++pos_)
            v = (v << 1) | static_cast<std::uint64_t>(src_->bit(pos_));
        return v;
    }

private:
    const BitString* src_;
    std::size_t pos_ = 0;
};

} // namespace kb
