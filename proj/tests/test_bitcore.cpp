#include <doctest.h>

#include <set>

#include "kb/bits.hpp"
#include "kb/dataset.hpp"
#include "kb/rng.hpp"

using namespace kb;

TEST_CASE("bitstring basics") {
    BitString s = BitString::parse("10110");
    CHECK(s.size() == 5);
    CHECK(s.to_string() == "10110");
    CHECK(s.to_uint() == 22);
    CHECK(BitString::from_uint(22, 5) == s);
    CHECK(BitString::from_uint(1, 3).to_string() == "001");

    BitString t;
    CHECK(t.empty());
    t.append(s);
    t.append(s);
    CHECK(t.to_string() == "1011010110");
    CHECK(t.slice(5, 5) == s);

    CHECK(BitString::parse("0") < BitString::parse("1"));
    CHECK(BitString::parse("01") < BitString::parse("10"));
    CHECK(BitString::parse("1") < BitString::parse("10"));
    CHECK_THROWS_AS(BitString::parse("10a"), InvalidArgument);
}

TEST_CASE("bitstring byte packing is MSB-first with zero padding") {
    BitString s = BitString::parse("101100111");
    const auto& b = s.bytes();
    REQUIRE(b.size() == 2);
    CHECK(b[0] == 0xB3);
    CHECK(b[1] == 0x80);
    CHECK(BitString::from_bytes(b, 9) == s);
}

TEST_CASE("concat_dataset") {
    StackedDataset d(4);
    d.add(Image(BitString::parse("1010")));
    d.add(Image(BitString::parse("0011")));
    CHECK(concat_dataset(d).to_string() == "10100011");
    CHECK(concat_dataset(d).size() == 8);

    // l(D) = count * width
    StackedDataset e(8);
    for (int i = 0; i < 3; ++i) e.add(Image(BitString::from_uint(static_cast<std::uint64_t>(i), 8)));
    CHECK(concat_dataset(e).size() == 24);

    StackedDataset empty(4);
    CHECK_THROWS_AS(concat_dataset(empty), MalformedDataset);
    CHECK_THROWS_AS(d.add(Image(BitString::parse("10"))), MalformedDataset);
}

TEST_CASE("hamming distance") {
    auto img = [](const char* s) { return Image(BitString::parse(s)); };
    CHECK(hamming(img("1010"), img("1010")) == 0);
    CHECK(hamming(img("1111"), img("0000")) == 4);
    CHECK(hamming(img("10110"), img("10011")) == 2);
    CHECK_THROWS_AS(hamming(img("101"), img("10")), WidthMismatch);
}

TEST_CASE("hamming triangle inequality on random triples") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Image a(rng.next_bits(24)), b(rng.next_bits(24)), c(rng.next_bits(24));
        CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c));
        CHECK(hamming(a, b) == hamming(b, a));
    }
}

TEST_CASE("shuffle_dataset determinism and multiset preservation") {
    StackedDataset d(4);
    Rng rng(11);
    for (int i = 0; i < 8; ++i) d.add(Image(rng.next_bits(4)));

    StackedDataset s1 = shuffle_dataset(d, 42);
    StackedDataset s2 = shuffle_dataset(d, 42);
    CHECK(concat_dataset(s1) == concat_dataset(s2));
    CHECK(s1.ordering() == Ordering::SeededPermutation);
    CHECK(s1.order_seed() == 42);

    std::multiset<std::string> before, after;
    for (std::size_t i = 0; i < d.count(); ++i) before.insert(d.image(i).bits().to_string());
    for (std::size_t i = 0; i < s1.count(); ++i) after.insert(s1.image(i).bits().to_string());
    CHECK(before == after);

    StackedDataset single(4);
    single.add(Image(BitString::parse("1010")));
    StackedDataset ss = shuffle_dataset(single, 999);
    CHECK(ss.image(0) == single.image(0));
}

TEST_CASE("rng determinism across instances") {
    Rng a(123456), b(123456);
    for (int i = 0; i < 10000; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c(1), d(2);
    CHECK(c.next_u64() != d.next_u64());

    CHECK(derive_seed(5, "trials", 0) != derive_seed(5, "trials", 1));
    CHECK(derive_seed(5, "trials", 0) == derive_seed(5, "trials", 0));
    CHECK(derive_seed(5, "trials", 0) != derive_seed(5, "cells", 0));
}

TEST_CASE("ordering tags round-trip") {
    CHECK(ordering_tag(Ordering::CanonicalLexicographic, 0) == "lex");
    CHECK(ordering_tag(Ordering::SeededPermutation, 9) == "perm:9");
    auto [o, s] = parse_ordering_tag("perm:42");
    CHECK(o == Ordering::SeededPermutation);
    CHECK(s == 42);
    CHECK_THROWS_AS(parse_ordering_tag("bogus"), MalformedDataset);
}
