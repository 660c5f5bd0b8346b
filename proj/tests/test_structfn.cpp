#include <doctest.h>

#include <cmath>
#include <set>

#include "kb/lzw.hpp"
#include "kb/rng.hpp"
#include "kb/structfn.hpp"
#include "oracles.hpp"

using namespace kb;

TEST_CASE("set description kinds: cost, size, membership") {
    BitString x = BitString::parse("1010101010101010");

    SetDescription list = SetDescription::explicit_list({x, BitString::zeros(16)});
    CHECK(list.cost_bits() == 16 + 2 * 16);
    CHECK(list.log2_size() == doctest::Approx(1.0));
    CHECK(list.contains(x));
    CHECK(!list.contains(BitString::ones(16)));

    SetDescription ball = SetDescription::hamming_ball(BitString::zeros(16), 2);
    CHECK(ball.cost_bits() == 16 + 16 + 4);
    CHECK(ball.log2_size() == doctest::Approx(std::log2(1.0 + 16.0 + 120.0)));
    CHECK(ball.contains(BitString::parse("0100000000000010")));
    CHECK(!ball.contains(BitString::parse("0111000000000000")));

    // affine span of two independent vectors through an offset
    SetDescription aff = SetDescription::affine_subspace(
        {BitString::parse("1100"), BitString::parse("0011"), BitString::parse("1111")},
        BitString::parse("1000"));
    CHECK(aff.cost_bits() == 16 + 3 * 4); // rank 2
    CHECK(aff.log2_size() == doctest::Approx(2.0));
    CHECK(aff.contains(BitString::parse("1000")));
    CHECK(aff.contains(BitString::parse("0100")));  // 1000 ^ 1100
    CHECK(aff.contains(BitString::parse("1011")));  // 1000 ^ 0011
    CHECK(!aff.contains(BitString::parse("1001")));

    GeneratingFunction g = rule110_genfn(8, 7, BitString::parse("00010000"));
    SetDescription orbit = SetDescription::genfn_orbit(g, 0b111);
    CHECK(orbit.cost_bits() == 16 + g.description_length + g.m);
    std::set<std::string> reachable;
    for (std::uint64_t t = 0; t <= 7; ++t)
        reachable.insert(oracles::rule110_evolve(BitString::parse("00010000"), t).to_string());
    CHECK(orbit.log2_size() == doctest::Approx(std::log2(static_cast<double>(reachable.size()))));
    for (const auto& row : reachable) CHECK(orbit.contains(BitString::parse(row)));
}

TEST_CASE("structure function envelope properties") {
    Rng rng(55);
    BitString x = rng.next_bits(16);

    std::vector<SetDescription> family;
    family.push_back(SetDescription::hamming_ball(x, 1));
    family.push_back(SetDescription::hamming_ball(x, 4));
    family.push_back(SetDescription::hamming_ball(BitString::zeros(16), 1)); // may not contain x
    family.push_back(SetDescription::explicit_list({x, BitString::zeros(16), BitString::ones(16)}));

    StructureCurve curve = structure_function(x, family);

    // phi starts at (0, len) and is non-increasing
    REQUIRE(!curve.points.empty());
    CHECK(curve.points.front().k == 0);
    CHECK(curve.points.front().log_size == doctest::Approx(16.0));
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].k > curve.points[i - 1].k);
        CHECK(curve.points[i].log_size <= curve.points[i - 1].log_size + 1e-12);
    }
    // the singleton always drives the curve to zero
    CHECK(curve.points.back().log_size == doctest::Approx(0.0));

    // determinism w.r.t. family order
    std::vector<SetDescription> reversed(family.rbegin(), family.rend());
    StructureCurve curve2 = structure_function(x, reversed);
    CHECK(curve2.k_star == curve.k_star);
    CHECK(curve2.two_part_min == doctest::Approx(curve.two_part_min));
    REQUIRE(curve2.points.size() == curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i)
        CHECK(curve2.points[i].log_size == doctest::Approx(curve.points[i].log_size));

    // slope sanity past k*: phi drops at most 1 per bit plus rounding
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (curve.points[i - 1].k < curve.k_star) continue;
        double drop = curve.points[i - 1].log_size - curve.points[i].log_size;
        double dk = static_cast<double>(curve.points[i].k - curve.points[i - 1].k);
        CHECK(drop <= dk + 1.0);
    }
}

TEST_CASE("exact ball at radius 0 pins the point") {
    BitString x = BitString::zeros(16);
    std::vector<SetDescription> family{SetDescription::hamming_ball(x, 0)};
    StructureCurve curve = structure_function(x, family);
    REQUIRE(curve.members.size() == 1);
    CHECK(curve.members[0].contains_x);
    CHECK(curve.members[0].log_size == doctest::Approx(0.0));
    // two informative levels only: the trivial set and the zero-size sets
    std::set<long> sizes;
    for (const auto& p : curve.points) sizes.insert(std::lround(p.log_size));
    CHECK(sizes == std::set<long>{0, 16});
}

TEST_CASE("orbit member carries the reachable-row count at its pinned cost") {
    GeneratingFunction g = genfn_by_id("rule110-16");
    BitString x = g.eval(5).bits();

    std::vector<SetDescription> family;
    family.push_back(SetDescription::genfn_orbit(g, (1ULL << g.m) - 1));
    StructureCurve curve = structure_function(x, family);

    std::set<std::string> reachable;
    for (std::uint64_t t = 0; t < g.param_count(); ++t) reachable.insert(g.eval(t).bits().to_string());

    REQUIRE(curve.members.size() == 1);
    CHECK(curve.members[0].contains_x);
    CHECK(curve.members[0].cost == 16 + g.description_length + g.m);
    CHECK(curve.members[0].log_size == doctest::Approx(std::log2(static_cast<double>(reachable.size()))));
}

TEST_CASE("sufficient statistic check on structured strings") {
    // 20 rule-110 rows: the two-part bound stays within slack of k_hat
    GeneratingFunction g = genfn_by_id("rule110-16");
    std::vector<SetDescription> family;
    family.push_back(SetDescription::genfn_orbit(g, (1ULL << g.m) - 1));
    for (std::uint64_t t = 0; t < 20; ++t) {
        BitString row = g.eval(t % g.param_count()).bits();
        StructureCurve curve = structure_function(row, family);
        SufficiencyReport rep = sufficient_statistic_check(curve, row);
        CHECK(rep.consistent);
        CHECK(rep.two_part <= static_cast<double>(rep.k_hat + 64));
    }

    BitString zeros = BitString::zeros(16);
    StructureCurve curve = structure_function(zeros, {});
    SufficiencyReport rep = sufficient_statistic_check(curve, zeros);
    // the trivial set caps the two-part length at the raw length
    CHECK(rep.two_part == doctest::Approx(16.0));
    CHECK(rep.consistent);

    std::string j = rep.to_json();
    CHECK(j.find("\"consistent\":true") != std::string::npos);
    CHECK(j.find("\"two_part\":") != std::string::npos);
}

TEST_CASE("curve csv export") {
    BitString x = BitString::parse("0101");
    StructureCurve curve = structure_function(x, {});
    std::string csv = curve.to_csv();
    CHECK(csv.rfind("k,log_size\n", 0) == 0);
    CHECK(csv.find("0,4.000000") != std::string::npos);
}
