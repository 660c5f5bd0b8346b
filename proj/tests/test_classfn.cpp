#include <doctest.h>

#include <bit>
#include <cmath>
#include <memory>
#include <set>

#include "kb/classfn.hpp"
#include "kb/lzw.hpp"
#include "kb/rng.hpp"
#include "oracles.hpp"

using namespace kb;

namespace {

ClassFunction parity_fn(int n) {
    return ClassFunction::from_predicate(
        n, 2, [](std::uint64_t x) { return static_cast<int>(std::popcount(x) & 1u); },
        "parity" + std::to_string(n));
}

} // namespace

TEST_CASE("model_from_classfn basics") {
    ClassFunction single = ClassFunction::from_predicate(4, 2, [](std::uint64_t x) { return x == 0 ? 1 : 0; }, "is-zero");
    StackedDataset d = model_from_classfn(single);
    REQUIRE(d.count() == 1);
    CHECK(d.image(0).bits().to_string() == "0000");

    ClassFunction all = ClassFunction::from_predicate(3, 2, [](std::uint64_t) { return 1; }, "const1");
    StackedDataset full = model_from_classfn(all);
    REQUIRE(full.count() == 8);
    CHECK(full.image(0).bits().to_string() == "000");
    CHECK(full.image(7).bits().to_string() == "111");

    StackedDataset limited = model_from_classfn(all, Ordering::CanonicalLexicographic, 3);
    CHECK(limited.count() == 3);
    CHECK(limited.image(2).bits().to_string() == "010");

    ClassFunction wide = ClassFunction::from_predicate(32, 2, [](std::uint64_t) { return 1; }, "wide");
    CHECK_THROWS_AS(model_from_classfn(wide), BudgetExceeded);
}

TEST_CASE("classifier_from_genfn recognizes exactly the generated set") {
    GeneratingFunction g = rule110_genfn(8, 7, BitString::parse("00010000"));
    ClassFunction f = classifier_from_genfn(g);

    std::set<std::string> reachable;
    for (std::uint64_t t = 0; t <= 7; ++t)
        reachable.insert(oracles::rule110_evolve(BitString::parse("00010000"), t).to_string());

    std::size_t hits = 0;
    for (std::uint64_t x = 0; x < 256; ++x) {
        bool in = reachable.count(BitString::from_uint(x, 8).to_string()) > 0;
        CHECK(f.label(x) == (in ? 1 : 0));
        hits += f.label(x);
    }
    CHECK(hits == reachable.size());

    StackedDataset model = model_from_classfn(f);
    CHECK(model.count() == reachable.size());
    for (std::size_t i = 0; i < model.count(); ++i)
        CHECK(reachable.count(model.image(i).bits().to_string()) == 1);
}

TEST_CASE("classifier_from_genfn degenerate cases") {
    GeneratingFunction constant;
    constant.id = "const0000";
    constant.m = 2;
    constant.n = 4;
    constant.description_length = 20;
    constant.eval = [](std::uint64_t) { return Image(BitString::parse("0000")); };
    ClassFunction f = classifier_from_genfn(constant);
    CHECK(f.label(0) == 1);
    for (std::uint64_t x = 1; x < 16; ++x) CHECK(f.label(x) == 0);

    GeneratingFunction identity;
    identity.id = "id4";
    identity.m = 4;
    identity.n = 4;
    identity.description_length = 20;
    identity.eval = [](std::uint64_t theta) { return image_from_point(theta, 4); };
    ClassFunction all = classifier_from_genfn(identity);
    for (std::uint64_t x = 0; x < 16; ++x) CHECK(all.label(x) == 1);

    GeneratingFunction big = sprite_genfn(8, 8, Sprite::full(2, 2), 3, 3);
    CHECK_THROWS_AS(classifier_from_genfn(big, 0, {}, 10), BudgetExceeded);
}

TEST_CASE("epsilon ball classifiers are monotone in epsilon") {
    GeneratingFunction g = sprite_genfn(4, 4, Sprite::full(2, 2), 2, 2);
    ClassFunction f0 = classifier_from_genfn(g, 0);
    ClassFunction f1 = classifier_from_genfn(g, 1);
    ClassFunction f2 = classifier_from_genfn(g, 2);
    for (std::uint64_t x = 0; x < (1u << 16); ++x) {
        if (f0.label(x) == 1) CHECK(f1.label(x) == 1);
        if (f1.label(x) == 1) CHECK(f2.label(x) == 1);
    }
}

TEST_CASE("classifier soundness and completeness in exact mode") {
    for (const char* id : {"sprite3x3", "sprite4x4", "rule110-8", "pi-3x8"}) {
        GeneratingFunction g = genfn_by_id(id);
        ClassFunction f = classifier_from_genfn(g);
        std::set<std::string> generated;
        for (std::uint64_t theta = 0; theta < g.param_count(); ++theta) {
            Image img = g.eval(theta);
            CHECK(f.label(point_from_image(img)) == 1);
            generated.insert(img.bits().to_string());
        }
        std::uint64_t members = 0;
        for (std::uint64_t x = 0; x < (1ULL << g.n); ++x) {
            if (f.label(x) == 1) {
                ++members;
                CHECK(generated.count(BitString::from_uint(x, static_cast<std::size_t>(g.n)).to_string()) == 1);
            }
        }
        CHECK(members == generated.size());
    }
}

TEST_CASE("genfn_from_classfn clamps and closes the loop") {
    // |H| = 5 -> m = 3, indices 5..7 clamp to the last element
    ClassFunction f = ClassFunction::from_predicate(4, 2, [](std::uint64_t x) { return x < 5 ? 1 : 0; }, "lt5");
    GeneratingFunction g = genfn_from_classfn(f);
    CHECK(g.m == 3);
    CHECK(g.eval(4) == g.eval(5));
    CHECK(g.eval(4) == g.eval(7));
    CHECK(g.eval(0).bits().to_string() == "0000");

    // |H| = 1 -> constant generating function
    ClassFunction one = ClassFunction::from_predicate(4, 2, [](std::uint64_t x) { return x == 9 ? 1 : 0; }, "is9");
    GeneratingFunction gc = genfn_from_classfn(one);
    CHECK(gc.m == 0);
    CHECK(gc.eval(0).bits().to_string() == "1001");

    ClassFunction empty = ClassFunction::from_predicate(4, 2, [](std::uint64_t) { return 0; }, "never");
    CHECK_THROWS_AS(genfn_from_classfn(empty), InvalidArgument);

    // classifier(genfn_from_classfn(f)) == f on class membership, n <= 12
    for (const char* id : {"rule110-8", "sprite3x3"}) {
        ClassFunction orig = classifier_from_genfn(genfn_by_id(id));
        GeneratingFunction back = genfn_from_classfn(orig);
        ClassFunction again = classifier_from_genfn(back);
        for (std::uint64_t x = 0; x < orig.domain_size(); ++x)
            CHECK(again.label(x) == orig.label(x));
    }
}

TEST_CASE("is_invariance") {
    ClassFunction parity = parity_fn(6);
    CHECK(is_invariance(parity, Transform::identity(6)));
    CHECK(is_invariance(parity, Transform::cyclic_shift(6, 1)));
    CHECK(is_invariance(parity, Transform::cyclic_shift(6, 5)));
    CHECK(is_invariance(parity, Transform::bit_reversal(6)));

    ClassFunction lt4 = ClassFunction::from_predicate(3, 2, [](std::uint64_t x) { return x < 4 ? 1 : 0; }, "lt4");
    CHECK(is_invariance(lt4, Transform::identity(3)));
    CHECK(!is_invariance(lt4, Transform::bit_reversal(3))); // 001 -> 100 crosses classes

    CHECK_THROWS_AS(Transform::explicit_table(2, {0, 0, 1, 2}), InvalidArgument);
}

TEST_CASE("transform group axioms on sampled pairs") {
    Rng rng(17);
    int n = 8;
    ClassFunction parity = parity_fn(n);
    std::vector<Transform> invariances;
    invariances.push_back(Transform::identity(n));
    for (int k = 1; k < n; ++k) invariances.push_back(Transform::cyclic_shift(n, k));
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);
        invariances.push_back(Transform::bit_permutation(n, perm));
    }
    for (const auto& t : invariances) CHECK(is_invariance(parity, t));
    for (int trial = 0; trial < 40; ++trial) {
        const Transform& a = invariances[rng.below(invariances.size())];
        const Transform& b = invariances[rng.below(invariances.size())];
        CHECK(is_invariance(parity, a.compose(b)));
        CHECK(is_invariance(parity, a.inverse()));
    }
    // inverse really inverts
    for (const auto& t : invariances) {
        Transform round = t.compose(t.inverse());
        for (std::uint64_t x = 0; x < (1u << n); ++x) CHECK(round.apply(x) == x);
    }
}

TEST_CASE("invariance_summary forced arithmetic") {
    // |H| = 3 in B^3: log2(3! * 5!) = log2(720) = 9.492
    ClassFunction f = ClassFunction::from_predicate(3, 2, [](std::uint64_t x) { return x < 3 ? 1 : 0; }, "lt3");
    InvarianceSummary s = invariance_summary(f);
    REQUIRE(s.class_sizes.size() == 2);
    CHECK(s.class_sizes[1] == 3);
    CHECK(s.class_sizes[0] == 5);
    CHECK(s.log_group_size == doctest::Approx(9.492).epsilon(1e-9));

    // constant: log2(2^n !)
    ClassFunction c = ClassFunction::from_predicate(4, 2, [](std::uint64_t) { return 0; }, "const0");
    InvarianceSummary sc = invariance_summary(c);
    double expect = std::round(std::lgamma(17.0) / std::log(2.0) * 1000.0) / 1000.0;
    CHECK(sc.log_group_size == doctest::Approx(expect));

    // q = 3 with sizes 2,2,4: log2(2!*2!*4!) = log2(96)
    ClassFunction q3 = ClassFunction::from_truth_table(3, 3, {0, 0, 1, 1, 2, 2, 2, 2}, "q3");
    InvarianceSummary s3 = invariance_summary(q3);
    CHECK(s3.log_group_size == doctest::Approx(std::round(std::log2(96.0) * 1000.0) / 1000.0));
}

TEST_CASE("partition round-trips") {
    // {{all}} -> constant function
    Partition whole{{0, 1, 2, 3, 4, 5, 6, 7}};
    ClassFunction constant = classfn_from_partition(whole, 3);
    for (std::uint64_t x = 0; x < 8; ++x) CHECK(constant.label(x) == 0);

    // msb blocks on n = 4
    Partition halves{{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}};
    ClassFunction msb = classfn_from_partition(halves, 4);
    for (std::uint64_t x = 0; x < 16; ++x) CHECK(msb.label(x) == (x >= 8 ? 1 : 0));

    // exhaustive round-trip over every partition of B^3 (all block counts)
    std::vector<std::uint8_t> rgs(8, 0);
    Partition blocks, back;
    std::vector<std::uint8_t> labels;
    long checked = 0;
    auto rec = [&](auto&& self, std::size_t i, std::uint8_t maxl) -> void {
        if (i == 8) {
            blocks.clear();
            blocks.resize(static_cast<std::size_t>(maxl) + 1);
            for (std::size_t x = 0; x < 8; ++x) blocks[rgs[x]].push_back(x);
            canonical_labels(blocks, 3, labels);
            ClassFunction f = ClassFunction::from_truth_table(3, std::max<int>(maxl + 1, 2), labels);
            partition_from_function(f, back);
            CHECK(back == blocks);
            ++checked;
            return;
        }
        for (std::uint8_t l = 0; l <= std::min<int>(maxl + 1, 7); ++l) {
            rgs[i] = l;
            self(self, i + 1, std::max(maxl, l));
        }
    };
    rgs[0] = 0;
    rec(rec, 1, 0);
    CHECK(checked == 4140); // Bell(8)

    // errors: overlap and gap
    CHECK_THROWS_AS(classfn_from_partition(Partition{{0, 1}, {1, 2, 3}}, 2), InvalidArgument);
    CHECK_THROWS_AS(classfn_from_partition(Partition{{0, 1}}, 2), InvalidArgument);
}

TEST_CASE("random partitions of B^10 round-trip") {
    Rng rng(2718);
    Partition back;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t nblocks = 1 + rng.below(16);
        Partition p(nblocks);
        for (std::uint64_t x = 0; x < 1024; ++x) p[rng.below(nblocks)].push_back(x);
        std::size_t keep = 0;
        for (std::size_t b = 0; b < p.size(); ++b)
            if (!p[b].empty()) p[keep++].swap(p[b]);
        p.resize(keep);

        ClassFunction f = classfn_from_partition(p, 10);
        partition_from_function(f, back);
        // canonical order: blocks ranked by smallest element
        std::sort(p.begin(), p.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        CHECK(back == p);
    }
}

TEST_CASE("k_hat_classfn") {
    ClassFunction one = ClassFunction::from_predicate(8, 2, [](std::uint64_t x) { return x == 0xB2 ? 1 : 0; }, "single");
    ClassComplexity c = k_hat_classfn(one);
    CHECK(c.class_size == 1);
    CHECK(c.k_hat_f == lzw::k_hat(BitString::from_uint(0xB2, 8)));
    CHECK(c.k_hat_dataset == c.k_hat_f);

    // structured orbit vs random set of the same shape (n = 64, candidates)
    GeneratingFunction g = genfn_by_id("sprite8x8");
    ClassFunction sprite = classifier_from_genfn(g);
    StackedDataset stack = build_stack(g, all_params(g));
    ClassComplexity cs = k_hat_classfn(sprite, 1, &stack.images());
    CHECK(cs.class_size == 64);
    CHECK(cs.rho == doctest::Approx(6.0 / 64.0));

    Rng rng(31);
    std::vector<Image> random_imgs;
    auto member_set = std::make_shared<std::set<std::string>>();
    for (int i = 0; i < 64; ++i) {
        Image img(rng.next_bits(64));
        member_set->insert(img.bits().to_string());
        random_imgs.push_back(img);
    }
    ClassFunction random_f = ClassFunction::from_predicate(
        64, 2,
        [member_set](std::uint64_t x) { return member_set->count(BitString::from_uint(x, 64).to_string()) ? 1 : 0; },
        "random64");
    ClassComplexity cr = k_hat_classfn(random_f, 1, &random_imgs);
    CHECK(cr.class_size == 64);
    CHECK(cs.k_hat_f < cr.k_hat_f);

    // backing-independence: truth table vs predicate give identical numbers
    ClassFunction pred = parity_fn(8);
    ClassFunction table = pred.materialized();
    CHECK(table.backing() == ClassFunction::Backing::TruthTable);
    CHECK(k_hat_classfn(pred).k_hat_f == k_hat_classfn(table).k_hat_f);
    CHECK(k_hat_classfn(pred).k_hat_dataset == k_hat_classfn(table).k_hat_dataset);
}
