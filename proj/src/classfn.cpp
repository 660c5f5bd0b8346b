#include "kb/classfn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <unordered_set>

#include "kb/lzw.hpp"

namespace kb {

ClassFunction ClassFunction::from_truth_table(int n, int q, std::vector<std::uint8_t> labels, std::string id) {
    if (n < 0 || n > kMaxTableBits) throw BudgetExceeded(1ULL << std::max(n, 0), 1ULL << kMaxTableBits);
    if (q < 2 || q > 256) throw InvalidArgument("class count must be in [2, 256]");
    if (labels.size() != (1ULL << n)) throw InvalidArgument("truth table must have 2^n entries");
    for (std::uint8_t l : labels)
        if (l >= q) throw InvalidArgument("label out of range");
    ClassFunction f;
    f.n_ = n;
    f.q_ = q;
    f.backing_ = Backing::TruthTable;
    f.table_ = std::move(labels);
    f.id_ = std::move(id);
    return f;
}

ClassFunction ClassFunction::from_predicate(int n, int q, std::function<int(std::uint64_t)> fn, std::string id) {
    if (n < 0 || n > 64) throw InvalidArgument("domain bits out of range");
    if (q < 2 || q > 256) throw InvalidArgument("class count must be in [2, 256]");
    ClassFunction f;
    f.n_ = n;
    f.q_ = q;
    f.backing_ = Backing::Predicate;
    f.fn_ = std::move(fn);
    f.id_ = std::move(id);
    return f;
}

ClassFunction ClassFunction::from_network_predicate(int n, std::function<int(std::uint64_t)> fn, std::string id) {
    ClassFunction f = from_predicate(n, 2, std::move(fn), std::move(id));
    f.backing_ = Backing::Network;
    return f;
}

ClassFunction ClassFunction::materialized() const {
    if (backing_ == Backing::TruthTable) return *this;
    if (n_ > kMaxTableBits) throw BudgetExceeded(1ULL << n_, 1ULL << kMaxTableBits);
    std::vector<std::uint8_t> labels(1ULL << n_);
    for (std::uint64_t x = 0; x < labels.size(); ++x)
        labels[x] = static_cast<std::uint8_t>(label(x));
    return from_truth_table(n_, q_, std::move(labels), id_);
}

// --- transforms -----------------------------------------------------------

Transform Transform::identity(int n) {
    Transform t;
    t.kind_ = Kind::Identity;
    t.n_ = n;
    return t;
}

Transform Transform::cyclic_shift(int n, int k) {
    Transform t;
    t.kind_ = Kind::CyclicShift;
    t.n_ = n;
    t.shift_ = ((k % n) + n) % n;
    return t;
}

Transform Transform::bit_permutation(int n, std::vector<int> perm) {
    if (static_cast<int>(perm.size()) != n) throw InvalidArgument("permutation size must equal n");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw InvalidArgument("not a permutation of bit positions");
        seen[static_cast<std::size_t>(p)] = true;
    }
    Transform t;
    t.kind_ = Kind::BitPermutation;
    t.n_ = n;
    t.perm_ = std::move(perm);
    return t;
}

Transform Transform::bit_reversal(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = n - 1 - i;
    return bit_permutation(n, std::move(perm));
}

Transform Transform::explicit_table(int n, std::vector<std::uint32_t> table) {
    if (n > 16) throw BudgetExceeded(1ULL << n, 1ULL << 16);
    if (table.size() != (1ULL << n)) throw InvalidArgument("table must have 2^n entries");
    std::vector<bool> seen(table.size(), false);
    for (std::uint32_t v : table) {
        if (v >= table.size() || seen[v]) throw InvalidArgument("explicit map is not a bijection");
        seen[v] = true;
    }
    Transform t;
    t.kind_ = Kind::Explicit;
    t.n_ = n;
    t.table_ = std::move(table);
    return t;
}

std::uint64_t Transform::apply(std::uint64_t x) const {
    switch (kind_) {
        case Kind::Identity: return x;
        case Kind::CyclicShift: {
            // string rotate-left by shift_: new[i] = old[(i+shift) mod n]
            std::uint64_t mask = n_ >= 64 ? ~0ULL : ((1ULL << n_) - 1);
            int s = shift_;
            if (s == 0) return x;
            return ((x << s) | (x >> (n_ - s))) & mask;
        }
        case Kind::BitPermutation: {
            std::uint64_t y = 0;
            for (int i = 0; i < n_; ++i) {
                // string position i <-> integer bit n-1-i
                std::uint64_t bit = (x >> (n_ - 1 - perm_[static_cast<std::size_t>(i)])) & 1ULL;
                y |= bit << (n_ - 1 - i);
            }
            return y;
        }
        case Kind::Explicit: return table_[static_cast<std::size_t>(x)];
    }
    return x;
}

std::string Transform::describe() const {
    switch (kind_) {
        case Kind::Identity: return "identity";
        case Kind::CyclicShift: return "cyclic-shift:" + std::to_string(shift_);
        case Kind::BitPermutation: return "bit-permutation";
        case Kind::Explicit: return "explicit";
    }
    return "?";
}

Transform Transform::compose(const Transform& other) const {
    if (n_ != other.n_) throw WidthMismatch(static_cast<std::size_t>(n_), static_cast<std::size_t>(other.n_));
    if (n_ > 16) throw BudgetExceeded(1ULL << n_, 1ULL << 16);
    std::vector<std::uint32_t> table(1ULL << n_);
    for (std::uint64_t x = 0; x < table.size(); ++x)
        table[static_cast<std::size_t>(x)] = static_cast<std::uint32_t>(apply(other.apply(x)));
    return explicit_table(n_, std::move(table));
}

Transform Transform::inverse() const {
    if (n_ > 16) throw BudgetExceeded(1ULL << n_, 1ULL << 16);
    std::vector<std::uint32_t> table(1ULL << n_);
    for (std::uint64_t x = 0; x < table.size(); ++x)
        table[static_cast<std::size_t>(apply(x))] = static_cast<std::uint32_t>(x);
    return explicit_table(n_, std::move(table));
}

// --- operations -----------------------------------------------------------

StackedDataset model_from_classfn(const ClassFunction& f, Ordering order, std::size_t limit,
                                  int class_index, std::uint64_t order_seed,
                                  const std::vector<Image>* candidates) {
    StackedDataset d(static_cast<std::size_t>(f.n()), Ordering::CanonicalLexicographic);
    if (candidates) {
        std::vector<Image> hits;
        for (const Image& img : *candidates) {
            if (img.width() != static_cast<std::size_t>(f.n()))
                throw WidthMismatch(img.width(), static_cast<std::size_t>(f.n()));
            if (f.label(point_from_image(img)) == class_index) hits.push_back(img);
        }
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        for (auto& img : hits) d.add(std::move(img));
    } else {
        if (f.n() > kMaxTableBits)
            throw BudgetExceeded(f.n() >= 64 ? ~0ULL : 1ULL << f.n(), 1ULL << kMaxTableBits);
        for (std::uint64_t x = 0; x < f.domain_size(); ++x)
            if (f.label(x) == class_index) d.add(image_from_point(x, f.n()));
    }
    d.set_provenance(Provenance{"classfn:" + (f.id().empty() ? std::string("anonymous") : f.id()), {}});

    if (order == Ordering::SeededPermutation) {
        StackedDataset shuffled = shuffle_dataset(d, order_seed);
        d = std::move(shuffled);
    }
    if (limit > 0 && d.count() > limit) {
        StackedDataset cut(d.width_bits(), d.ordering());
        cut.set_ordering(d.ordering(), d.order_seed());
        if (d.provenance()) cut.set_provenance(*d.provenance());
        for (std::size_t i = 0; i < limit; ++i) cut.add(d.image(i));
        return cut;
    }
    return d;
}

GeneratingFunction genfn_from_classfn(const ClassFunction& f, Ordering order, int class_index,
                                      std::uint64_t order_seed) {
    StackedDataset d = model_from_classfn(f, order, 0, class_index, order_seed);
    if (d.empty()) throw InvalidArgument("class is empty: no generating function");
    auto images = std::make_shared<std::vector<Image>>(d.images());

    GeneratingFunction g;
    g.id = "from-classfn:" + (f.id().empty() ? std::string("anonymous") : f.id());
    g.m = static_cast<int>(std::bit_width(images->size() - 1));
    g.n = f.n();
    // kind tag + count/width fields + the explicit image table
    g.description_length = 16 + 32 + static_cast<std::int64_t>(images->size()) * f.n();
    g.eval = [images](std::uint64_t i) {
        std::size_t idx = std::min<std::size_t>(i, images->size() - 1); // clamp past the end
        return (*images)[idx];
    };
    return g;
}

ClassFunction classifier_from_genfn(const GeneratingFunction& g, std::size_t epsilon,
                                    const BackgroundSpec& bg, std::uint64_t work_budget) {
    int variants = bg.policy == BackgroundPolicy::SeededRandom ? bg.per_param : 1;
    std::uint64_t evals = g.param_count() * static_cast<std::uint64_t>(variants);
    if (evals > work_budget) throw BudgetExceeded(evals, work_budget);

    std::string id = "classifier:" + g.id + ":eps" + std::to_string(epsilon);
    if (epsilon == 0) {
        // exact mode: full-image equality against every candidate
        auto members = std::make_shared<std::unordered_set<std::string>>();
        for (std::uint64_t theta = 0; theta < g.param_count(); ++theta)
            for (int j = 0; j < variants; ++j)
                members->insert(apply_background(g, theta, bg, j).bits().to_string());
        int n = g.n;
        return ClassFunction::from_predicate(
            n, 2,
            [members, n](std::uint64_t x) {
                return members->count(BitString::from_uint(x, static_cast<std::size_t>(n)).to_string()) ? 1 : 0;
            },
            id);
    }

    // epsilon ball on non-background positions (full image when no mask)
    struct MaskedBase {
        Image base;
        BitString mask; // 1 = background, ignored in the distance
        bool has_mask;
    };
    auto bases = std::make_shared<std::vector<MaskedBase>>();
    for (std::uint64_t theta = 0; theta < g.param_count(); ++theta) {
        MaskedBase mb;
        mb.base = g.eval(theta);
        mb.has_mask = g.has_mask();
        if (mb.has_mask) mb.mask = g.background_mask(theta);
        bases->push_back(std::move(mb));
    }
    int n = g.n;
    return ClassFunction::from_predicate(
        n, 2,
        [bases, n, epsilon](std::uint64_t x) {
            BitString xb = BitString::from_uint(x, static_cast<std::size_t>(n));
            for (const auto& mb : *bases) {
                std::size_t dist = 0;
                for (std::size_t i = 0; i < xb.size() && dist <= epsilon; ++i) {
                    if (mb.has_mask && mb.mask.bit(i)) continue;
                    dist += xb.bit(i) != mb.base.bit(i);
                }
                if (dist <= epsilon) return 1;
            }
            return 0;
        },
        id);
}

bool is_invariance(const ClassFunction& f, const Transform& t) {
    if (f.n() != t.n()) throw WidthMismatch(static_cast<std::size_t>(f.n()), static_cast<std::size_t>(t.n()));
    if (f.n() > 16) throw BudgetExceeded(1ULL << f.n(), 1ULL << 16);
    for (std::uint64_t x = 0; x < f.domain_size(); ++x)
        if (f.label(t.apply(x)) != f.label(x)) return false;
    return true;
}

InvarianceSummary invariance_summary(const ClassFunction& f) {
    if (f.n() > kMaxTableBits) throw BudgetExceeded(1ULL << f.n(), 1ULL << kMaxTableBits);
    InvarianceSummary s;
    s.class_sizes.assign(static_cast<std::size_t>(f.q()), 0);
    for (std::uint64_t x = 0; x < f.domain_size(); ++x)
        s.class_sizes[static_cast<std::size_t>(f.label(x))]++;
    double total = 0.0;
    for (std::uint64_t c : s.class_sizes)
        total += std::lgamma(static_cast<double>(c) + 1.0) / std::log(2.0);
    s.log_group_size = std::round(total * 1000.0) / 1000.0;
    return s;
}

void canonical_labels(const Partition& p, int n, std::vector<std::uint8_t>& labels_out) {
    const std::uint64_t size = 1ULL << n;
    if (p.empty() || p.size() > 256) throw InvalidArgument("partition must have 1..256 blocks");
    labels_out.assign(static_cast<std::size_t>(size), 0xFF);

    // rank blocks by smallest element
    struct Ranked {
        std::uint64_t min_elem;
        std::size_t index;
    };
    Ranked ranked[256];
    for (std::size_t b = 0; b < p.size(); ++b) {
        if (p[b].empty()) throw InvalidArgument("partition block is empty");
        std::uint64_t mn = p[b][0];
        for (std::uint64_t x : p[b]) mn = std::min(mn, x);
        ranked[b] = Ranked{mn, b};
    }
    std::sort(ranked, ranked + p.size(), [](const Ranked& a, const Ranked& b) { return a.min_elem < b.min_elem; });

    std::uint64_t covered = 0;
    for (std::size_t r = 0; r < p.size(); ++r) {
        for (std::uint64_t x : p[ranked[r].index]) {
            if (x >= size) throw InvalidArgument("partition element outside the domain");
            if (labels_out[static_cast<std::size_t>(x)] != 0xFF)
                throw InvalidArgument("partition blocks overlap");
            labels_out[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(r);
            ++covered;
        }
    }
    if (covered != size) throw InvalidArgument("partition does not cover the domain");
}

ClassFunction classfn_from_partition(const Partition& p, int n) {
    if (n > kMaxTableBits) throw BudgetExceeded(1ULL << n, 1ULL << kMaxTableBits);
    std::vector<std::uint8_t> labels;
    canonical_labels(p, n, labels);
    int q = static_cast<int>(p.size());
    return ClassFunction::from_truth_table(n, std::max(q, 2), std::move(labels), "from-partition");
}

void partition_from_function(const ClassFunction& f, Partition& out) {
    std::size_t q = static_cast<std::size_t>(f.q());
    if (out.size() < q) out.resize(q);
    for (std::size_t b = 0; b < out.size(); ++b) out[b].clear();
    for (std::uint64_t x = 0; x < f.domain_size(); ++x)
        out[static_cast<std::size_t>(f.label(x))].push_back(x);
    // a partition has no empty blocks; unused labels disappear
    std::size_t keep = 0;
    for (std::size_t b = 0; b < out.size(); ++b)
        if (!out[b].empty()) {
            if (keep != b) out[keep].swap(out[b]);
            ++keep;
        }
    out.resize(keep);
}

Partition partition_from_function(const ClassFunction& f) {
    Partition p;
    partition_from_function(f, p);
    return p;
}

ClassComplexity k_hat_classfn(const ClassFunction& f, int class_index, const std::vector<Image>* candidates) {
    StackedDataset d = model_from_classfn(f, Ordering::CanonicalLexicographic, 0, class_index, 0, candidates);
    ClassComplexity c;
    c.class_size = d.count();
    BitString s = d.empty() ? BitString() : concat_dataset(d);
    c.k_hat_f = lzw::k_hat(s);
    std::int64_t log_count = d.empty() ? 0 : std::bit_width(static_cast<std::uint64_t>(d.count() - 1));
    c.k_hat_dataset = c.k_hat_f + static_cast<std::int64_t>(d.count()) * log_count;
    c.rho = d.empty() ? 0.0 : std::log2(static_cast<double>(d.count())) / static_cast<double>(f.n());
    return c;
}

} // namespace kb
