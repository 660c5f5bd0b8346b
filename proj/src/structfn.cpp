#include "kb/structfn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "kb/lzw.hpp"

namespace kb {
namespace {

BitString xor_bits(const BitString& a, const BitString& b) {
    BitString out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (b.bit(i)) out.set(i, !out.bit(i));
    return out;
}

bool is_zero(const BitString& a) {
    for (std::uint8_t byte : a.bytes())
        if (byte) return false;
    return true;
}

std::size_t leading_zero_bits(const BitString& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.bit(i)) return i;
    return a.size();
}

// log2(sum of C(n, 0..r)) without overflow
double log2_ball_size(std::size_t n, std::size_t r) {
    r = std::min(r, n);
    std::vector<double> logs;
    double log_c = 0.0; // log2 C(n, 0)
    logs.push_back(log_c);
    for (std::size_t i = 0; i < r; ++i) {
        log_c += std::log2(static_cast<double>(n - i)) - std::log2(static_cast<double>(i + 1));
        logs.push_back(log_c);
    }
    double mx = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) sum += std::exp2(l - mx);
    return mx + std::log2(sum);
}

} // namespace

SetDescription SetDescription::explicit_list(std::vector<BitString> members) {
    if (members.empty()) throw InvalidArgument("explicit list must be non-empty");
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    SetDescription s;
    s.kind_ = Kind::ExplicitList;
    s.width_ = members.front().size();
    for (const auto& m : members)
        if (m.size() != s.width_) throw WidthMismatch(m.size(), s.width_);
    s.cost_ = 16 + static_cast<std::int64_t>(members.size()) * static_cast<std::int64_t>(s.width_);
    s.log_size_ = std::log2(static_cast<double>(members.size()));
    s.describe_ = "list:" + std::to_string(members.size()) + ":" +
                  (members.size() == 1 ? members.front().to_string() : members.front().to_string() + "...");
    s.members_ = std::move(members);
    return s;
}

SetDescription SetDescription::hamming_ball(BitString center, std::size_t radius) {
    SetDescription s;
    s.kind_ = Kind::HammingBall;
    s.width_ = center.size();
    if (s.width_ == 0) throw InvalidArgument("ball center must be non-empty");
    s.cost_ = 16 + static_cast<std::int64_t>(s.width_) +
              std::bit_width(s.width_ == 1 ? std::size_t{1} : s.width_ - 1);
    s.log_size_ = log2_ball_size(s.width_, radius);
    s.describe_ = "ball:r" + std::to_string(radius) + ":" + center.to_string();
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
}

SetDescription SetDescription::affine_subspace(std::vector<BitString> basis, BitString offset) {
    SetDescription s;
    s.kind_ = Kind::AffineSubspace;
    s.width_ = offset.size();
    for (const auto& b : basis)
        if (b.size() != s.width_) throw WidthMismatch(b.size(), s.width_);

    // GF(2) row reduction, rows kept sorted by pivot position
    std::vector<BitString> echelon;
    for (BitString v : basis) {
        for (const auto& row : echelon) {
            std::size_t pivot = leading_zero_bits(row);
            if (pivot < v.size() && v.bit(pivot)) v = xor_bits(v, row);
        }
        if (!is_zero(v)) echelon.push_back(std::move(v));
    }
    std::sort(echelon.begin(), echelon.end(),
              [](const BitString& a, const BitString& b) { return leading_zero_bits(a) < leading_zero_bits(b); });

    std::size_t rank = echelon.size();
    s.cost_ = 16 + static_cast<std::int64_t>(rank + 1) * static_cast<std::int64_t>(s.width_);
    s.log_size_ = static_cast<double>(rank);
    s.describe_ = "affine:rank" + std::to_string(rank) + ":" + offset.to_string();
    s.echelon_ = std::move(echelon);
    s.offset_ = std::move(offset);
    return s;
}

SetDescription SetDescription::genfn_orbit(const GeneratingFunction& g, std::uint64_t free_mask,
                                           std::uint64_t theta_base, std::uint64_t budget) {
    if (g.m < 64) free_mask &= (1ULL << g.m) - 1;
    int free_bits = std::popcount(free_mask);
    std::uint64_t combos = 1ULL << free_bits;
    if (combos > budget) throw BudgetExceeded(combos, budget);

    std::set<BitString> distinct;
    // spread counter bits into the free positions of the mask
    for (std::uint64_t c = 0; c < combos; ++c) {
        std::uint64_t theta = theta_base & ~free_mask;
        std::uint64_t rest = c;
        for (int bit = 0; bit < 64 && rest; ++bit) {
            if ((free_mask >> bit) & 1ULL) {
                if (rest & 1ULL) theta |= 1ULL << bit;
                rest >>= 1;
            }
        }
        distinct.insert(g.eval(theta).bits());
    }

    SetDescription s;
    s.kind_ = Kind::GenfnOrbit;
    s.width_ = static_cast<std::size_t>(g.n);
    s.cost_ = 16 + g.description_length + g.m;
    s.log_size_ = std::log2(static_cast<double>(distinct.size()));
    s.describe_ = "orbit:" + g.id + ":mask" + std::to_string(free_mask);
    s.members_.assign(distinct.begin(), distinct.end());
    return s;
}

bool SetDescription::contains(const BitString& x) const {
    if (x.size() != width_) throw WidthMismatch(x.size(), width_);
    switch (kind_) {
        case Kind::ExplicitList:
        case Kind::GenfnOrbit:
            return std::binary_search(members_.begin(), members_.end(), x);
        case Kind::HammingBall: {
            std::size_t d = 0;
            for (std::size_t i = 0; i < x.size(); ++i) d += x.bit(i) != center_.bit(i);
            return d <= radius_;
        }
        case Kind::AffineSubspace: {
            BitString v = xor_bits(x, offset_);
            for (const auto& row : echelon_) {
                std::size_t pivot = leading_zero_bits(row);
                if (pivot < v.size() && v.bit(pivot)) v = xor_bits(v, row);
            }
            return is_zero(v);
        }
    }
    return false;
}

StructureCurve structure_function(const BitString& x, const std::vector<SetDescription>& family,
                                  std::int64_t k_max) {
    if (x.empty()) throw InvalidArgument("structure function needs a non-empty string");

    struct Entry {
        std::int64_t cost;
        double log_size;
        std::string desc;
    };
    StructureCurve curve;
    std::vector<Entry> containing;

    // by convention: "all strings of this length" at k = 0
    containing.push_back(Entry{0, static_cast<double>(x.size()), "all-strings"});
    // the singleton is always available
    SetDescription singleton = SetDescription::explicit_list({x});
    containing.push_back(Entry{singleton.cost_bits(), 0.0, singleton.describe()});

    for (const auto& s : family) {
        bool in = s.contains(x);
        curve.members.push_back(MemberReport{s.describe(), s.cost_bits(), s.log2_size(), in});
        if (in && (k_max <= 0 || s.cost_bits() <= k_max))
            containing.push_back(Entry{s.cost_bits(), s.log2_size(), s.describe()});
    }

    // order-independent evaluation: sort by (cost, log_size, description)
    std::sort(containing.begin(), containing.end(), [](const Entry& a, const Entry& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.log_size != b.log_size) return a.log_size < b.log_size;
        return a.desc < b.desc;
    });

    double best = containing.front().log_size;
    const Entry* star = &containing.front();
    double best_two_part = static_cast<double>(containing.front().cost) + best;
    std::int64_t k_star = containing.front().cost;

    // lower envelope over the grid of member costs
    curve.points.clear();
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < containing.size(); ++i) {
        running = std::min(running, containing[i].log_size);
        bool last_at_cost = i + 1 == containing.size() || containing[i + 1].cost != containing[i].cost;
        if (last_at_cost) curve.points.push_back(CurvePoint{containing[i].cost, running});
        double two_part = static_cast<double>(containing[i].cost) + running;
        if (two_part < best_two_part - 1e-12) {
            best_two_part = two_part;
            k_star = containing[i].cost;
            star = &containing[i];
            best = running;
        }
    }

    curve.k_star = k_star;
    curve.log_s_star = best;
    curve.two_part_min = best_two_part;
    // s* = the minimal set achieving phi(k*)
    for (const auto& e : containing)
        if (e.cost <= k_star && e.log_size <= best + 1e-12) {
            star = &e;
            break;
        }
    curve.s_star_description = star->desc;
    return curve;
}

std::string StructureCurve::to_csv() const {
    std::ostringstream os;
    os << "k,log_size\n";
    os.precision(6);
    os << std::fixed;
    for (const auto& p : points) os << p.k << "," << p.log_size << "\n";
    return os.str();
}

SufficiencyReport sufficient_statistic_check(const StructureCurve& curve, const BitString& x,
                                             std::int64_t c_slack) {
    SufficiencyReport rep;
    rep.two_part = curve.two_part_min;
    rep.k_hat = lzw::k_hat(x);
    rep.gap = rep.two_part - static_cast<double>(rep.k_hat);
    rep.consistent = rep.gap <= static_cast<double>(c_slack);
    return rep;
}

std::string SufficiencyReport::to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "{\"consistent\":" << (consistent ? "true" : "false") << ",\"gap\":" << gap
       << ",\"k_hat\":" << k_hat << ",\"two_part\":" << two_part << "}";
    return os.str();
}

} // namespace kb
