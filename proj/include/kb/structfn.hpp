#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kb/bits.hpp"
#include "kb/genfn.hpp"

namespace kb {

/// One member of the restricted description family: a set of bit strings
/// with a pinned description cost, decidable membership and a computable
/// log-size. The kinds and their cost formulas (16-bit kind tag included):
///   explicit-list    16 + |S| * n
///   hamming-ball     16 + n + ceil(log2 n)
///   affine-subspace  16 + (rank + 1) * n
///   genfn-orbit      16 + genfn.description_length + m  (free-parameter mask)
class SetDescription {
public:
    enum class Kind { ExplicitList, HammingBall, AffineSubspace, GenfnOrbit };

    static SetDescription explicit_list(std::vector<BitString> members);
    static SetDescription hamming_ball(BitString center, std::size_t radius);
    /// {offset xor span(basis)}; size 2^rank over GF(2).
    static SetDescription affine_subspace(std::vector<BitString> basis, BitString offset);
    /// Images reachable by varying the parameter bits selected by free_mask
    /// around theta_base (enumerated at construction; budgeted).
    static SetDescription genfn_orbit(const GeneratingFunction& g, std::uint64_t free_mask,
                                      std::uint64_t theta_base = 0, std::uint64_t budget = 1ULL << 20);

    Kind kind() const { return kind_; }
    std::int64_t cost_bits() const { return cost_; }
    double log2_size() const { return log_size_; }
    std::size_t width() const { return width_; }
    bool contains(const BitString& x) const;
    /// Canonical text form; used as the deterministic tie-breaker.
    const std::string& describe() const { return describe_; }

private:
    Kind kind_ = Kind::ExplicitList;
    std::int64_t cost_ = 0;
    double log_size_ = 0.0;
    std::size_t width_ = 0;
    std::string describe_;
    std::vector<BitString> members_; // list / orbit (distinct, sorted)
    BitString center_;
    std::size_t radius_ = 0;
    std::vector<BitString> echelon_; // affine: row-reduced basis
    BitString offset_;
};

struct CurvePoint {
    std::int64_t k = 0;
    double log_size = 0.0;
};

struct MemberReport {
    std::string description;
    std::int64_t cost = 0;
    double log_size = 0.0;
    bool contains_x = false;
};

/// The model-class-restricted structure function of x: at each budget k on
/// the grid, the log-size of the smallest family set containing x with
/// description cost <= k. By convention the curve starts at (0, len(x))
/// (the set of all strings of that length), and the singleton {x} is always
/// added, so the curve reaches 0 at finite cost.
struct StructureCurve {
    std::vector<CurvePoint> points;   // nondecreasing k, non-increasing log_size
    std::int64_t k_star = 0;          // smallest minimizer of k + phi(k)
    double log_s_star = 0.0;
    double two_part_min = 0.0;        // k_star + phi(k_star)
    std::string s_star_description;
    std::vector<MemberReport> members; // diagnostics, family order preserved

    std::string to_csv() const; // "k,log_size" rows
};

StructureCurve structure_function(const BitString& x, const std::vector<SetDescription>& family,
                                  std::int64_t k_max = 0);

struct SufficiencyReport {
    double two_part = 0.0;
    std::int64_t k_hat = 0;
    double gap = 0.0; // two_part - k_hat
    bool consistent = false;

    std::string to_json() const;
};

/// Compare the curve's two-part optimum against the codec bound on x;
/// consistent when the gap is at most c_slack bits.
SufficiencyReport sufficient_statistic_check(const StructureCurve& curve, const BitString& x,
                                             std::int64_t c_slack = 64);

} // namespace kb
