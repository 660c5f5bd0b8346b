#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kb/dataset.hpp"
#include "kb/genfn.hpp"

namespace kb {

/// Domain points of B^n are integers whose bits, MSB first, are the image
/// string: point 1 on n=3 is the string "001".
inline Image image_from_point(std::uint64_t x, int n) {
    return Image(BitString::from_uint(x, static_cast<std::size_t>(n)));
}
inline std::uint64_t point_from_image(const Image& img) { return img.bits().to_uint(); }

/// Total labeling of B^n with q classes. Backed by a truth table, an
/// arbitrary predicate, or a thresholded network; all three answer
/// label(x) for every point of the domain.
class ClassFunction {
public:
    enum class Backing { TruthTable, Predicate, Network };

    ClassFunction() = default;

    static ClassFunction from_truth_table(int n, int q, std::vector<std::uint8_t> labels, std::string id = "");
    static ClassFunction from_predicate(int n, int q, std::function<int(std::uint64_t)> fn, std::string id = "");
    static ClassFunction from_network_predicate(int n, std::function<int(std::uint64_t)> fn, std::string id = "");

    int label(std::uint64_t x) const {
        return table_.empty() ? fn_(x) : table_[static_cast<std::size_t>(x)];
    }
    int operator()(std::uint64_t x) const { return label(x); }

    int n() const { return n_; }
    int q() const { return q_; }
    /// Only meaningful for n < 64; exhaustive paths are budget-guarded anyway.
    std::uint64_t domain_size() const { return n_ >= 64 ? ~0ULL : 1ULL << n_; }
    Backing backing() const { return backing_; }
    const std::string& id() const { return id_; }

    /// Truth-table version of this function (n <= 24 budgeted).
    ClassFunction materialized() const;

private:
    int n_ = 0;
    int q_ = 2;
    Backing backing_ = Backing::TruthTable;
    std::string id_;
    std::vector<std::uint8_t> table_;
    std::function<int(std::uint64_t)> fn_;
};

/// Enumeration / truth-table work budget: domains above this size refuse.
inline constexpr int kMaxTableBits = 24;

// --- transforms ---------------------------------------------------------------

/// A bijection of B^n: an explicit permutation table (n <= 16) or a
/// structured map whose bijectivity holds by construction.
class Transform {
public:
    static Transform identity(int n);
    /// String rotated left by k: new[i] = old[(i+k) mod n].
    static Transform cyclic_shift(int n, int k);
    /// new[i] = old[perm[i]]; perm must be a permutation of 0..n-1.
    static Transform bit_permutation(int n, std::vector<int> perm);
    static Transform bit_reversal(int n);
    /// Explicit value table; validated to be a bijection.
    static Transform explicit_table(int n, std::vector<std::uint32_t> table);

    std::uint64_t apply(std::uint64_t x) const;
    int n() const { return n_; }
    std::string describe() const;

    /// this after other, materialized as an explicit table (n <= 16).
    Transform compose(const Transform& other) const;
    Transform inverse() const;

private:
    enum class Kind { Identity, CyclicShift, BitPermutation, Explicit };
    Kind kind_ = Kind::Identity;
    int n_ = 0;
    int shift_ = 0;
    std::vector<int> perm_;
    std::vector<std::uint32_t> table_;
};

/// Class sizes and the log2 of the invariance-group order
/// sum_c log2(|class c|!), reported rounded to 3 decimals.
struct InvarianceSummary {
    std::vector<std::uint64_t> class_sizes;
    double log_group_size = 0.0;
};

// --- operations ----------------------------------------------------------------

/// Stack of the distinct class_index points of f (all of them, or the
/// first `limit` after ordering). Enumeration order is lexicographic on
/// image bits, which equals integer order of the domain. Domains wider
/// than the table budget need a candidate list (e.g. from the generator
/// that produced f); candidates are deduplicated.
StackedDataset model_from_classfn(const ClassFunction& f, Ordering order = Ordering::CanonicalLexicographic,
                                  std::size_t limit = 0, int class_index = 1, std::uint64_t order_seed = 0,
                                  const std::vector<Image>* candidates = nullptr);

/// Table generating function from the ordered class list; indices past the
/// end clamp to the last element. Throws when the class is empty.
GeneratingFunction genfn_from_classfn(const ClassFunction& f, Ordering order = Ordering::CanonicalLexicographic,
                                      int class_index = 1, std::uint64_t order_seed = 0);

/// f(x) = 1 iff some (theta, background variant) reproduces x. epsilon = 0
/// compares full images exactly; epsilon > 0 compares Hamming distance on
/// non-background positions only (when the genfn has a mask). Refuses when
/// the scan would exceed `work_budget` evaluations.
ClassFunction classifier_from_genfn(const GeneratingFunction& g, std::size_t epsilon = 0,
                                    const BackgroundSpec& bg = {}, std::uint64_t work_budget = 1ULL << 22);

/// True iff f(T(x)) == f(x) for every x (label-preserving automorphism).
/// Exhaustive over B^n; n <= 16.
bool is_invariance(const ClassFunction& f, const Transform& t);

InvarianceSummary invariance_summary(const ClassFunction& f);

// A partition is a list of blocks; blocks are lists of domain points.
using Partition = std::vector<std::vector<std::uint64_t>>;

/// Canonical labeling: the block containing the smallest point gets label
/// 0, the next-smallest remaining block label 1, and so on. Throws on
/// overlap or gap. The label buffer is caller-provided so exhaustive sweeps
/// can run allocation-free; classfn_from_partition wraps this.
void canonical_labels(const Partition& p, int n, std::vector<std::uint8_t>& labels_out);
ClassFunction classfn_from_partition(const Partition& p, int n);

/// Class partition of f, blocks listed in label order with ascending
/// points. The overload writing into `out` reuses its inner vectors.
void partition_from_function(const ClassFunction& f, Partition& out);
Partition partition_from_function(const ClassFunction& f);

/// Complexity of the function via its canonically ordered class stack.
struct ClassComplexity {
    std::int64_t k_hat_f = 0;       // k_hat of the lexicographic class stack
    std::int64_t k_hat_dataset = 0; // + |H| * ceil(log2 |H|)
    double rho = 0.0;               // log2|H| / n
    std::uint64_t class_size = 0;
};
ClassComplexity k_hat_classfn(const ClassFunction& f, int class_index = 1,
                              const std::vector<Image>* candidates = nullptr);

} // namespace kb
