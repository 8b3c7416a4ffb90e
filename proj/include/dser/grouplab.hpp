#ifndef DSER_GROUPLAB_HPP
#define DSER_GROUPLAB_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dser/tokens.hpp"

namespace dser {

// ---------------------------------------------------------------------------
// Packed exact matrices over Z/q for dense enumeration.  dim <= 8 and q < 256
// cover every shipped census; entries are stored reduced.  All heavy kernels
// (closure, scans) exist twice: a serial reference implementation and an
// OpenMP-parallel one, with bit-identical results (outputs are canonically
// sorted sets).  bench/closure_bench.cpp compares the two.
// ---------------------------------------------------------------------------

struct PackedMat {
    uint8_t dim = 0;
    std::array<uint8_t, 64> a{};

    bool operator==(const PackedMat& o) const {
        return dim == o.dim && a == o.a;
    }
    bool operator<(const PackedMat& o) const { return a < o.a; }
};

struct PackedMatHash {
    size_t operator()(const PackedMat& p) const {
        // FNV-1a over the used bytes.
        uint64_t h = 1469598103934665603ull;
        const int nbytes = p.dim * p.dim;
        for (int i = 0; i < nbytes; ++i) {
            h ^= p.a[static_cast<size_t>(i)];
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

PackedMat pack_mat(const QuadSetup& S, const Mat& M);
Mat unpack_mat(const QuadSetup& S, const PackedMat& P);
PackedMat packed_mul(long q, const PackedMat& A, const PackedMat& B);
PackedMat packed_eye(int dim);

struct BudgetExceeded : std::runtime_error {
    size_t partial_count;
    explicit BudgetExceeded(size_t count)
        : std::runtime_error("enumeration budget exceeded"),
          partial_count(count) {}
};

// Default 2e6 elements; override with the DSER_BUDGET environment variable.
size_t closure_budget();

// Multiplicative closure of the seed set by breadth-first expansion (the
// group is finite, so closure under products alone reaches the group
// generated).  Output is sorted, so the two kernels compare equal.
std::vector<PackedMat> closure_serial(const QuadSetup& S,
                                      const std::vector<Mat>& seeds,
                                      size_t budget = closure_budget());
std::vector<PackedMat> closure_parallel(const QuadSetup& S,
                                        const std::vector<Mat>& seeds,
                                        size_t budget = closure_budget());

struct GroupCensus {
    std::vector<PackedMat> elems;  // sorted
    std::string generator_desc;
    // True when the census size was cross-checked against the closed-form
    // group order (available for odd prime moduli in odd total dimension);
    // otherwise the census is the closure of the documented seeds.
    bool audited = false;

    size_t size() const { return elems.size(); }
    bool contains(const PackedMat& p) const;
};

// ---- seed sets ----
std::vector<Mat> atom_seed_mats(const QuadSetup& S);
// Generators carrying the top hyperbolic index: the two atoms at index m
// plus the mixed/one-sided commutator shapes pairing i < m with m.
std::vector<Mat> m_subscript_seed_mats(const QuadSetup& S);
// Seeds intended to generate the full orthogonal group: atoms, hyperbolic
// pair swaps, hyperbolic unit scalings, and isometries of the Q part.
std::vector<Mat> orthogonal_seed_mats(const QuadSetup& S);

// Every matrix with T^t Psi T = Psi, by scanning all q^(dim^2) candidates.
// Guarded: throws BudgetExceeded when the scan space exceeds the budget.
std::vector<PackedMat> direct_scan_orthogonal(const QuadSetup& S,
                                              size_t budget = closure_budget());

// Closed-form order of the full orthogonal group, when known exactly:
// odd prime modulus and odd total dimension 2k+1 gives
//   2 * q^(k^2) * prod_{i=1..k} (q^(2i) - 1).
std::optional<unsigned long long> orthogonal_order_formula(const QuadSetup& S);

GroupCensus enumerate_elementary(const QuadSetup& S,
                                 size_t budget = closure_budget());
GroupCensus enumerate_orthogonal(const QuadSetup& S,
                                 size_t budget = closure_budget());

// True iff every conjugate g h g^-1 (g in O, h in the elementary seed set)
// stays inside EO.
bool normality_verdict_serial(const QuadSetup& S, const GroupCensus& O,
                              const GroupCensus& EO);
bool normality_verdict_parallel(const QuadSetup& S, const GroupCensus& O,
                                const GroupCensus& EO);

// Left cosets g·EO of EO in O, keyed by the lexicographically least member.
struct CosetSpace {
    std::vector<PackedMat> reps;  // sorted canonical representatives
    std::unordered_map<PackedMat, PackedMat, PackedMatHash> coset_of;
    bool is_group = false;  // set from the normality verdict

    size_t size() const { return reps.size(); }
    const PackedMat& coset_key(const PackedMat& elem) const;
};

CosetSpace coset_space(const QuadSetup& S, const GroupCensus& O,
                       const GroupCensus& EO, bool normal);

struct K1Report {
    size_t order_O_small = 0, order_EO_small = 0;
    size_t order_O_big = 0, order_EO_big = 0;
    size_t cosets_small = 0, cosets_big = 0;
    bool normal_small = false;      // EO normal in O at level m
    bool normal_big = false;        // EO normal in O at level m+1
    bool surjective = false;        // stabilized small O hits every big coset
    bool products_well_defined = false;  // representative-independent products
};

// Stability of the coset space from level m to level m+1 (same ring/n/phi).
// Throws std::invalid_argument("ring mismatch") when the setups disagree.
K1Report k1_stability_check(const QuadSetup& Ssm, const QuadSetup& Sbig,
                            size_t budget = closure_budget());

// ---- word-retrieving census (breadth-first parents) ----
// Closure of the indexed atoms with parent pointers, so any member can be
// rewritten as an explicit atom word.
struct WordCensus {
    struct Parent {
        PackedMat prev;
        PTok gen;
        bool root = false;
    };
    std::unordered_map<PackedMat, Parent, PackedMatHash> parent;

    bool contains(const PackedMat& p) const { return parent.count(p) > 0; }
    size_t size() const { return parent.size(); }
};

WordCensus elementary_word_census(const QuadSetup& S,
                                  size_t budget = closure_budget());
// Word for a census member (empty for the identity); nullopt if absent.
std::optional<PWord> census_word(const WordCensus& census, const PackedMat& M);

}  // namespace dser

#endif
