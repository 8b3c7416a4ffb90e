#ifndef DSER_RING_HPP
#define DSER_RING_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dser/rng.hpp"

namespace dser {

// Exact commutative-ring arithmetic for the two supported ring families:
// the rationals, and Z/nZ with n >= 2.  Modular residues are stored
// reduced into [0, n); rationals use GMP and are always canonicalized.
// The quadratic-space layer additionally requires 2 to be a unit and so
// rejects even moduli; the plain ring utilities here work for any n.
// All operations are pure and all values immutable, so concurrent use
// needs no coordination.
struct Ring {
    enum class Kind { Rationals, Modular };

    Kind kind = Kind::Rationals;
    long modulus = 0;  // meaningful only for Kind::Modular

    static Ring rationals() { return Ring{Kind::Rationals, 0}; }

    static Ring zmod(long n) {
        if (n < 2) throw std::invalid_argument("modulus must be >= 2");
        return Ring{Kind::Modular, n};
    }

    // CLI spelling: "rationals" or "zmod:<n>".
    static Ring parse(const std::string& spec);

    bool is_rationals() const { return kind == Kind::Rationals; }
    bool finite() const { return kind == Kind::Modular; }

    bool operator==(const Ring& o) const {
        return kind == o.kind && modulus == o.modulus;
    }
};

// A ring element: either a reduced residue (long) or an exact rational.
// The active alternative always matches the Ring it is used with; mixing
// elements across rings is a programming error and trips an assert-style
// throw in debug paths.
using Elem = std::variant<long, mpq_class>;

// ---- element constructors ----
Elem ring_zero(const Ring& R);
Elem ring_one(const Ring& R);
Elem ring_from_long(const Ring& R, long v);
// Parse "p/q" (rationals) or a decimal integer (any ring).
Elem ring_parse(const Ring& R, const std::string& text);

// ---- arithmetic ----
Elem ring_add(const Ring& R, const Elem& a, const Elem& b);
Elem ring_sub(const Ring& R, const Elem& a, const Elem& b);
Elem ring_mul(const Ring& R, const Elem& a, const Elem& b);
Elem ring_neg(const Ring& R, const Elem& a);
// Throws std::domain_error("not a unit") when a has no inverse.
Elem ring_inv(const Ring& R, const Elem& a);
Elem ring_half(const Ring& R);  // inverse of 2

bool ring_is_zero(const Elem& a);
bool ring_eq(const Elem& a, const Elem& b);
bool ring_is_unit(const Ring& R, const Elem& a);

std::string ring_to_string(const Elem& a);

// Uniform random element.  For the rationals: numerator in [-3, 3] (the
// small-box convention used throughout the randomized identity checks).
Elem ring_rand(const Ring& R, Rng& rng);
// Random unit (never zero; for rationals a small nonzero rational).
Elem ring_rand_unit(const Ring& R, Rng& rng);

// Residue enumeration for finite rings: residue_count() values reachable
// via residue_at(i).  Throws for the rationals.
long residue_count(const Ring& R);
Elem residue_at(const Ring& R, long i);

using Vec = std::vector<Elem>;

// ---- unimodularity and stable-range witnesses ----

// True iff some u exists with v.u == 1.  Finite rings: gcd(entries,
// modulus) == 1.  Rationals: any entry nonzero.  Empty input throws
// std::invalid_argument("empty vector").
bool is_unimodular(const Ring& R, const Vec& v);

// For unimodular v of length l+1, find b (length l) such that
// (v_1 + v_{l+1} b_1, ..., v_l + v_{l+1} b_l) is unimodular.
// Finite rings search exhaustively in lexicographic order; the rationals
// take b = 0 when the prefix is nonzero, else b_1 = 1.
// Throws std::runtime_error("not unimodular") / ("no witness").
Vec stable_range_witness(const Ring& R, const Vec& v, int l);

// One elementary column operation on a row vector: right-multiplication by
// I + scalar * E_{row,col} (indices 1-based), i.e. entry `col` gains
// scalar * entry `row`.
struct ERecord {
    int row;
    int col;
    Elem scalar;
};

// Apply records left to right to a row vector.
Vec apply_records(const Ring& R, const Vec& v, const std::vector<ERecord>& recs);

// Drive unimodular v to (0, ..., 0, 1) by elementary det-1 column
// operations.  Deterministic pivot strategy with lowest-index tie breaks;
// bounded breadth-first fallback on finite rings.  Throws on
// non-unimodular input.
std::vector<ERecord> elementary_row_reduce(const Ring& R, const Vec& v);

}  // namespace dser

#endif
