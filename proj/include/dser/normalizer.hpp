#ifndef DSER_NORMALIZER_HPP
#define DSER_NORMALIZER_HPP

#include "dser/fdg.hpp"
#include "dser/tokens.hpp"
#include "dser/transvect.hpp"

#include <optional>
#include <string>

namespace dser {

// ---------------------------------------------------------------------------
// Conjugation factorizations.  For a stabilized orthogonal T and a generator
// g from one of six recognized classes, T^-1 * g * T factors into four
// explicit commutator/atom terms whose parameters are block expressions in
// T.  The classes, named by the index pattern of the generator:
//   a_mj           E-atom at index m
//   bstar_mj       E*-atom at index m
//   a_mj_bstar_kl  [E at m, E* at k<m]
//   a_ij_bstar_mk  [E at i<m, E* at m]
//   a_mk_d_jl      [E at m, E at j<m]
//   bstar_mk_g_jl  [E* at m, E* at j<m]
// ---------------------------------------------------------------------------

enum class ConjClass {
    AMj,
    BstarMj,
    AMjBstarKl,
    AIjBstarMk,
    AMkDJl,
    BstarMkGJl,
};

const char* conj_class_name(ConjClass c);
std::optional<ConjClass> conj_class_parse(const std::string& name);
extern const ConjClass all_conj_classes[6];

// Sample a generator of the class with rank-one parameters (indices and
// length-n vectors drawn from rng).  Classes with a sub-m index need m >= 2.
GenNodePtr make_class_generator(const QuadSetup& S, ConjClass cls, Rng& rng);

// The four-factor word for T^-1 * eval(gen) * T.  T must be stabilized;
// gen must match one of the six classes with rank-one tagged atoms, else
// std::invalid_argument("gen not in a recognized class").  The returned
// word evaluates exactly to the conjugate.
GenWord conjugate_factorization(const QuadSetup& S, const Mat& T,
                                const GenNodePtr& gen);

// ---------------------------------------------------------------------------
// Reduction of an orthogonal element to a stabilized one: two words applied
// on the right (corner fix, then row clear) and up to two on the left
// (column clear; the dual pass is always empty because clearing the row and
// column forces their hyperbolic duals, but it is kept in the record and
// re-checked).  Invariant:
//   eval_left(l4) * eval_left(l3) * T * eval(r1) * eval(r2) == residual
// with the residual stabilized.
// ---------------------------------------------------------------------------
struct ReductionTrace {
    PWord r1, r2;  // right-applied, in order
    PWord l3, l4;  // left-applied, in application order; l4 stays empty
    Mat residual;
};

// eval(w_k) * ... * eval(w_1): left application in word order.
Mat eval_left(const QuadSetup& S, const PWord& w);

ReductionTrace reduce_to_smaller(const QuadSetup& S, const Mat& T);

// ---------------------------------------------------------------------------
// Normality witness.  For orthogonal eta and an elementary word g, produce
// an explicit word in the elementary generators that evaluates exactly to
// eta^-1 * eval(g) * eta.  Construction: reduce eta, conjugate the
// transported word token-by-token through the stabilized residual using the
// factorization displays (tokens below the top index are first rewritten
// through index m), and re-attach the reduction words.  Needs m >= 2.
// ---------------------------------------------------------------------------
struct WitnessResult {
    ReductionTrace trace;
    GenWord word;
};

// The conjugate of a single token by a stabilized matrix, as a word.
GenWord conjugate_token(const QuadSetup& S, const Mat& W, const PTok& tok);

WitnessResult normality_witness(const QuadSetup& S, const Mat& eta,
                                const PWord& g);

}  // namespace dser

#endif
