#ifndef DSER_TOKENS_HPP
#define DSER_TOKENS_HPP

#include "dser/transvect.hpp"

namespace dser {

// Compact tokens for the five generator shapes the reduction pipeline
// manipulates.  Every token is equal (as a matrix) to an explicit short
// word in the elementary atoms, so token words are honest witnesses:
//
//   EA(s, w)       indexed atom, P-index s, vector w in A^n
//   EB(s, w)       indexed starred atom
//   MIX(s, t, c)   [EA(s, c e1), EB(t, phi^-1 e1)]: block-diagonal, with
//                  -c at P-position (s, t) and +c at P*-position (t, s)
//   UK(s, t, c)    [EA(s, c e1), EA(t, phi^-1 e1)]: identity plus the
//                  alternating block K = c (x_t x_s^t - x_s x_t^t) in the
//                  (P, P*) corner
//   USK(s, t, c)   [EB(s, c e1), EB(t, phi^-1 e1)]: K in the (P*, P) corner
//
// MIX/UK/USK need s != t.  Inverses negate the parameter, so words of
// tokens invert by reversal plus negation, never needing inverse wrappers.
enum class PKind { EA, EB, MIX, UK, USK };

struct PTok {
    PKind kind = PKind::EA;
    int s = 0, t = 0;  // 1-based P indices; EA/EB use s only
    Vec w;             // EA/EB parameter
    Elem c;            // MIX/UK/USK scalar
};

using PWord = std::vector<PTok>;

PTok ptok_ea(int s, const Vec& w);
PTok ptok_eb(int s, const Vec& w);
PTok ptok_mix(int s, int t, const Elem& c);
PTok ptok_uk(int s, int t, const Elem& c);
PTok ptok_usk(int s, int t, const Elem& c);

// Structural validation (index ranges, s != t, vector length).
void ptok_check(const QuadSetup& S, const PTok& tok);

Mat ptok_eval(const QuadSetup& S, const PTok& tok);
Mat pword_eval(const QuadSetup& S, const PWord& w);

PTok ptok_inv(const QuadSetup& S, const PTok& tok);
PWord pword_inv(const QuadSetup& S, const PWord& w);

// Expand a token into its defining atom/commutator word.
GenNodePtr ptok_lower(const QuadSetup& S, const PTok& tok);
GenWord pword_lower(const QuadSetup& S, const PWord& w);

// Token word over the (n, m) setup reinterpreted at (n, m+1); indices are
// unchanged, vectors are unchanged, evaluation commutes with the
// stabilization embedding.
PWord pword_stabilize(const PWord& w);

// Random word of indexed atoms (the group the pipeline reduces).
PWord random_eo_pword(const QuadSetup& S, Rng& rng, int len);

// Random orthogonal sample: a random atom word, optionally mixed with
// hyperbolic scales and the block swap so the result need not lie in the
// elementary subgroup.
Mat random_orthogonal(const QuadSetup& S, Rng& rng, int len = 6, bool spice = true);

std::string ptok_describe(const PTok& tok);

}  // namespace dser

#endif
