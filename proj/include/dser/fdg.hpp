#ifndef DSER_FDG_HPP
#define DSER_FDG_HPP

#include "dser/grouplab.hpp"
#include "dser/tokens.hpp"

namespace dser {

// ---------------------------------------------------------------------------
// Subgroup-tagged words.  Membership in the four subgroups is always by
// construction: a word carries a tag, and tag_sound checks that every token
// belongs to the tag's generating alphabet.
//   G: EB at any index, MIX at any index pair, USK at any index pair.
//   D: EA at index m, MIX(m, i) and UK(m, i) with i < m.
//   C: EB at index m, MIX(i, m) and USK(i, m) with i < m.
//   F: a prefix of tokens living entirely below index m (a stabilized word
//      from the (n, m-1) setup) followed by a C-word.
// ---------------------------------------------------------------------------

enum class WordTag { C, D, G, F };

const char* tag_name(WordTag t);

struct TaggedWord {
    PWord toks;
    WordTag tag = WordTag::G;
    size_t f_prefix = 0;  // F only: tokens [0, f_prefix) form the small part

    // The same word over the formal generator nodes.
    GenWord lowered(const QuadSetup& S) const;
};

bool tag_sound(const QuadSetup& S, const TaggedWord& tw);

// Witnessed stable rank bound for the supported coefficient rings.
int stable_rank_bound(const Ring& R);

// ---------------------------------------------------------------------------
// Corner reduction: a G-word g with (T * eval(g)) having 1 in the
// (n+m, n+m) position (1-based).  Three phases, mirroring the row action:
// an EBstar move clearing the Q-part of the bottom row, an alternating
// USK move making the P-part unimodular, and MIX moves realizing the
// elementary_row_reduce records that drive the P-part to the last basis
// vector.  Bounded breadth-first fallback on finite rings.
// Throws "hyperbolic rank too small" when m <= the stable rank bound.
// ---------------------------------------------------------------------------
PWord reduce_corner_row(const QuadSetup& S, const Vec& row,
                        size_t maxbfs = 250000);
TaggedWord reduce_corner(const QuadSetup& S, const Mat& T,
                         size_t maxbfs = 250000);

// D-phase: given corner 1, a D-word d with row n+m of T * eval(d) equal to
// the unit row.  The P*-slot at index m is forced to zero by self-pairing.
PWord clear_row(const QuadSetup& S, const Mat& T);

// Right C-phase: given row n+m cleared, a C-word c (built from the
// (n+m)-th column of T^-1) with T * eval(c) stabilized.  Returns the word
// and the stabilized product.
std::pair<PWord, Mat> clear_col_right(const QuadSetup& S, const Mat& T);

// Left C-phase: tokens applied on the left, in application order, so that
// eval(l_k)...eval(l_1) * T has column n+m equal to the unit column.
std::pair<PWord, Mat> clear_col_left(const QuadSetup& S, const Mat& T);

// ---------------------------------------------------------------------------
// Shape predicates and word extraction.  A D-shaped matrix is the identity
// outside row n+m and column n+2m; a C-shaped matrix is the identity
// outside column n+m and row n+2m.  Extraction rebuilds a word in the
// matching alphabet and verifies it by exact evaluation.
// ---------------------------------------------------------------------------
bool is_D_shape(const QuadSetup& S, const Mat& X);
bool is_C_shape(const QuadSetup& S, const Mat& X);
PWord d_word_of(const QuadSetup& S, const Mat& X);
PWord c_word_of(const QuadSetup& S, const Mat& X);

// W^-1 * eval(cword) * W as a C-word, for stabilized W (conjugation by a
// stabilized element preserves the C shape token by token).
PWord conj_c_word(const QuadSetup& S, const Mat& W, const PWord& cword);

// ---------------------------------------------------------------------------
// Base decomposition: T = residual * eval(c)^-1 * eval(d)^-1 * eval(g)^-1
// with the residual stabilized.
// ---------------------------------------------------------------------------
struct FdgBase {
    PWord g, d, c;
    Mat residual;
};

FdgBase fdg_base(const QuadSetup& S, const Mat& T);

// ---------------------------------------------------------------------------
// Reduced triple: eval(eta) * eval(xi) * eval(mu) equals the decomposed
// element, eta is F-tagged with the (n+m-1, n+m) entry equal to 0, xi is
// D-tagged, mu is G-tagged.  Requires m >= stable rank bound + 2 and a
// finite ring (the small-setup census provides word retrieval).
// ---------------------------------------------------------------------------
struct FdgTriple {
    TaggedWord eta, xi, mu;
    bool reduced = false;
};

struct FdgContext {
    QuadSetup big;
    QuadSetup small;
    WordCensus census;  // word retrieval at the small setup
};

FdgContext make_fdg_context(const QuadSetup& S,
                            size_t budget = closure_budget());

FdgTriple fdg_decompose(FdgContext& ctx, const GenWord& theta);
FdgTriple fdg_decompose(const QuadSetup& S, const GenWord& theta,
                        size_t budget = closure_budget());

// ---------------------------------------------------------------------------
// Block form of a G-element: [[I, gamma, 0], [0, eps, 0],
// [theta, psi, eps^t^-1]].  Extraction asserts the sparsity pattern (error
// names the offending block), the invertibility of eps, and the bottom-row
// propagation (u, v, w) -> (u + w theta, u gamma + v eps + w psi,
// w eps^t^-1).  eps_embedded reports whether eps fixes the last slot,
// i.e. eps = [[eps', 0], [0, 1]].
// ---------------------------------------------------------------------------
struct GBlockForm {
    Mat gamma, eps, theta, psi;
    bool eps_embedded = false;
};

GBlockForm g_block_analysis(const QuadSetup& S, const Mat& mu);

}  // namespace dser

#endif
