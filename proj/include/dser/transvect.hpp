#ifndef DSER_TRANSVECT_HPP
#define DSER_TRANSVECT_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dser/quadspace.hpp"

namespace dser {

// An elementary generator atom.  The parameter is an m x n matrix M; the
// two kinds evaluate to
//   EA(M)     = [[I, 0, -phi^-1 M^t], [M, I, -1/2 M phi^-1 M^t], [0, 0, I]]
//   EBstar(N) = [[I, -phi^-1 N^t, 0], [0, I, 0], [N, -1/2 N phi^-1 N^t, I]]
// in the (Q, P, P*) block order.  When M = x_i (w^t phi) for a standard
// basis column x_i the atom is "indexed" and carries the tag (i, j); the
// tag j is bookkeeping only and never affects evaluation.
enum class AtomKind { EA, EBstar };

struct GenAtom {
    AtomKind kind = AtomKind::EA;
    Mat param;                 // m x n
    int tag_i = 0;             // 1-based P index; 0 when untagged
    int tag_j = 1;             // 1-based Q index annotation
    std::optional<Vec> tag_w;  // the length-n defining vector when indexed
};

GenAtom general_atom(AtomKind kind, const Mat& param);
// M = x_i (w^t phi); 1 <= i <= m, |w| = n.  Throws "index out of range".
GenAtom rank_one_atom(const QuadSetup& S, AtomKind kind, int i, const Vec& w,
                      int j = 1);
// Same-kind atom with negated parameter; evaluations multiply to I.
GenAtom atom_inverse(const QuadSetup& S, const GenAtom& a);

Mat eval_atom(const QuadSetup& S, const GenAtom& a);

// Formal word node: an atom, an inverse, or a commutator
// [g, h] = g h g^-1 h^-1 (convention fixed in docs/conventions.md).
struct GenNode;
using GenNodePtr = std::shared_ptr<const GenNode>;

struct GenNode {
    enum class Kind { Atom, Inv, Comm };
    Kind kind = Kind::Atom;
    GenAtom atom;    // Kind::Atom
    GenNodePtr a, b; // Inv uses a; Comm uses a and b
};

GenNodePtr node_atom(const GenAtom& a);
GenNodePtr node_inv(const GenNodePtr& x);
GenNodePtr node_comm(const GenNodePtr& g, const GenNodePtr& h);

// A word is a left-to-right product of nodes.  Evaluation is cached per
// setup; the cache never affects observable behavior.
struct GenWord {
    std::vector<GenNodePtr> toks;

    struct Cache {
        Ring R = Ring::rationals();
        int n = 0, m = 0;
        Mat value;
    };
    mutable std::shared_ptr<const Cache> cache;
};

GenWord word_of(std::vector<GenNodePtr> toks);
GenWord word_concat(const GenWord& x, const GenWord& y);
// Reversed word of inverses, with Inv(Inv(x)) and atom inverses folded.
GenWord word_inverse(const QuadSetup& S, const GenWord& w);

Mat eval_node(const QuadSetup& S, const GenNodePtr& x);
Mat eval_word(const QuadSetup& S, const GenWord& w);

// Reinterpret a word over the (n, m) setup in the (n, m+1) setup by
// padding every atom parameter with a zero last row.  Evaluation commutes
// with stabilize_matrix.
GenWord stabilize_word(const QuadSetup& small, const GenWord& w);

// JSON serialization.  A word is an array of token objects:
//   {"t":"EA","i":1,"w":["1","0"]}       indexed atom
//   {"t":"EBstar","M":[["0","1"],...]}   general-parameter atom
//   {"t":"inv","a": token}
//   {"t":"comm","a": token, "b": token}
std::string word_to_json(const GenWord& w);
GenWord word_from_json(const QuadSetup& S, const std::string& text);

}  // namespace dser

#endif
