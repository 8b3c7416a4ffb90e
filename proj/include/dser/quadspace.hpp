#ifndef DSER_QUADSPACE_HPP
#define DSER_QUADSPACE_HPP

#include <array>

#include "dser/matrix.hpp"

namespace dser {

// The ambient quadratic space: an n-dimensional anisotropic part with
// symmetric invertible Gram matrix phi, orthogonally summed with m
// hyperbolic planes.  Coordinates are column tuples ordered
// (Q-block, P-block, P*-block) of sizes (n, m, m); the form matrix is
//   Psi = [[phi, 0, 0], [0, 0, I_m], [0, I_m, 0]].
// The quadratic value is q(w) = (1/2) w^t phi w, so 2 must be a unit;
// even moduli are rejected here rather than at the ring level.
struct QuadSetup {
    Ring R;
    int n = 0;
    int m = 0;
    Mat phi;
    Mat phi_inv;

    QuadSetup(const Ring& ring, int n_, int m_, const Mat& phi_);

    // phi = I_n convenience constructor.
    static QuadSetup identity_form(const Ring& ring, int n_, int m_);

    int dim() const { return n + 2 * m; }
};

// The nine sub-blocks of a dim x dim matrix in the (n, m, m) partition:
//   T = [[a, b, c], [d, e, f], [g, h, j]].
struct Blocks {
    Mat a, b, c, d, e, f, g, h, j;
};

Mat psi_matrix(const QuadSetup& S);

// True iff  T^t Psi T == Psi  exactly.  Size mismatch throws.
bool is_orthogonal(const QuadSetup& S, const Mat& T);

Blocks split_blocks(const QuadSetup& S, const Mat& T);
Mat assemble_blocks(const QuadSetup& S, const Blocks& B);

// For orthogonal T the inverse in closed block form:
//   [[phi^-1 a^t phi, phi^-1 g^t, phi^-1 d^t],
//    [c^t phi,        j^t,        f^t       ],
//    [b^t phi,        h^t,        e^t       ]].
// Throws std::invalid_argument("not orthogonal") otherwise.
Mat block_inverse(const QuadSetup& S, const Mat& T);

// The nine block identities equivalent to T^t Psi T = Psi, each tested
// separately (index order: rows of the block product).
std::array<bool, 9> block_equation_checks(const QuadSetup& S, const Mat& T);

// Embed an (n, m) orthogonal matrix into the (n, m+1) setup, fixing the
// new hyperbolic pair.  This is a group homomorphism.
Mat stabilize_matrix(const QuadSetup& S, const Mat& T);

// True iff T (over S with m >= 1) fixes the last hyperbolic pair, i.e. the
// rows and columns with indices n+m and n+2m (1-based) are unit vectors.
bool is_stabilized(const QuadSetup& S, const Mat& T);

// Inverse of stabilize_matrix on stabilized input: delete the last
// hyperbolic pair's rows and columns, giving an (n, m-1) matrix.
// Throws std::invalid_argument("not stabilized") otherwise.
Mat compress_matrix(const QuadSetup& S, const Mat& T);

// q(w) = (1/2) w^t phi w and the bilinear pairing <u, v> = u^t phi v,
// for length-n column vectors.
Elem quad_value(const QuadSetup& S, const Vec& w);
Elem pair_value(const QuadSetup& S, const Vec& u, const Vec& v);

// Diagonal orthogonal element scaling one hyperbolic pair: the unit u at
// P slot idx (1-based) and u^{-1} at the matching P* slot.
Mat hyperbolic_scale(const QuadSetup& S, int idx, const Elem& u);

// Permutation exchanging the P block with the P* block wholesale; it is
// orthogonal but generally not elementary.
Mat hyperbolic_swap(const QuadSetup& S);

}  // namespace dser

#endif
