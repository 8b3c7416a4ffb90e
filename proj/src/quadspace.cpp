#include "dser/quadspace.hpp"

#include <stdexcept>

namespace dser {

QuadSetup::QuadSetup(const Ring& ring, int n_, int m_, const Mat& phi_)
    : R(ring), n(n_), m(m_), phi(phi_) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    if (R.finite() && R.modulus % 2 == 0)
        throw std::invalid_argument("2 not invertible");
    if (phi.rows != n || phi.cols != n)
        throw std::invalid_argument("phi must be n x n");
    if (!mat_eq(phi, mat_transpose(phi)))
        throw std::invalid_argument("phi must be symmetric");
    try {
        phi_inv = mat_inv(R, phi);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("phi must be invertible");
    }
}

QuadSetup QuadSetup::identity_form(const Ring& ring, int n_, int m_) {
    return QuadSetup(ring, n_, m_, mat_eye(ring, n_));
}

Mat psi_matrix(const QuadSetup& S) {
    const int n = S.n, m = S.m;
    Mat P = mat_zeros(S.R, S.dim(), S.dim());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P.at(i, j) = S.phi.at(i, j);
    for (int k = 0; k < m; ++k) {
        P.at(n + k, n + m + k) = ring_one(S.R);
        P.at(n + m + k, n + k) = ring_one(S.R);
    }
    return P;
}

bool is_orthogonal(const QuadSetup& S, const Mat& T) {
    if (T.rows != S.dim() || T.cols != S.dim())
        throw std::invalid_argument("size mismatch");
    Mat Psi = psi_matrix(S);
    Mat lhs = mat_mul(S.R, mat_transpose(T), mat_mul(S.R, Psi, T));
    return mat_eq(lhs, Psi);
}

namespace {

Mat take(const QuadSetup& S, const Mat& T, int r0, int nr, int c0, int nc) {
    Mat out = mat_zeros(S.R, nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) out.at(i, j) = T.at(r0 + i, c0 + j);
    return out;
}

void put(Mat& T, const Mat& B, int r0, int c0) {
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j) T.at(r0 + i, c0 + j) = B.at(i, j);
}

}  // namespace

Blocks split_blocks(const QuadSetup& S, const Mat& T) {
    if (T.rows != S.dim() || T.cols != S.dim())
        throw std::invalid_argument("size mismatch");
    const int n = S.n, m = S.m;
    Blocks B;
    B.a = take(S, T, 0, n, 0, n);
    B.b = take(S, T, 0, n, n, m);
    B.c = take(S, T, 0, n, n + m, m);
    B.d = take(S, T, n, m, 0, n);
    B.e = take(S, T, n, m, n, m);
    B.f = take(S, T, n, m, n + m, m);
    B.g = take(S, T, n + m, m, 0, n);
    B.h = take(S, T, n + m, m, n, m);
    B.j = take(S, T, n + m, m, n + m, m);
    return B;
}

Mat assemble_blocks(const QuadSetup& S, const Blocks& B) {
    const int n = S.n, m = S.m;
    Mat T = mat_zeros(S.R, S.dim(), S.dim());
    put(T, B.a, 0, 0);
    put(T, B.b, 0, n);
    put(T, B.c, 0, n + m);
    put(T, B.d, n, 0);
    put(T, B.e, n, n);
    put(T, B.f, n, n + m);
    put(T, B.g, n + m, 0);
    put(T, B.h, n + m, n);
    put(T, B.j, n + m, n + m);
    return T;
}

Mat block_inverse(const QuadSetup& S, const Mat& T) {
    if (!is_orthogonal(S, T)) throw std::invalid_argument("not orthogonal");
    const Ring& R = S.R;
    Blocks B = split_blocks(S, T);
    Blocks I;
    I.a = mat_mul(R, S.phi_inv, mat_mul(R, mat_transpose(B.a), S.phi));
    I.b = mat_mul(R, S.phi_inv, mat_transpose(B.g));
    I.c = mat_mul(R, S.phi_inv, mat_transpose(B.d));
    I.d = mat_mul(R, mat_transpose(B.c), S.phi);
    I.e = mat_transpose(B.j);
    I.f = mat_transpose(B.f);
    I.g = mat_mul(R, mat_transpose(B.b), S.phi);
    I.h = mat_transpose(B.h);
    I.j = mat_transpose(B.e);
    return assemble_blocks(S, I);
}

std::array<bool, 9> block_equation_checks(const QuadSetup& S, const Mat& T) {
    const Ring& R = S.R;
    const int m = S.m;
    Blocks B = split_blocks(S, T);
    auto tphi = [&](const Mat& X) { return mat_mul(R, mat_transpose(X), S.phi); };
    auto add3 = [&](const Mat& X, const Mat& Y, const Mat& Z) {
        return mat_add(R, X, mat_add(R, Y, Z));
    };
    Mat Zn = mat_zeros(R, S.n, S.n), Znm = mat_zeros(R, S.n, m);
    Mat Zmn = mat_zeros(R, m, S.n), Zmm = mat_zeros(R, m, m);
    Mat Im = mat_eye(R, m);
    auto mt = mat_transpose;
    std::array<bool, 9> out;
    out[0] = mat_eq(add3(mat_mul(R, tphi(B.a), B.a), mat_mul(R, mt(B.d), B.g),
                         mat_mul(R, mt(B.g), B.d)),
                    S.phi);
    out[1] = mat_eq(add3(mat_mul(R, tphi(B.a), B.b), mat_mul(R, mt(B.d), B.h),
                         mat_mul(R, mt(B.g), B.e)),
                    Znm);
    out[2] = mat_eq(add3(mat_mul(R, tphi(B.a), B.c), mat_mul(R, mt(B.d), B.j),
                         mat_mul(R, mt(B.g), B.f)),
                    Znm);
    out[3] = mat_eq(add3(mat_mul(R, tphi(B.b), B.a), mat_mul(R, mt(B.e), B.g),
                         mat_mul(R, mt(B.h), B.d)),
                    Zmn);
    out[4] = mat_eq(add3(mat_mul(R, tphi(B.b), B.b), mat_mul(R, mt(B.e), B.h),
                         mat_mul(R, mt(B.h), B.e)),
                    Zmm);
    out[5] = mat_eq(add3(mat_mul(R, tphi(B.b), B.c), mat_mul(R, mt(B.e), B.j),
                         mat_mul(R, mt(B.h), B.f)),
                    Im);
    out[6] = mat_eq(add3(mat_mul(R, tphi(B.c), B.a), mat_mul(R, mt(B.f), B.g),
                         mat_mul(R, mt(B.j), B.d)),
                    Zmn);
    out[7] = mat_eq(add3(mat_mul(R, tphi(B.c), B.b), mat_mul(R, mt(B.f), B.h),
                         mat_mul(R, mt(B.j), B.e)),
                    Im);
    out[8] = mat_eq(add3(mat_mul(R, tphi(B.c), B.c), mat_mul(R, mt(B.f), B.j),
                         mat_mul(R, mt(B.j), B.f)),
                    Zmm);
    (void)Zn;
    return out;
}

Mat stabilize_matrix(const QuadSetup& S, const Mat& T) {
    if (T.rows != S.dim() || T.cols != S.dim())
        throw std::invalid_argument("size mismatch");
    const int n = S.n, m = S.m;
    const int D = n + 2 * (m + 1);
    // Old index -> new index: Q and P slots keep their place, the P* block
    // shifts one slot right to make room for the new P slot at n+m.
    auto remap = [&](int r) { return r < n + m ? r : r + 1; };
    Mat out = mat_zeros(S.R, D, D);
    for (int i = 0; i < S.dim(); ++i)
        for (int j = 0; j < S.dim(); ++j)
            out.at(remap(i), remap(j)) = T.at(i, j);
    out.at(n + m, n + m) = ring_one(S.R);
    out.at(D - 1, D - 1) = ring_one(S.R);
    return out;
}

bool is_stabilized(const QuadSetup& S, const Mat& T) {
    if (S.m < 1) throw std::invalid_argument("m must be >= 1");
    if (T.rows != S.dim() || T.cols != S.dim())
        throw std::invalid_argument("size mismatch");
    const int p = S.n + S.m - 1;       // last P slot (0-based)
    const int q = S.n + 2 * S.m - 1;   // last P* slot (0-based)
    for (int idx : {p, q}) {
        for (int k = 0; k < S.dim(); ++k) {
            Elem want = (k == idx) ? ring_one(S.R) : ring_zero(S.R);
            if (!ring_eq(T.at(idx, k), want)) return false;
            if (!ring_eq(T.at(k, idx), want)) return false;
        }
    }
    return true;
}

Mat compress_matrix(const QuadSetup& S, const Mat& T) {
    if (!is_stabilized(S, T)) throw std::invalid_argument("not stabilized");
    const int p = S.n + S.m - 1;
    const int q = S.n + 2 * S.m - 1;
    std::vector<int> keep;
    for (int k = 0; k < S.dim(); ++k)
        if (k != p && k != q) keep.push_back(k);
    Mat out = mat_zeros(S.R, static_cast<int>(keep.size()),
                        static_cast<int>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i)
        for (size_t j = 0; j < keep.size(); ++j)
            out.at(static_cast<int>(i), static_cast<int>(j)) =
                T.at(keep[i], keep[j]);
    return out;
}

Elem quad_value(const QuadSetup& S, const Vec& w) {
    return ring_mul(S.R, ring_half(S.R), pair_value(S, w, w));
}

Elem pair_value(const QuadSetup& S, const Vec& u, const Vec& v) {
    if (u.size() != static_cast<size_t>(S.n) || v.size() != static_cast<size_t>(S.n))
        throw std::invalid_argument("vector length must be n");
    Vec pv = mat_vec(S.R, S.phi, v);
    Elem acc = ring_zero(S.R);
    for (int i = 0; i < S.n; ++i)
        acc = ring_add(S.R, acc, ring_mul(S.R, u[i], pv[i]));
    return acc;
}

Mat hyperbolic_scale(const QuadSetup& S, int idx, const Elem& u) {
    if (idx < 1 || idx > S.m) throw std::invalid_argument("index out of range");
    if (!ring_is_unit(S.R, u)) throw std::invalid_argument("unit required");
    Mat T = mat_eye(S.R, S.dim());
    T.at(S.n + idx - 1, S.n + idx - 1) = u;
    T.at(S.n + S.m + idx - 1, S.n + S.m + idx - 1) = ring_inv(S.R, u);
    return T;
}

Mat hyperbolic_swap(const QuadSetup& S) {
    Mat T = mat_zeros(S.R, S.dim(), S.dim());
    for (int i = 0; i < S.n; ++i) T.at(i, i) = ring_one(S.R);
    for (int k = 0; k < S.m; ++k) {
        T.at(S.n + k, S.n + S.m + k) = ring_one(S.R);
        T.at(S.n + S.m + k, S.n + k) = ring_one(S.R);
    }
    return T;
}

}  // namespace dser
