#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dser/quadspace.hpp"
#include "dser/transvect.hpp"

using namespace dser;

namespace {

Mat random_atom_matrix(const QuadSetup& S, Rng& rng) {
    Mat M = mat_zeros(S.R, S.m, S.n);
    for (int r = 0; r < S.m; ++r)
        for (int c = 0; c < S.n; ++c) M.at(r, c) = ring_rand(S.R, rng);
    AtomKind k = rng.coin() ? AtomKind::EA : AtomKind::EBstar;
    return eval_atom(S, general_atom(k, M));
}

Mat random_orthogonal(const QuadSetup& S, Rng& rng, int len) {
    Mat T = mat_eye(S.R, S.dim());
    for (int k = 0; k < len; ++k)
        T = mat_mul(S.R, T, random_atom_matrix(S, rng));
    return T;
}

// A symmetric invertible non-identity form for n = 2 over odd moduli and
// the rationals: [[1, 1], [1, 2]] (determinant 1).
Mat nonid_phi(const Ring& R) {
    return mat_from_longs(R, 2, 2, {1, 1, 1, 2});
}

}  // namespace

TEST_CASE("setup validation") {
    Ring Q = Ring::rationals();
    CHECK_NOTHROW(QuadSetup::identity_form(Q, 2, 3));
    CHECK_THROWS_WITH_AS(QuadSetup::identity_form(Ring::zmod(4), 1, 1),
                         "2 not invertible", std::invalid_argument);
    CHECK_THROWS_WITH_AS(QuadSetup::identity_form(Ring::zmod(6), 1, 2),
                         "2 not invertible", std::invalid_argument);
    CHECK_THROWS_AS(QuadSetup(Q, 2, 1, mat_from_longs(Q, 2, 2, {1, 2, 3, 4})),
                    std::invalid_argument);  // not symmetric
    Ring z9 = Ring::zmod(9);
    CHECK_THROWS_AS(QuadSetup(z9, 1, 1, mat_from_longs(z9, 1, 1, {3})),
                    std::invalid_argument);  // 3 not invertible mod 9
    CHECK_THROWS_AS(QuadSetup::identity_form(Q, 0, 1), std::invalid_argument);
    CHECK_NOTHROW(QuadSetup(Q, 2, 2, nonid_phi(Q)));
}

TEST_CASE("psi matrix and orthogonality certification") {
    Ring Q = Ring::rationals();
    QuadSetup S = QuadSetup::identity_form(Q, 1, 1);
    Mat Psi = psi_matrix(S);
    CHECK(mat_eq(Psi, mat_from_longs(Q, 3, 3, {1, 0, 0, 0, 0, 1, 0, 1, 0})));
    CHECK(is_orthogonal(S, mat_eye(Q, 3)));

    Mat E = mat_zeros(Q, 3, 3);
    E.at(0, 0) = ring_one(Q);
    E.at(0, 2) = ring_parse(Q, "-1");
    E.at(1, 0) = ring_one(Q);
    E.at(1, 1) = ring_one(Q);
    E.at(1, 2) = ring_parse(Q, "-1/2");
    E.at(2, 2) = ring_one(Q);
    CHECK(is_orthogonal(S, E));

    Mat twoI = mat_scale(Q, ring_from_long(Q, 2), mat_eye(Q, 3));
    CHECK_FALSE(is_orthogonal(S, twoI));
    CHECK_THROWS_AS(is_orthogonal(S, mat_eye(Q, 4)), std::invalid_argument);
}

TEST_CASE("block split and reassembly round trip") {
    Ring z7 = Ring::zmod(7);
    QuadSetup S = QuadSetup::identity_form(z7, 2, 2);
    Rng rng(5);
    Mat T = mat_zeros(z7, 6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) T.at(i, j) = ring_rand(z7, rng);
    CHECK(mat_eq(assemble_blocks(S, split_blocks(S, T)), T));
}

TEST_CASE("block inverse closed form") {
    Ring z7 = Ring::zmod(7);
    Rng rng(11);
    for (auto [n, m] : {std::pair{1, 1}, {2, 2}, {1, 3}}) {
        QuadSetup S = QuadSetup::identity_form(z7, n, m);
        CHECK(mat_eq(block_inverse(S, mat_eye(z7, S.dim())), mat_eye(z7, S.dim())));
        for (int t = 0; t < 10; ++t) {
            Mat T = random_orthogonal(S, rng, 5);
            Mat Tinv = block_inverse(S, T);
            CHECK(mat_is_identity(z7, mat_mul(z7, T, Tinv)));
            CHECK(mat_is_identity(z7, mat_mul(z7, Tinv, T)));
            // Agrees with the generic elimination inverse.
            CHECK(mat_eq(Tinv, mat_inv(z7, T)));
        }
    }
    QuadSetup S = QuadSetup::identity_form(z7, 1, 1);
    Mat bad = mat_scale(z7, ring_from_long(z7, 2), mat_eye(z7, 3));
    CHECK_THROWS_WITH_AS(block_inverse(S, bad), "not orthogonal",
                         std::invalid_argument);
}

TEST_CASE("nine block identities hold for orthogonal matrices") {
    Rng rng(23);
    for (const Ring& R : {Ring::rationals(), Ring::zmod(5)}) {
        for (auto [n, m] : {std::pair{1, 2}, {2, 2}}) {
            QuadSetup S = (n == 2) ? QuadSetup(R, 2, m, nonid_phi(R))
                                   : QuadSetup::identity_form(R, n, m);
            for (int t = 0; t < 8; ++t) {
                Mat T = random_orthogonal(S, rng, 4);
                auto checks = block_equation_checks(S, T);
                for (bool ok : checks) CHECK(ok);
            }
            // A non-orthogonal matrix must fail at least one equation.
            Mat bad = mat_scale(S.R, ring_from_long(S.R, 2), mat_eye(S.R, S.dim()));
            auto checks = block_equation_checks(S, bad);
            bool all = true;
            for (bool ok : checks) all = all && ok;
            CHECK_FALSE(all);
        }
    }
}

TEST_CASE("stabilization embedding") {
    Ring z5 = Ring::zmod(5);
    QuadSetup S = QuadSetup::identity_form(z5, 1, 2);
    QuadSetup Sbig = QuadSetup::identity_form(z5, 1, 3);
    Rng rng(77);

    CHECK(mat_eq(stabilize_matrix(S, mat_eye(z5, S.dim())), mat_eye(z5, Sbig.dim())));

    for (int t = 0; t < 12; ++t) {
        Mat T1 = random_orthogonal(S, rng, 3);
        Mat T2 = random_orthogonal(S, rng, 3);
        Mat lhs = stabilize_matrix(S, mat_mul(z5, T1, T2));
        Mat rhs = mat_mul(z5, stabilize_matrix(S, T1), stabilize_matrix(S, T2));
        CHECK(mat_eq(lhs, rhs));  // group homomorphism

        Mat ST = stabilize_matrix(S, T1);
        CHECK(is_orthogonal(Sbig, ST));
        CHECK(is_stabilized(Sbig, ST));
        // New hyperbolic pair is fixed: those rows/columns are unit vectors.
        int p = Sbig.n + Sbig.m - 1, q = Sbig.dim() - 1;
        CHECK(ring_eq(ST.at(p, p), ring_one(z5)));
        CHECK(ring_eq(ST.at(q, q), ring_one(z5)));
        // Round trip through compression.
        CHECK(mat_eq(compress_matrix(Sbig, ST), T1));
        // A generic orthogonal matrix of the big setup is not stabilized.
    }
    Mat Tbig = random_orthogonal(Sbig, rng, 6);
    if (!is_stabilized(Sbig, Tbig))
        CHECK_THROWS_WITH_AS(compress_matrix(Sbig, Tbig), "not stabilized",
                             std::invalid_argument);
}

TEST_CASE("quadratic values and pairing") {
    Ring Q = Ring::rationals();
    QuadSetup S(Q, 2, 1, nonid_phi(Q));
    Rng rng(3);
    for (int t = 0; t < 40; ++t) {
        Vec u = {ring_rand(Q, rng), ring_rand(Q, rng)};
        Vec v = {ring_rand(Q, rng), ring_rand(Q, rng)};
        // 2 q(w) = <w, w>
        Elem lhs = ring_mul(Q, ring_from_long(Q, 2), quad_value(S, u));
        CHECK(ring_eq(lhs, pair_value(S, u, u)));
        // symmetry of the pairing under a symmetric form
        CHECK(ring_eq(pair_value(S, u, v), pair_value(S, v, u)));
        // q(u+v) = q(u) + q(v) + <u,v>
        Vec sum = {ring_add(Q, u[0], v[0]), ring_add(Q, u[1], v[1])};
        Elem expect = ring_add(Q, ring_add(Q, quad_value(S, u), quad_value(S, v)),
                               pair_value(S, u, v));
        CHECK(ring_eq(quad_value(S, sum), expect));
    }
}
