#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dser/matrix.hpp"
#include "dser/ring.hpp"

using namespace dser;

namespace {

Vec vec_of(const Ring& R, const std::vector<long>& vals) {
    Vec v;
    v.reserve(vals.size());
    for (long x : vals) v.push_back(ring_from_long(R, x));
    return v;
}

// Laplace-expansion determinant; fine for the tiny sizes used here.
Elem det(const Ring& R, const Mat& A) {
    const int n = A.rows;
    if (n == 1) return A.at(0, 0);
    Elem acc = ring_zero(R);
    for (int j = 0; j < n; ++j) {
        Mat minor = mat_zeros(R, n - 1, n - 1);
        for (int r = 1; r < n; ++r)
            for (int c = 0, cc = 0; c < n; ++c)
                if (c != j) minor.at(r - 1, cc++) = A.at(r, c);
        Elem term = ring_mul(R, A.at(0, j), det(R, minor));
        acc = (j % 2 == 0) ? ring_add(R, acc, term) : ring_sub(R, acc, term);
    }
    return acc;
}

Mat record_matrix(const Ring& R, int m, const ERecord& rec) {
    Mat E = mat_eye(R, m);
    E.at(rec.row - 1, rec.col - 1) =
        ring_add(R, E.at(rec.row - 1, rec.col - 1), rec.scalar);
    return E;
}

}  // namespace

TEST_CASE("ring construction and parsing") {
    CHECK(Ring::parse("rationals").is_rationals());
    CHECK(Ring::parse("zmod:9").modulus == 9);
    CHECK(Ring::parse("zmod:15").finite());
    CHECK_THROWS_AS(Ring::parse("zmod:1"), std::invalid_argument);
    CHECK_THROWS_AS(Ring::parse("zmod:"), std::invalid_argument);
    CHECK_THROWS_AS(Ring::parse("gf:4"), std::invalid_argument);
    CHECK_THROWS_AS(Ring::parse("zmod:9x"), std::invalid_argument);
    // Even moduli are legal at the plain-ring level (the quadratic-space
    // layer is what needs 2 to be a unit).
    CHECK(Ring::zmod(6).modulus == 6);
}

TEST_CASE("ring axioms on randomized triples") {
    Rng rng(20240817);
    for (const Ring& R : {Ring::rationals(), Ring::zmod(5), Ring::zmod(9), Ring::zmod(15)}) {
        for (int t = 0; t < 200; ++t) {
            Elem a = ring_rand(R, rng), b = ring_rand(R, rng), c = ring_rand(R, rng);
            CHECK(ring_eq(ring_add(R, a, b), ring_add(R, b, a)));
            CHECK(ring_eq(ring_mul(R, a, b), ring_mul(R, b, a)));
            CHECK(ring_eq(ring_add(R, ring_add(R, a, b), c),
                          ring_add(R, a, ring_add(R, b, c))));
            CHECK(ring_eq(ring_mul(R, ring_mul(R, a, b), c),
                          ring_mul(R, a, ring_mul(R, b, c))));
            CHECK(ring_eq(ring_mul(R, a, ring_add(R, b, c)),
                          ring_add(R, ring_mul(R, a, b), ring_mul(R, a, c))));
            CHECK(ring_is_zero(ring_add(R, a, ring_neg(R, a))));
            CHECK(ring_eq(ring_mul(R, a, ring_one(R)), a));
            CHECK(ring_eq(ring_sub(R, a, b), ring_add(R, a, ring_neg(R, b))));
        }
    }
}

TEST_CASE("units, inverses, and one-half") {
    for (const Ring& R : {Ring::rationals(), Ring::zmod(5), Ring::zmod(9), Ring::zmod(15)}) {
        Elem two = ring_from_long(R, 2);
        CHECK(ring_eq(ring_mul(R, two, ring_half(R)), ring_one(R)));
        Rng rng(7);
        for (int t = 0; t < 50; ++t) {
            Elem u = ring_rand_unit(R, rng);
            CHECK(ring_is_unit(R, u));
            CHECK(ring_eq(ring_mul(R, u, ring_inv(R, u)), ring_one(R)));
        }
    }
    Ring z15 = Ring::zmod(15);
    CHECK_FALSE(ring_is_unit(z15, ring_from_long(z15, 3)));
    CHECK_THROWS_WITH_AS(ring_inv(z15, ring_from_long(z15, 3)), "not a unit",
                         std::domain_error);
    CHECK(ring_eq(ring_inv(z15, ring_from_long(z15, 7)), ring_from_long(z15, 13)));
    // 2 is not invertible mod 6, so half must fail there.
    CHECK_THROWS_AS(ring_half(Ring::zmod(6)), std::domain_error);
}

TEST_CASE("element text round trips") {
    Ring Q = Ring::rationals();
    for (const char* s : {"0", "1", "-1", "1/2", "-2/3", "7"}) {
        Elem e = ring_parse(Q, s);
        CHECK(ring_to_string(e) == s);
        CHECK(ring_eq(ring_parse(Q, ring_to_string(e)), e));
    }
    CHECK(ring_to_string(ring_parse(Q, "2/4")) == "1/2");
    Ring z9 = Ring::zmod(9);
    CHECK(ring_to_string(ring_parse(z9, "-1")) == "8");
    CHECK(ring_to_string(ring_parse(z9, "12")) == "3");
    CHECK_THROWS_AS(ring_parse(z9, ""), std::invalid_argument);
}

TEST_CASE("residue enumeration") {
    Ring z5 = Ring::zmod(5);
    CHECK(residue_count(z5) == 5);
    for (long i = 0; i < 5; ++i)
        CHECK(ring_eq(residue_at(z5, i), ring_from_long(z5, i)));
    CHECK_THROWS_AS(residue_count(Ring::rationals()), std::domain_error);
}

TEST_CASE("unimodularity") {
    Ring z15 = Ring::zmod(15);
    CHECK(is_unimodular(z15, vec_of(z15, {1, 0, 0})));
    CHECK(is_unimodular(z15, vec_of(z15, {3, 5})));
    CHECK_FALSE(is_unimodular(z15, vec_of(z15, {3, 6})));
    Ring Q = Ring::rationals();
    CHECK(is_unimodular(Q, vec_of(Q, {0, 2})));
    CHECK_FALSE(is_unimodular(Q, vec_of(Q, {0, 0})));
    CHECK_THROWS_WITH_AS(is_unimodular(Q, Vec{}), "empty vector",
                         std::invalid_argument);
}

TEST_CASE("stable range witnesses: pinned cases") {
    Ring z6 = Ring::zmod(6);
    Vec b = stable_range_witness(z6, vec_of(z6, {2, 3}), 1);
    REQUIRE(b.size() == 1);
    CHECK(ring_eq(b[0], ring_from_long(z6, 1)));

    Ring z9 = Ring::zmod(9);
    Vec b2 = stable_range_witness(z9, vec_of(z9, {1, 0}), 1);
    REQUIRE(b2.size() == 1);
    CHECK(ring_is_zero(b2[0]));

    CHECK_THROWS_WITH_AS(stable_range_witness(z6, vec_of(z6, {2, 2}), 1),
                         "not unimodular", std::runtime_error);
}

TEST_CASE("stable range witnesses: rationals rule and random property") {
    Ring Q = Ring::rationals();
    Vec bq = stable_range_witness(Q, vec_of(Q, {0, 5}), 1);
    CHECK(ring_eq(bq[0], ring_one(Q)));
    Vec bq2 = stable_range_witness(Q, vec_of(Q, {2, 7}), 1);
    CHECK(ring_is_zero(bq2[0]));

    Rng rng(99);
    for (const Ring& R : {Ring::zmod(5), Ring::zmod(9), Ring::zmod(15), Ring::zmod(6)}) {
        for (int l : {1, 2}) {
            int found = 0;
            for (int t = 0; t < 60; ++t) {
                Vec v(static_cast<size_t>(l) + 1);
                for (Elem& e : v) e = ring_rand(R, rng);
                if (!is_unimodular(R, v)) continue;
                ++found;
                Vec b = stable_range_witness(R, v, l);
                REQUIRE(static_cast<int>(b.size()) == l);
                Vec s(static_cast<size_t>(l));
                for (int i = 0; i < l; ++i)
                    s[i] = ring_add(R, v[i], ring_mul(R, v.back(), b[i]));
                CHECK(is_unimodular(R, s));
            }
            CHECK(found > 10);
        }
    }
}

TEST_CASE("elementary row reduction: pinned cases") {
    Ring z5 = Ring::zmod(5);
    CHECK(elementary_row_reduce(z5, vec_of(z5, {0, 0, 1})).empty());

    auto recs = elementary_row_reduce(z5, vec_of(z5, {1, 0}));
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].row == 1);
    CHECK(recs[0].col == 2);
    CHECK(ring_eq(recs[0].scalar, ring_from_long(z5, 1)));
    CHECK(recs[1].row == 2);
    CHECK(recs[1].col == 1);
    CHECK(ring_eq(recs[1].scalar, ring_from_long(z5, -1)));
    Vec out = apply_records(z5, vec_of(z5, {1, 0}), recs);
    CHECK(ring_is_zero(out[0]));
    CHECK(ring_eq(out[1], ring_one(z5)));

    CHECK_THROWS_AS(elementary_row_reduce(z5, vec_of(z5, {0, 0})),
                    std::runtime_error);
}

TEST_CASE("elementary row reduction: random property with det check") {
    Rng rng(4242);
    for (const Ring& R :
         {Ring::rationals(), Ring::zmod(5), Ring::zmod(9), Ring::zmod(15), Ring::zmod(6)}) {
        for (int m : {2, 3, 4}) {
            int found = 0;
            for (int t = 0; t < 40 && found < 20; ++t) {
                Vec v(static_cast<size_t>(m));
                for (Elem& e : v) e = ring_rand(R, rng);
                if (!is_unimodular(R, v)) continue;
                ++found;
                auto recs = elementary_row_reduce(R, v);
                Vec out = apply_records(R, v, recs);
                for (int i = 0; i + 1 < m; ++i) CHECK(ring_is_zero(out[i]));
                CHECK(ring_eq(out.back(), ring_one(R)));
                // Multiply the records out and confirm v ε = (0,…,0,1) and det ε = 1.
                Mat eps = mat_eye(R, m);
                for (const ERecord& rec : recs) {
                    CHECK(rec.row != rec.col);
                    eps = mat_mul(R, eps, record_matrix(R, m, rec));
                }
                Vec prod = vec_mat(R, v, eps);
                for (int i = 0; i + 1 < m; ++i) CHECK(ring_is_zero(prod[i]));
                CHECK(ring_eq(prod.back(), ring_one(R)));
                CHECK(ring_eq(det(R, eps), ring_one(R)));
            }
            CHECK(found >= 10);
        }
    }
    // The (2,3) mod 5 case from the contract: product must give (0,1).
    Ring z5 = Ring::zmod(5);
    auto recs = elementary_row_reduce(z5, vec_of(z5, {2, 3}));
    Vec out = apply_records(z5, vec_of(z5, {2, 3}), recs);
    CHECK(ring_is_zero(out[0]));
    CHECK(ring_eq(out[1], ring_one(z5)));
}

TEST_CASE("matrix basics") {
    Ring z9 = Ring::zmod(9);
    Mat A = mat_from_longs(z9, 2, 3, {1, 2, 3, 4, 5, 6});
    Mat B = mat_from_longs(z9, 3, 2, {1, 0, 0, 1, 1, 1});
    Mat AB = mat_mul(z9, A, B);
    CHECK(mat_eq(AB, mat_from_longs(z9, 2, 2, {4, 5, 1, 2})));
    CHECK(mat_eq(mat_transpose(A), mat_from_longs(z9, 3, 2, {1, 4, 2, 5, 3, 6})));
    CHECK(mat_is_identity(z9, mat_eye(z9, 4)));
    CHECK_FALSE(mat_is_identity(z9, mat_from_longs(z9, 2, 2, {1, 1, 0, 1})));
    Mat S = mat_add(z9, A, mat_neg(z9, A));
    CHECK(mat_eq(S, mat_zeros(z9, 2, 3)));
    CHECK(mat_eq(mat_scale(z9, ring_from_long(z9, 2), A),
                 mat_from_longs(z9, 2, 3, {2, 4, 6, 8, 1, 3})));

    Vec x = vec_of(z9, {1, 0, 1});
    Vec y = mat_vec(z9, A, x);
    CHECK(ring_eq(y[0], ring_from_long(z9, 4)));
    CHECK(ring_eq(y[1], ring_from_long(z9, 1)));
    Vec r = vec_mat(z9, vec_of(z9, {1, 1}), A);
    CHECK(ring_eq(r[2], ring_from_long(z9, 0)));
}

TEST_CASE("matrix inverse, including non-unit-pivot rings") {
    Rng rng(31337);
    for (const Ring& R : {Ring::rationals(), Ring::zmod(5), Ring::zmod(9)}) {
        for (int t = 0; t < 30; ++t) {
            int d = static_cast<int>(rng.range(1, 4));
            Mat A = mat_eye(R, d);
            // Random product of elementary moves stays invertible.
            for (int k = 0; k < 6; ++k) {
                int i = static_cast<int>(rng.below(static_cast<uint64_t>(d)));
                int j = static_cast<int>(rng.below(static_cast<uint64_t>(d)));
                if (i == j) continue;
                Mat E = mat_eye(R, d);
                E.at(i, j) = ring_rand(R, rng);
                A = mat_mul(R, A, E);
            }
            Mat Ainv = mat_inv(R, A);
            CHECK(mat_is_identity(R, mat_mul(R, A, Ainv)));
            CHECK(mat_is_identity(R, mat_mul(R, Ainv, A)));
        }
    }
    // Over Z/15 the leading column may hold no unit at all; the solver has
    // to combine rows first.  det [[3,5],[5,3]] = -16 = 14, a unit mod 15.
    Ring z15 = Ring::zmod(15);
    Mat M = mat_from_longs(z15, 2, 2, {3, 5, 5, 3});
    Mat Minv = mat_inv(z15, M);
    CHECK(mat_is_identity(z15, mat_mul(z15, M, Minv)));
    Mat Sg = mat_from_longs(z15, 2, 2, {3, 0, 0, 1});
    CHECK_THROWS_WITH_AS(mat_inv(z15, Sg), "singular", std::runtime_error);
    Mat Z = mat_from_longs(z15, 2, 2, {0, 0, 1, 1});
    CHECK_THROWS_AS(mat_inv(z15, Z), std::runtime_error);
}

TEST_CASE("matrix text round trip") {
    Ring Q = Ring::rationals();
    Mat A = mat_zeros(Q, 2, 3);
    A.at(0, 0) = ring_parse(Q, "1/2");
    A.at(0, 2) = ring_parse(Q, "-2");
    A.at(1, 1) = ring_parse(Q, "7/3");
    std::string text = mat_to_text(A);
    CHECK(text == "1/2 0 -2\n0 7/3 0\n");
    CHECK(mat_eq(mat_parse_text(Q, text), A));

    Ring z7 = Ring::zmod(7);
    Mat B = mat_from_longs(z7, 2, 2, {1, 6, 3, 0});
    CHECK(mat_eq(mat_parse_text(z7, mat_to_text(B)), B));
}
