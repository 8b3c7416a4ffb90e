#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dser/grouplab.hpp"
#include "dser/normalizer.hpp"

using namespace dser;

namespace {

Elem rand_unit(const Ring& R, Rng& rng) {
    if (R.is_rationals()) {
        static const char* menu[] = {"2", "3", "-1", "1/2", "-2/3"};
        return ring_parse(R, menu[rng.below(5)]);
    }
    for (;;) {
        Elem u = ring_rand(R, rng);
        if (ring_is_unit(R, u)) return u;
    }
}

// diag with P slot idx scaled by u and P* slot idx by u^-1 (1-based idx).
Mat hyp_scale(const QuadSetup& S, int idx, const Elem& u) {
    Mat T = mat_eye(S.R, S.dim());
    T.at(S.n + idx - 1, S.n + idx - 1) = u;
    T.at(S.n + S.m + idx - 1, S.n + S.m + idx - 1) = ring_inv(S.R, u);
    return T;
}

// Swap every P basis vector with its P* partner.
Mat full_swap(const QuadSetup& S) {
    Mat T = mat_zeros(S.R, S.dim(), S.dim());
    for (int i = 0; i < S.n; ++i) T.at(i, i) = ring_one(S.R);
    for (int i = 0; i < S.m; ++i) {
        T.at(S.n + i, S.n + S.m + i) = ring_one(S.R);
        T.at(S.n + S.m + i, S.n + i) = ring_one(S.R);
    }
    return T;
}

// Random orthogonal element: an elementary word plus optional scaling and
// swap factors, so the result is not confined to the elementary subgroup.
Mat rand_orth(const QuadSetup& S, Rng& rng, int len = 6, bool spice = true) {
    Mat T = pword_eval(S, random_eo_pword(S, rng, len));
    if (spice) {
        if (rng.coin()) {
            int idx = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(S.m)));
            T = mat_mul(S.R, T, hyp_scale(S, idx, rand_unit(S.R, rng)));
        }
        if (rng.below(3) == 0) T = mat_mul(S.R, T, full_swap(S));
    }
    REQUIRE(is_orthogonal(S, T));
    return T;
}

Mat conj_by(const QuadSetup& S, const Mat& T, const Mat& X) {
    return mat_mul(S.R, mat_inv(S.R, T), mat_mul(S.R, X, T));
}

}  // namespace

TEST_CASE("class names parse back") {
    for (ConjClass c : all_conj_classes) {
        auto p = conj_class_parse(conj_class_name(c));
        REQUIRE(p.has_value());
        CHECK(*p == c);
    }
    CHECK_FALSE(conj_class_parse("a_jm").has_value());
    CHECK_FALSE(conj_class_parse("").has_value());
}

TEST_CASE("conjugation factorizations across rings and shapes") {
    Rng rng(20240823);
    for (const Ring& R : {Ring::zmod(5), Ring::zmod(7), Ring::rationals()}) {
        int trials = R.finite() ? 8 : 4;
        for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 2}, std::pair{1, 3}}) {
            QuadSetup Ssm = QuadSetup::identity_form(R, n, m - 1);
            QuadSetup S = QuadSetup::identity_form(R, n, m);
            for (ConjClass cls : all_conj_classes) {
                for (int t = 0; t < trials; ++t) {
                    Mat W = stabilize_matrix(Ssm, rand_orth(Ssm, rng));
                    GenNodePtr gen = make_class_generator(S, cls, rng);
                    GenWord word = conjugate_factorization(S, W, gen);
                    Mat lhs = conj_by(S, W, eval_node(S, gen));
                    CHECK(mat_eq(eval_word(S, word), lhs));
                }
            }
        }
    }
}

TEST_CASE("factorizations with a non-identity form") {
    Ring R = Ring::zmod(7);
    Mat phi = mat_from_longs(R, 2, 2, {1, 1, 1, 2});
    QuadSetup Ssm(R, 2, 1, phi);
    QuadSetup S(R, 2, 2, phi);
    Rng rng(99);
    for (ConjClass cls : all_conj_classes) {
        for (int t = 0; t < 6; ++t) {
            Mat W = stabilize_matrix(Ssm, rand_orth(Ssm, rng));
            GenNodePtr gen = make_class_generator(S, cls, rng);
            GenWord word = conjugate_factorization(S, W, gen);
            CHECK(mat_eq(eval_word(S, word), conj_by(S, W, eval_node(S, gen))));
        }
    }
}

TEST_CASE("factorization with the identity conjugator") {
    Ring R = Ring::zmod(5);
    QuadSetup S = QuadSetup::identity_form(R, 1, 2);
    Rng rng(7);
    for (ConjClass cls : all_conj_classes) {
        GenNodePtr gen = make_class_generator(S, cls, rng);
        GenWord word = conjugate_factorization(S, mat_eye(R, S.dim()), gen);
        CHECK(mat_eq(eval_word(S, word), eval_node(S, gen)));
    }
}

TEST_CASE("factorization rejections") {
    Ring R = Ring::zmod(5);
    QuadSetup S = QuadSetup::identity_form(R, 1, 3);
    Rng rng(13);
    Vec w{ring_one(R)};

    Mat notstab = ptok_eval(S, ptok_mix(1, 3, ring_one(R)));
    CHECK_THROWS_WITH_AS(
        conjugate_factorization(
            S, notstab, node_atom(rank_one_atom(S, AtomKind::EA, 3, w))),
        "not stabilized", std::invalid_argument);

    Mat I = mat_eye(R, S.dim());
    // Atom below the top index.
    CHECK_THROWS_WITH_AS(
        conjugate_factorization(
            S, I, node_atom(rank_one_atom(S, AtomKind::EA, 1, w))),
        "gen not in a recognized class", std::invalid_argument);
    // General (untagged) parameter.
    CHECK_THROWS_WITH_AS(
        conjugate_factorization(
            S, I, node_atom(general_atom(AtomKind::EA, mat_zeros(R, 3, 1)))),
        "gen not in a recognized class", std::invalid_argument);
    // Commutator with both atoms at the top index.
    CHECK_THROWS_WITH_AS(
        conjugate_factorization(
            S, I,
            node_comm(node_atom(rank_one_atom(S, AtomKind::EA, 3, w)),
                      node_atom(rank_one_atom(S, AtomKind::EBstar, 3, w)))),
        "gen not in a recognized class", std::invalid_argument);

    QuadSetup S1 = QuadSetup::identity_form(R, 1, 1);
    CHECK_THROWS_WITH_AS(
        make_class_generator(S1, ConjClass::AMjBstarKl, rng),
        "hyperbolic rank too small", std::invalid_argument);
}

TEST_CASE("reduction to a stabilized element") {
    Rng rng(314);
    for (const Ring& R : {Ring::zmod(5), Ring::zmod(9), Ring::rationals()}) {
        for (auto [n, m] : {std::pair{1, 2}, std::pair{2, 3}}) {
            QuadSetup S = QuadSetup::identity_form(R, n, m);
            int trials = R.finite() ? 8 : 4;
            for (int t = 0; t < trials; ++t) {
                Mat T = rand_orth(S, rng);
                ReductionTrace tr = reduce_to_smaller(S, T);
                CHECK(tr.l4.empty());
                CHECK(is_stabilized(S, tr.residual));
                Mat chk = mat_mul(
                    R, eval_left(S, tr.l4),
                    mat_mul(R, eval_left(S, tr.l3),
                            mat_mul(R, mat_mul(R, T, pword_eval(S, tr.r1)),
                                    pword_eval(S, tr.r2))));
                CHECK(mat_eq(chk, tr.residual));
            }
        }
    }
}

TEST_CASE("token conjugation covers every token flavor") {
    Ring R = Ring::zmod(5);
    QuadSetup Ssm = QuadSetup::identity_form(R, 1, 2);
    QuadSetup S = QuadSetup::identity_form(R, 1, 3);
    Rng rng(59);
    Elem c2 = ring_from_long(R, 2);
    Vec w{ring_from_long(R, 3)};
    std::vector<PTok> flavors{
        ptok_ea(3, w),        ptok_ea(1, w),        ptok_eb(3, w),
        ptok_eb(2, w),        ptok_mix(3, 1, c2),   ptok_mix(2, 3, c2),
        ptok_mix(1, 2, c2),   ptok_uk(3, 2, c2),    ptok_uk(1, 3, c2),
        ptok_uk(1, 2, c2),    ptok_usk(3, 1, c2),   ptok_usk(2, 3, c2),
        ptok_usk(2, 1, c2)};
    for (int t = 0; t < 4; ++t) {
        Mat W = stabilize_matrix(Ssm, rand_orth(Ssm, rng));
        for (const PTok& tk : flavors) {
            GenWord word = conjugate_token(S, W, tk);
            CHECK(mat_eq(eval_word(S, word), conj_by(S, W, ptok_eval(S, tk))));
        }
    }
    CHECK_THROWS_WITH_AS(
        conjugate_token(S, ptok_eval(S, ptok_mix(1, 3, c2)), ptok_ea(3, w)),
        "not stabilized", std::invalid_argument);
}

TEST_CASE("normality witnesses") {
    Rng rng(4242);
    struct Shape {
        Ring R;
        int n, m;
    };
    for (const Shape& sh : {Shape{Ring::zmod(5), 1, 2},
                            Shape{Ring::zmod(3), 1, 3},
                            Shape{Ring::rationals(), 1, 2}}) {
        QuadSetup S = QuadSetup::identity_form(sh.R, sh.n, sh.m);
        int trials = sh.R.finite() ? 6 : 3;
        for (int t = 0; t < trials; ++t) {
            Mat eta = rand_orth(S, rng);
            PWord g = random_eo_pword(S, rng, 4);
            g.push_back(ptok_mix(1, 2, ring_one(sh.R)));
            g.push_back(ptok_uk(2, 1, ring_from_long(sh.R, 1)));
            g.push_back(ptok_usk(1, 2, ring_one(sh.R)));
            WitnessResult wr = normality_witness(S, eta, g);
            Mat expect = conj_by(S, eta, pword_eval(S, g));
            CHECK(mat_eq(eval_word(S, wr.word), expect));
            CHECK(wr.trace.l4.empty());
        }
    }
}

TEST_CASE("witness words land in the enumerated elementary group") {
    Ring R = Ring::zmod(3);
    QuadSetup S = QuadSetup::identity_form(R, 1, 2);
    GroupCensus eo = enumerate_elementary(S);
    Rng rng(777);
    for (int t = 0; t < 6; ++t) {
        Mat eta = rand_orth(S, rng);
        PWord g = random_eo_pword(S, rng, 3);
        WitnessResult wr = normality_witness(S, eta, g);
        PackedMat key = pack_mat(S, eval_word(S, wr.word));
        CHECK(std::binary_search(eo.elems.begin(), eo.elems.end(), key));
    }
}
