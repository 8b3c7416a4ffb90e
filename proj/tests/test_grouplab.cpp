#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dser/grouplab.hpp"
#include "dser/rng.hpp"

using namespace dser;

namespace {

QuadSetup z3_11() { return QuadSetup::identity_form(Ring::zmod(3), 1, 1); }
QuadSetup z3_12() { return QuadSetup::identity_form(Ring::zmod(3), 1, 2); }

}  // namespace

TEST_CASE("packed matrices roundtrip and multiply exactly") {
    QuadSetup S = QuadSetup::identity_form(Ring::zmod(5), 1, 2);
    Rng rng(101);
    for (int t = 0; t < 20; ++t) {
        Mat A = pword_eval(S, random_eo_pword(S, rng, 4));
        Mat B = pword_eval(S, random_eo_pword(S, rng, 4));
        PackedMat pa = pack_mat(S, A);
        PackedMat pb = pack_mat(S, B);
        CHECK(mat_eq(unpack_mat(S, pa), A));
        CHECK(mat_eq(unpack_mat(S, packed_mul(5, pa, pb)), mat_mul(S.R, A, B)));
    }
    CHECK(mat_eq(unpack_mat(S, packed_eye(S.dim())), mat_eye(S.R, S.dim())));

    QuadSetup Q = QuadSetup::identity_form(Ring::rationals(), 1, 1);
    CHECK_THROWS_WITH(pack_mat(Q, mat_eye(Q.R, 3)), "finite ring required");
    CHECK_THROWS_WITH(pack_mat(z3_11(), mat_eye(Ring::zmod(3), 4)),
                      "size mismatch");
}

TEST_CASE("direct scan finds the full orthogonal group in dimension three") {
    QuadSetup S = z3_11();
    std::vector<PackedMat> O = direct_scan_orthogonal(S);
    CHECK(O.size() == 48);
    for (const PackedMat& p : O) CHECK(is_orthogonal(S, unpack_mat(S, p)));
    auto formula = orthogonal_order_formula(S);
    REQUIRE(formula.has_value());
    CHECK(*formula == 48);

    // Scan space too large for the guard.
    QuadSetup big = QuadSetup::identity_form(Ring::zmod(3), 2, 3);
    CHECK_THROWS_AS(direct_scan_orthogonal(big), BudgetExceeded);
}

TEST_CASE("order formula applies only to odd prime moduli in odd dimension") {
    CHECK(*orthogonal_order_formula(z3_12()) == 103680);
    CHECK(*orthogonal_order_formula(
              QuadSetup::identity_form(Ring::zmod(5), 1, 2)) == 18720000ull);
    CHECK(!orthogonal_order_formula(
               QuadSetup::identity_form(Ring::zmod(9), 1, 2))
               .has_value());
    CHECK(!orthogonal_order_formula(
               QuadSetup::identity_form(Ring::rationals(), 1, 2))
               .has_value());
    CHECK(!orthogonal_order_formula(
               QuadSetup::identity_form(Ring::zmod(3), 2, 3))
               .has_value());
}

TEST_CASE("elementary census at (1,1) over Z/3 has twelve elements") {
    QuadSetup S = z3_11();
    GroupCensus EO = enumerate_elementary(S);
    GroupCensus O = enumerate_orthogonal(S);
    CHECK(EO.size() == 12);
    CHECK(O.size() == 48);
    CHECK(O.audited);
    CHECK(O.size() % EO.size() == 0);
    for (const PackedMat& p : EO.elems) CHECK(O.contains(p));

    // Spot-check closure on random pairs.
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const PackedMat& a = EO.elems[rng.below(EO.size())];
        const PackedMat& b = EO.elems[rng.below(EO.size())];
        CHECK(EO.contains(packed_mul(3, a, b)));
    }
}

TEST_CASE("serial and parallel closures agree element for element") {
    QuadSetup S = z3_12();
    std::vector<Mat> seeds = atom_seed_mats(S);
    std::vector<PackedMat> a = closure_serial(S, seeds);
    std::vector<PackedMat> b = closure_parallel(S, seeds);
    CHECK(a.size() == 25920);
    REQUIRE(a.size() == b.size());
    CHECK(a == b);

    QuadSetup T = z3_11();
    std::vector<Mat> oseeds = orthogonal_seed_mats(T);
    CHECK(closure_serial(T, oseeds) == closure_parallel(T, oseeds));
}

TEST_CASE("closure stops early when the budget is exhausted") {
    QuadSetup S = z3_12();
    try {
        closure_serial(S, atom_seed_mats(S), 100);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.partial_count > 100);
        CHECK(std::string(e.what()) == "enumeration budget exceeded");
    }
    CHECK_THROWS_AS(closure_parallel(S, atom_seed_mats(S), 100),
                    BudgetExceeded);
}

TEST_CASE("audited orthogonal census at (1,2) over Z/3") {
    QuadSetup S = z3_12();
    GroupCensus O = enumerate_orthogonal(S);
    CHECK(O.size() == 103680);
    CHECK(O.audited);
    GroupCensus EO = enumerate_elementary(S);
    CHECK(EO.size() == 25920);
    for (int i = 0; i < 2000; ++i) CHECK(O.contains(EO.elems[i * 12]));
}

TEST_CASE("generators carrying the top index close to the full elementary group") {
    QuadSetup S = z3_12();
    std::vector<PackedMat> top = closure_parallel(S, m_subscript_seed_mats(S));
    CHECK(top.size() == 25920);
    CHECK(top == closure_parallel(S, atom_seed_mats(S)));

    QuadSetup empty = QuadSetup::identity_form(Ring::zmod(3), 1, 0);
    CHECK_THROWS_WITH((void)m_subscript_seed_mats(empty), "nothing to generate");
}

TEST_CASE("conjugation closure verdicts agree between kernels") {
    QuadSetup S = z3_11();
    GroupCensus O = enumerate_orthogonal(S);
    GroupCensus EO = enumerate_elementary(S);
    CHECK(normality_verdict_serial(S, O, EO));
    CHECK(normality_verdict_parallel(S, O, EO));

    // Against a proper subgroup that is not closed under conjugation the
    // verdict must be negative: take the cyclic group of one atom.
    std::vector<Mat> one{ptok_eval(S, ptok_ea(1, Vec{Elem{1L}}))};
    GroupCensus tiny;
    tiny.elems = closure_serial(S, one);
    CHECK(tiny.size() == 3);
    CHECK(!normality_verdict_serial(S, O, tiny));
    CHECK(!normality_verdict_parallel(S, O, tiny));
}

TEST_CASE("coset space of the elementary subgroup at (1,1) over Z/3") {
    QuadSetup S = z3_11();
    GroupCensus O = enumerate_orthogonal(S);
    GroupCensus EO = enumerate_elementary(S);
    bool normal = normality_verdict_parallel(S, O, EO);
    CosetSpace cs = coset_space(S, O, EO, normal);
    CHECK(cs.size() == 4);
    CHECK(cs.is_group);
    CHECK(cs.coset_of.size() == O.size());
    // The identity's coset key equals the least member of EO itself.
    CHECK(cs.coset_key(packed_eye(S.dim())) == EO.elems.front());
    // Unknown elements are rejected (the zero matrix is never orthogonal).
    CHECK_THROWS_WITH((void)cs.coset_key(pack_mat(S, mat_zeros(S.R, 3, 3))),
                      "element not in ambient census");
    // Each representative is the least member of its own coset.
    for (const PackedMat& r : cs.reps) CHECK(cs.coset_key(r) == r);
}

TEST_CASE("coset space is stable from level one to level two over Z/3") {
    K1Report rep = k1_stability_check(z3_11(), z3_12());
    CHECK(rep.order_O_small == 48);
    CHECK(rep.order_EO_small == 12);
    CHECK(rep.order_O_big == 103680);
    CHECK(rep.order_EO_big == 25920);
    CHECK(rep.cosets_small == 4);
    CHECK(rep.cosets_big == 4);
    CHECK(rep.surjective);
    CHECK(rep.products_well_defined);

    CHECK_THROWS_WITH(
        (void)k1_stability_check(
            z3_11(), QuadSetup::identity_form(Ring::zmod(5), 1, 2)),
        "ring mismatch");
    CHECK_THROWS_WITH((void)k1_stability_check(z3_11(), z3_11()),
                      "ring mismatch");
}

TEST_CASE("word census rewrites members as atom words") {
    QuadSetup S = z3_11();
    WordCensus census = elementary_word_census(S);
    GroupCensus EO = enumerate_elementary(S);
    CHECK(census.size() == EO.size());
    for (const PackedMat& p : EO.elems) {
        auto w = census_word(census, p);
        REQUIRE(w.has_value());
        CHECK(mat_eq(pword_eval(S, *w), unpack_mat(S, p)));
    }
    // The identity gets the empty word.
    CHECK(census_word(census, packed_eye(S.dim()))->empty());
    // Non-members give nothing.
    Mat twoI = mat_scale(S.R, Elem{2L}, mat_eye(S.R, S.dim()));
    CHECK(!census_word(census, pack_mat(S, twoI)).has_value());

    QuadSetup S2 = z3_12();
    WordCensus census2 = elementary_word_census(S2);
    CHECK(census2.size() == 25920);
    Rng rng(31);
    GroupCensus EO2 = enumerate_elementary(S2);
    for (int t = 0; t < 40; ++t) {
        const PackedMat& p = EO2.elems[rng.below(EO2.size())];
        auto w = census_word(census2, p);
        REQUIRE(w.has_value());
        CHECK(mat_eq(pword_eval(S2, *w), unpack_mat(S2, p)));
    }
}
