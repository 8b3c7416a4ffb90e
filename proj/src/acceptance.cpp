#include "dser/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>

#include "dser/fdg.hpp"
#include "dser/normalizer.hpp"
#include "dser/relations.hpp"

namespace dser {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string ring_label(const Ring& R) {
    return R.is_rationals() ? "rationals" : "zmod:" + std::to_string(R.modulus);
}

// 1. Every random generator atom is orthogonal: E^t Psi E = Psi exactly.
Outcome crit_atoms(std::uint64_t seed) {
    const Ring rings[] = {Ring::rationals(), Ring::zmod(5), Ring::zmod(9)};
    long checked = 0;
    for (int ri = 0; ri < 3; ++ri) {
        const Ring& R = rings[ri];
        Rng rng(mix_seed(seed, 1, static_cast<std::uint64_t>(ri)));
        for (int t = 0; t < 1000; ++t) {
            const int n = static_cast<int>(rng.range(1, 3));
            const int m = static_cast<int>(rng.range(1, 4));
            QuadSetup S = QuadSetup::identity_form(R, n, m);
            const AtomKind kind = rng.coin() ? AtomKind::EA : AtomKind::EBstar;
            GenAtom a;
            if (rng.coin()) {
                Mat M = mat_zeros(R, m, n);
                for (int r = 0; r < m; ++r)
                    for (int c = 0; c < n; ++c) M.at(r, c) = ring_rand(R, rng);
                a = general_atom(kind, M);
            } else {
                Vec w(static_cast<size_t>(n));
                for (Elem& e : w) e = ring_rand(R, rng);
                a = rank_one_atom(S, kind, static_cast<int>(rng.range(1, m)), w,
                                  static_cast<int>(rng.range(1, n)));
            }
            if (!is_orthogonal(S, eval_atom(S, a)))
                return {false, "atom not orthogonal over " + ring_label(R) +
                                   " at trial " + std::to_string(t)};
            ++checked;
        }
    }
    return {true, std::to_string(checked) +
                      " random atoms orthogonal over rationals, zmod:5, zmod:9"};
}

// 2. The ten generator relations hold on random cases; corrupted recipes fail.
Outcome crit_relations(std::uint64_t seed) {
    const Ring rings[] = {Ring::zmod(5), Ring::zmod(9), Ring::rationals()};
    long held = 0, broken = 0;
    for (int ri = 0; ri < 3; ++ri) {
        QuadSetup S = QuadSetup::identity_form(rings[ri], 2, 3);
        std::uint64_t idx = 0;
        for (RelId id : all_relations()) {
            ++idx;
            Rng rng(mix_seed(seed, 2, static_cast<std::uint64_t>(ri), idx));
            RelationBatch b = verify_relation(S, id, 100, rng);
            if (b.failures != 0)
                return {false, std::string("relation ") + rel_name(id) +
                                   " failed over " + ring_label(rings[ri]) +
                                   ": " + b.first_failure};
            held += b.trials;
            RelationBatch mb = verify_relation(S, id, 20, rng, /*corrupt=*/true);
            if (mb.failures == 0)
                return {false, std::string("corrupted relation ") + rel_name(id) +
                                   " over " + ring_label(rings[ri]) +
                                   " went undetected"};
            broken += mb.failures;
        }
    }
    return {true, std::to_string(held) + " cases held; " +
                      std::to_string(broken) + " corrupted cases rejected"};
}

// 3. All six conjugation factorization displays evaluate to T^-1 gen T.
Outcome crit_displays(std::uint64_t seed) {
    const Ring rings[] = {Ring::zmod(5), Ring::zmod(7)};
    const int shapes[][2] = {{1, 2}, {2, 2}, {1, 3}};
    long checked = 0;
    std::uint64_t combo = 0;
    for (const Ring& R : rings) {
        for (const auto& sh : shapes) {
            QuadSetup S = QuadSetup::identity_form(R, sh[0], sh[1]);
            QuadSetup Ssm = QuadSetup::identity_form(R, sh[0], sh[1] - 1);
            for (ConjClass cls : all_conj_classes) {
                ++combo;
                for (int t = 0; t < 100; ++t) {
                    Rng rng(mix_seed(seed, 3, combo, static_cast<std::uint64_t>(t)));
                    Mat W = stabilize_matrix(Ssm, random_orthogonal(Ssm, rng));
                    GenNodePtr gen = make_class_generator(S, cls, rng);
                    GenWord word = conjugate_factorization(S, W, gen);
                    Mat rhs = mat_mul(R, block_inverse(S, W),
                                      mat_mul(R, eval_node(S, gen), W));
                    if (!mat_eq(eval_word(S, word), rhs))
                        return {false,
                                std::string("display for class ") +
                                    conj_class_name(cls) + " failed over " +
                                    ring_label(R) + " at (" +
                                    std::to_string(sh[0]) + "," +
                                    std::to_string(sh[1]) + ") trial " +
                                    std::to_string(t)};
                    ++checked;
                }
            }
        }
    }
    return {true, std::to_string(checked) +
                      " factorizations exact across 6 classes, 2 rings, 3 shapes"};
}

// 4. Corner reduction drives the (n+m, n+m) entry to exactly 1.
Outcome crit_corner(std::uint64_t seed) {
    const Ring rings[] = {Ring::zmod(9), Ring::zmod(3)};
    const int shapes[][2] = {{1, 2}, {2, 3}};
    long checked = 0;
    std::uint64_t combo = 0;
    for (const Ring& R : rings) {
        for (const auto& sh : shapes) {
            ++combo;
            QuadSetup S = QuadSetup::identity_form(R, sh[0], sh[1]);
            for (int t = 0; t < 50; ++t) {
                Rng rng(mix_seed(seed, 4, combo, static_cast<std::uint64_t>(t)));
                PWord w = random_eo_pword(S, rng, static_cast<int>(rng.range(3, 10)));
                Mat T = pword_eval(S, w);
                TaggedWord g = reduce_corner(S, T);
                Mat T2 = mat_mul(R, T, pword_eval(S, g.toks));
                const int c = S.n + S.m - 1;
                if (!tag_sound(S, g) || !ring_eq(T2.at(c, c), ring_one(R)))
                    return {false, "corner reduction failed over " +
                                       ring_label(R) + " at (" +
                                       std::to_string(sh[0]) + "," +
                                       std::to_string(sh[1]) + ") trial " +
                                       std::to_string(t)};
                ++checked;
            }
        }
    }
    return {true, std::to_string(checked) + " corner reductions exact"};
}

// 5. The F-D-G decomposition returns a verified reduced triple.
Outcome crit_fdg(std::uint64_t seed) {
    QuadSetup S = QuadSetup::identity_form(Ring::zmod(3), 1, 3);
    FdgContext ctx = make_fdg_context(S);
    for (int t = 0; t < 50; ++t) {
        Rng rng(mix_seed(seed, 5, static_cast<std::uint64_t>(t)));
        GenWord theta = pword_lower(S, random_eo_pword(S, rng, 8));
        Mat T = eval_word(S, theta);
        FdgTriple tri = fdg_decompose(ctx, theta);
        Mat Me = pword_eval(S, tri.eta.toks);
        Mat prod = mat_mul(S.R, Me,
                           mat_mul(S.R, pword_eval(S, tri.xi.toks),
                                   pword_eval(S, tri.mu.toks)));
        const bool ok = tri.reduced && tag_sound(S, tri.eta) &&
                        tag_sound(S, tri.xi) && tag_sound(S, tri.mu) &&
                        mat_eq(prod, T) &&
                        ring_is_zero(Me.at(S.n + S.m - 2, S.n + S.m - 1));
        if (!ok) return {false, "triple verification failed at trial " +
                                    std::to_string(t)};
    }
    return {true, "50 reduced triples verified over zmod:3 at (1,3)"};
}

// 6. Elementary subgroup normal in the full group at zmod:3, (1,2), with
//    constructive witnesses for random conjugates.
Outcome crit_normality(std::uint64_t seed) {
    QuadSetup S = QuadSetup::identity_form(Ring::zmod(3), 1, 2);
    GroupCensus O = enumerate_orthogonal(S);
    GroupCensus EO = enumerate_elementary(S);
    if (!O.audited) return {false, "orthogonal census not audited"};
    if (!normality_verdict_parallel(S, O, EO))
        return {false, "normality verdict negative"};
    Rng rng(mix_seed(seed, 6));
    for (int t = 0; t < 20; ++t) {
        Mat eta = unpack_mat(S, O.elems[rng.below(O.size())]);
        PWord g = random_eo_pword(S, rng, static_cast<int>(rng.range(2, 6)));
        WitnessResult wr = normality_witness(S, eta, g);
        Mat conj = mat_mul(S.R, block_inverse(S, eta),
                           mat_mul(S.R, pword_eval(S, g), eta));
        if (!mat_eq(eval_word(S, wr.word), conj))
            return {false, "witness mismatch at trial " + std::to_string(t)};
        if (!EO.contains(pack_mat(S, conj)))
            return {false, "conjugate escaped the elementary census at trial " +
                               std::to_string(t)};
    }
    std::ostringstream d;
    d << "|O| = " << O.size() << ", |EO| = " << EO.size()
      << ", normal, 20 witnesses verified";
    return {true, d.str()};
}

// 7. Coset-space stability from hyperbolic level 1 to 2 over zmod:3.
Outcome crit_k1(std::uint64_t seed) {
    (void)seed;
    QuadSetup Ssm = QuadSetup::identity_form(Ring::zmod(3), 1, 1);
    QuadSetup Sbig = QuadSetup::identity_form(Ring::zmod(3), 1, 2);
    K1Report rep = k1_stability_check(Ssm, Sbig);
    if (!rep.normal_big) return {false, "coset space at level 2 is not a group"};
    if (!rep.surjective) return {false, "canonical map not surjective"};
    if (!rep.products_well_defined)
        return {false, "coset products depend on representatives"};
    std::ostringstream d;
    d << "|KO1,1| = " << rep.cosets_small << ", |KO1,2| = " << rep.cosets_big
      << ", surjective, representative-independent";
    return {true, d.str()};
}

// 8. Direct scan baseline at (1,1) over zmod:3.
Outcome crit_baseline(std::uint64_t seed) {
    (void)seed;
    QuadSetup S = QuadSetup::identity_form(Ring::zmod(3), 1, 1);
    std::vector<PackedMat> scan = direct_scan_orthogonal(S);
    if (scan.size() != 48)
        return {false, "direct scan found " + std::to_string(scan.size()) +
                           " orthogonal matrices, expected 48"};
    GroupCensus EO = enumerate_elementary(S);
    if (EO.size() == 0 || 48 % EO.size() != 0)
        return {false, "elementary order " + std::to_string(EO.size()) +
                           " does not divide 48"};
    return {true, "scan of 19683 candidates: |O| = 48, |EO| = " +
                      std::to_string(EO.size()) + " divides 48"};
}

}  // namespace

std::vector<CriterionResult> run_all_criteria(std::uint64_t seed) {
    struct Spec {
        int id;
        const char* label;
        double limit;
        Outcome (*fn)(std::uint64_t);
    };
    const Spec specs[] = {
        {1, "generator orthogonality", 10.0, crit_atoms},
        {2, "generator relations and mutations", 60.0, crit_relations},
        {3, "conjugation factorization displays", 120.0, crit_displays},
        {4, "corner row reduction", 60.0, crit_corner},
        {5, "reduced F-D-G triples", 120.0, crit_fdg},
        {6, "normality with constructive witnesses", 600.0, crit_normality},
        {7, "coset-space stability across levels", 600.0, crit_k1},
        {8, "direct-scan baseline", 5.0, crit_baseline},
    };
    std::vector<CriterionResult> out;
    for (const Spec& sp : specs) {
        CriterionResult r;
        r.id = sp.id;
        r.label = sp.label;
        r.limit_seconds = sp.limit;
        const auto t0 = Clock::now();
        try {
            Outcome o = sp.fn(seed);
            r.pass = o.pass;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds =
            std::chrono::duration<double>(Clock::now() - t0).count();
        r.in_time = r.seconds < r.limit_seconds;
        out.push_back(std::move(r));
    }
    return out;
}

bool all_criteria_pass(const std::vector<CriterionResult>& rs) {
    return std::all_of(rs.begin(), rs.end(),
                       [](const CriterionResult& r) { return r.ok(); });
}

void print_criteria(const std::vector<CriterionResult>& rs, std::ostream& os) {
    for (const CriterionResult& r : rs) {
        os << "criterion " << r.id << ": " << (r.ok() ? "PASS" : "FAIL")
           << " - " << r.label << " (" << r.detail << ")";
        char buf[64];
        std::snprintf(buf, sizeof buf, " [%.2fs / limit %.0fs]", r.seconds,
                      r.limit_seconds);
        os << buf;
        if (r.pass && !r.in_time) os << " [over time budget]";
        os << "\n";
    }
}

}  // namespace dser
