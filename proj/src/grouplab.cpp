#include "dser/grouplab.hpp"

#include "dser/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dser {

namespace {

void require_packable(const QuadSetup& S) {
    if (!S.R.finite())
        throw std::invalid_argument("finite ring required");
    if (S.dim() > 8)
        throw std::invalid_argument("dimension too large for packed enumeration");
    if (S.R.modulus >= 256)
        throw std::invalid_argument("modulus too large for packed enumeration");
}

bool is_prime(long q) {
    if (q < 2) return false;
    for (long d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

}  // namespace

PackedMat pack_mat(const QuadSetup& S, const Mat& M) {
    require_packable(S);
    if (M.rows != S.dim() || M.cols != S.dim())
        throw std::invalid_argument("size mismatch");
    PackedMat p;
    p.dim = static_cast<uint8_t>(S.dim());
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j)
            p.a[static_cast<size_t>(i) * M.cols + j] =
                static_cast<uint8_t>(std::get<long>(M.at(i, j)));
    return p;
}

Mat unpack_mat(const QuadSetup& S, const PackedMat& P) {
    Mat M = mat_zeros(S.R, P.dim, P.dim);
    for (int i = 0; i < P.dim; ++i)
        for (int j = 0; j < P.dim; ++j)
            M.at(i, j) = Elem{static_cast<long>(P.a[static_cast<size_t>(i) * P.dim + j])};
    return M;
}

PackedMat packed_mul(long q, const PackedMat& A, const PackedMat& B) {
    PackedMat C;
    const int d = A.dim;
    C.dim = A.dim;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            unsigned acc = 0;
            for (int k = 0; k < d; ++k)
                acc += static_cast<unsigned>(A.a[static_cast<size_t>(i) * d + k]) *
                       static_cast<unsigned>(B.a[static_cast<size_t>(k) * d + j]);
            C.a[static_cast<size_t>(i) * d + j] =
                static_cast<uint8_t>(acc % static_cast<unsigned>(q));
        }
    }
    return C;
}

PackedMat packed_eye(int dim) {
    PackedMat I;
    I.dim = static_cast<uint8_t>(dim);
    for (int i = 0; i < dim; ++i) I.a[static_cast<size_t>(i) * dim + i] = 1;
    return I;
}

size_t closure_budget() {
    if (const char* env = std::getenv("DSER_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<size_t>(v);
    }
    return 2000000;
}

namespace {

using PackedSet = std::unordered_set<PackedMat, PackedMatHash>;

std::vector<PackedMat> dedup_seeds(const QuadSetup& S,
                                   const std::vector<Mat>& seeds) {
    PackedSet seen;
    std::vector<PackedMat> gens;
    for (const Mat& M : seeds) {
        PackedMat p = pack_mat(S, M);
        if (seen.insert(p).second) gens.push_back(p);
    }
    return gens;
}

std::vector<PackedMat> finish_closure(PackedSet& set) {
    std::vector<PackedMat> out(set.begin(), set.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<PackedMat> closure_serial(const QuadSetup& S,
                                      const std::vector<Mat>& seeds,
                                      size_t budget) {
    require_packable(S);
    const long q = S.R.modulus;
    std::vector<PackedMat> gens = dedup_seeds(S, seeds);
    PackedSet set;
    std::vector<PackedMat> frontier;
    auto add = [&](const PackedMat& p) {
        if (set.insert(p).second) {
            if (set.size() > budget) throw BudgetExceeded(set.size());
            frontier.push_back(p);
        }
    };
    add(packed_eye(S.dim()));
    for (const PackedMat& g : gens) add(g);
    while (!frontier.empty()) {
        std::vector<PackedMat> next;
        for (const PackedMat& M : frontier) {
            for (const PackedMat& g : gens) {
                PackedMat c = packed_mul(q, M, g);
                if (set.insert(c).second) {
                    if (set.size() > budget) throw BudgetExceeded(set.size());
                    next.push_back(c);
                }
            }
        }
        frontier.swap(next);
    }
    return finish_closure(set);
}

std::vector<PackedMat> closure_parallel(const QuadSetup& S,
                                        const std::vector<Mat>& seeds,
                                        size_t budget) {
    require_packable(S);
    const long q = S.R.modulus;
    std::vector<PackedMat> gens = dedup_seeds(S, seeds);
    PackedSet set;
    std::vector<PackedMat> frontier;
    auto add = [&](const PackedMat& p) {
        if (set.insert(p).second) {
            if (set.size() > budget) throw BudgetExceeded(set.size());
            frontier.push_back(p);
        }
    };
    add(packed_eye(S.dim()));
    for (const PackedMat& g : gens) add(g);
    while (!frontier.empty()) {
        // Expand the whole level in parallel; the shared set is read-only
        // here, so lookups need no locks.  Merging is serial, which keeps
        // the result identical to the serial kernel.
        int nthreads = 1;
#ifdef _OPENMP
        nthreads = omp_get_max_threads();
#endif
        std::vector<std::vector<PackedMat>> local(static_cast<size_t>(nthreads));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (size_t fi = 0; fi < frontier.size(); ++fi) {
            int tid = 0;
#ifdef _OPENMP
            tid = omp_get_thread_num();
#endif
            for (const PackedMat& g : gens) {
                PackedMat c = packed_mul(q, frontier[fi], g);
                if (!set.count(c)) local[static_cast<size_t>(tid)].push_back(c);
            }
        }
        std::vector<PackedMat> next;
        for (const auto& chunk : local) {
            for (const PackedMat& c : chunk) {
                if (set.insert(c).second) {
                    if (set.size() > budget) throw BudgetExceeded(set.size());
                    next.push_back(c);
                }
            }
        }
        frontier.swap(next);
    }
    return finish_closure(set);
}

bool GroupCensus::contains(const PackedMat& p) const {
    return std::binary_search(elems.begin(), elems.end(), p);
}

std::vector<Mat> atom_seed_mats(const QuadSetup& S) {
    require_packable(S);
    const long q = S.R.modulus;
    std::vector<Mat> out;
    // All nonzero vectors over (Z/q)^n by odometer.
    std::vector<long> odo(static_cast<size_t>(S.n), 0);
    for (;;) {
        int pos = S.n - 1;
        while (pos >= 0 && ++odo[static_cast<size_t>(pos)] == q)
            odo[static_cast<size_t>(pos)] = 0, --pos;
        if (pos < 0) break;
        Vec w(static_cast<size_t>(S.n));
        for (int i = 0; i < S.n; ++i) w[static_cast<size_t>(i)] = Elem{odo[static_cast<size_t>(i)]};
        for (int i = 1; i <= S.m; ++i) {
            out.push_back(ptok_eval(S, ptok_ea(i, w)));
            out.push_back(ptok_eval(S, ptok_eb(i, w)));
        }
    }
    return out;
}

std::vector<Mat> m_subscript_seed_mats(const QuadSetup& S) {
    require_packable(S);
    if (S.m < 1) throw std::invalid_argument("nothing to generate");
    const long q = S.R.modulus;
    std::vector<Mat> out;
    std::vector<long> odo(static_cast<size_t>(S.n), 0);
    for (;;) {
        int pos = S.n - 1;
        while (pos >= 0 && ++odo[static_cast<size_t>(pos)] == q)
            odo[static_cast<size_t>(pos)] = 0, --pos;
        if (pos < 0) break;
        Vec w(static_cast<size_t>(S.n));
        for (int i = 0; i < S.n; ++i) w[static_cast<size_t>(i)] = Elem{odo[static_cast<size_t>(i)]};
        out.push_back(ptok_eval(S, ptok_ea(S.m, w)));
        out.push_back(ptok_eval(S, ptok_eb(S.m, w)));
    }
    for (int i = 1; i < S.m; ++i) {
        for (long c = 1; c < q; ++c) {
            Elem ce{c};
            out.push_back(ptok_eval(S, ptok_mix(i, S.m, ce)));
            out.push_back(ptok_eval(S, ptok_mix(S.m, i, ce)));
            out.push_back(ptok_eval(S, ptok_usk(i, S.m, ce)));
            out.push_back(ptok_eval(S, ptok_uk(i, S.m, ce)));
        }
    }
    return out;
}

std::vector<Mat> orthogonal_seed_mats(const QuadSetup& S) {
    require_packable(S);
    const Ring& R = S.R;
    const long q = R.modulus;
    const int n = S.n, m = S.m;
    std::vector<Mat> out = atom_seed_mats(S);
    // Hyperbolic pair swaps e_i <-> f_i.
    for (int i = 0; i < m; ++i) {
        Mat M = mat_eye(R, S.dim());
        M.at(n + i, n + i) = ring_zero(R);
        M.at(n + m + i, n + m + i) = ring_zero(R);
        M.at(n + i, n + m + i) = ring_one(R);
        M.at(n + m + i, n + i) = ring_one(R);
        if (!is_orthogonal(S, M)) throw std::logic_error("swap seed not orthogonal");
        out.push_back(M);
    }
    // Hyperbolic scalings diag(u, u^-1).
    for (int i = 0; i < m; ++i) {
        for (long u = 2; u < q; ++u) {
            Elem ue{u};
            if (!ring_is_unit(R, ue)) continue;
            Mat M = mat_eye(R, S.dim());
            M.at(n + i, n + i) = ue;
            M.at(n + m + i, n + m + i) = ring_inv(R, ue);
            if (!is_orthogonal(S, M)) throw std::logic_error("scale seed not orthogonal");
            out.push_back(M);
        }
    }
    // Isometries of the Q part: all n x n matrices E with E^t phi E = phi.
    double scan = 1.0;
    for (int i = 0; i < n * n; ++i) scan *= static_cast<double>(q);
    if (scan <= 100000.0) {
        std::vector<long> odo(static_cast<size_t>(n) * n, 0);
        for (;;) {
            Mat E = mat_zeros(R, n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    E.at(i, j) = Elem{odo[static_cast<size_t>(i) * n + j]};
            Mat lhs = mat_mul(R, mat_transpose(E), mat_mul(R, S.phi, E));
            if (mat_eq(lhs, S.phi)) {
                Mat M = mat_eye(R, S.dim());
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) M.at(i, j) = E.at(i, j);
                out.push_back(M);
            }
            int pos = n * n - 1;
            while (pos >= 0 && ++odo[static_cast<size_t>(pos)] == q)
                odo[static_cast<size_t>(pos)] = 0, --pos;
            if (pos < 0) break;
        }
    }
    return out;
}

std::vector<PackedMat> direct_scan_orthogonal(const QuadSetup& S, size_t budget) {
    require_packable(S);
    const long q = S.R.modulus;
    const int d = S.dim();
    double scan = 1.0;
    for (int i = 0; i < d * d; ++i) scan *= static_cast<double>(q);
    if (scan > 2.0e7) throw BudgetExceeded(0);
    PackedMat Psi = pack_mat(S, psi_matrix(S));
    std::vector<PackedMat> out;
    PackedMat T;
    T.dim = static_cast<uint8_t>(d);
    const int cells = d * d;
    for (;;) {
        // T^t Psi T == Psi, in packed arithmetic.
        PackedMat Tt;
        Tt.dim = T.dim;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                Tt.a[static_cast<size_t>(i) * d + j] = T.a[static_cast<size_t>(j) * d + i];
        PackedMat lhs = packed_mul(q, Tt, packed_mul(q, Psi, T));
        if (lhs == Psi) {
            out.push_back(T);
            if (out.size() > budget) throw BudgetExceeded(out.size());
        }
        int pos = cells - 1;
        while (pos >= 0 && ++T.a[static_cast<size_t>(pos)] == q)
            T.a[static_cast<size_t>(pos)] = 0, --pos;
        if (pos < 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<unsigned long long> orthogonal_order_formula(const QuadSetup& S) {
    if (!S.R.finite()) return std::nullopt;
    const long q = S.R.modulus;
    if (!is_prime(q) || q == 2) return std::nullopt;
    const int d = S.dim();
    if (d % 2 == 0) return std::nullopt;
    const int k = (d - 1) / 2;
    if (k > 6) return std::nullopt;
    unsigned long long order = 2;
    for (int i = 0; i < k * k; ++i) order *= static_cast<unsigned long long>(q);
    for (int i = 1; i <= k; ++i) {
        unsigned long long qp = 1;
        for (int e = 0; e < 2 * i; ++e) qp *= static_cast<unsigned long long>(q);
        order *= (qp - 1);
    }
    return order;
}

GroupCensus enumerate_elementary(const QuadSetup& S, size_t budget) {
    GroupCensus c;
    c.elems = closure_parallel(S, atom_seed_mats(S), budget);
    c.generator_desc = "closure of all indexed atoms";
    c.audited = false;
    return c;
}

GroupCensus enumerate_orthogonal(const QuadSetup& S, size_t budget) {
    GroupCensus c;
    const long q = S.R.modulus;
    double scan = 1.0;
    for (int i = 0; i < S.dim() * S.dim(); ++i) scan *= static_cast<double>(q);
    if (S.dim() <= 3 && scan <= 2.0e7) {
        c.elems = direct_scan_orthogonal(S, budget);
        c.generator_desc = "direct scan of all matrices";
        c.audited = true;
    } else {
        c.elems = closure_parallel(S, orthogonal_seed_mats(S), budget);
        c.generator_desc = "closure of seeds (atoms, swaps, scalings, Q-isometries)";
        c.audited = false;
    }
    if (auto expected = orthogonal_order_formula(S)) {
        if (c.elems.size() != *expected) {
            std::ostringstream os;
            os << "orthogonal census incomplete: " << c.elems.size() << " of "
               << *expected;
            throw std::runtime_error(os.str());
        }
        c.audited = true;
    }
    return c;
}

namespace {

PackedMat packed_inverse(const QuadSetup& S, const PackedMat& p) {
    return pack_mat(S, mat_inv(S.R, unpack_mat(S, p)));
}

}  // namespace

bool normality_verdict_serial(const QuadSetup& S, const GroupCensus& O,
                              const GroupCensus& EO) {
    const long q = S.R.modulus;
    std::vector<PackedMat> gens;
    for (const Mat& g : atom_seed_mats(S)) gens.push_back(pack_mat(S, g));
    for (const PackedMat& g : O.elems) {
        PackedMat gi = packed_inverse(S, g);
        for (const PackedMat& h : gens) {
            PackedMat c = packed_mul(q, packed_mul(q, g, h), gi);
            if (!EO.contains(c)) return false;
        }
    }
    return true;
}

bool normality_verdict_parallel(const QuadSetup& S, const GroupCensus& O,
                                const GroupCensus& EO) {
    const long q = S.R.modulus;
    std::vector<PackedMat> gens;
    for (const Mat& g : atom_seed_mats(S)) gens.push_back(pack_mat(S, g));
    std::atomic<bool> ok{true};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256)
#endif
    for (size_t i = 0; i < O.elems.size(); ++i) {
        if (!ok.load(std::memory_order_relaxed)) continue;
        const PackedMat& g = O.elems[i];
        PackedMat gi = packed_inverse(S, g);
        for (const PackedMat& h : gens) {
            PackedMat c = packed_mul(q, packed_mul(q, g, h), gi);
            if (!EO.contains(c)) {
                ok.store(false, std::memory_order_relaxed);
                break;
            }
        }
    }
    return ok.load();
}

const PackedMat& CosetSpace::coset_key(const PackedMat& elem) const {
    auto it = coset_of.find(elem);
    if (it == coset_of.end())
        throw std::invalid_argument("element not in ambient census");
    return it->second;
}

CosetSpace coset_space(const QuadSetup& S, const GroupCensus& O,
                       const GroupCensus& EO, bool normal) {
    const long q = S.R.modulus;
    CosetSpace cs;
    cs.is_group = normal;
    cs.coset_of.reserve(O.elems.size() * 2);
    for (const PackedMat& g : O.elems) {
        if (cs.coset_of.count(g)) continue;
        // Walk the whole coset g·EO, key it by its least member.
        std::vector<PackedMat> members;
        members.reserve(EO.elems.size());
        for (const PackedMat& e : EO.elems) members.push_back(packed_mul(q, g, e));
        PackedMat least = members.front();
        for (const PackedMat& m : members)
            if (m < least) least = m;
        for (const PackedMat& m : members) cs.coset_of.emplace(m, least);
        cs.reps.push_back(least);
    }
    std::sort(cs.reps.begin(), cs.reps.end());
    return cs;
}

K1Report k1_stability_check(const QuadSetup& Ssm, const QuadSetup& Sbig,
                            size_t budget) {
    if (!(Ssm.R == Sbig.R) || Ssm.n != Sbig.n || Sbig.m != Ssm.m + 1 ||
        !mat_eq(Ssm.phi, Sbig.phi))
        throw std::invalid_argument("ring mismatch");
    const long q = Sbig.R.modulus;

    GroupCensus Osm = enumerate_orthogonal(Ssm, budget);
    GroupCensus EOsm = enumerate_elementary(Ssm, budget);
    GroupCensus Obig = enumerate_orthogonal(Sbig, budget);
    GroupCensus EObig = enumerate_elementary(Sbig, budget);

    bool norm_sm = normality_verdict_parallel(Ssm, Osm, EOsm);
    bool norm_big = normality_verdict_parallel(Sbig, Obig, EObig);
    CosetSpace small = coset_space(Ssm, Osm, EOsm, norm_sm);
    CosetSpace big = coset_space(Sbig, Obig, EObig, norm_big);

    K1Report rep;
    rep.order_O_small = Osm.size();
    rep.order_EO_small = EOsm.size();
    rep.order_O_big = Obig.size();
    rep.order_EO_big = EObig.size();
    rep.cosets_small = small.size();
    rep.cosets_big = big.size();
    rep.normal_small = norm_sm;
    rep.normal_big = norm_big;

    // Surjectivity: the stabilized small O elements must hit every coset.
    std::unordered_set<PackedMat, PackedMatHash> hit;
    for (const PackedMat& p : Osm.elems) {
        Mat M = unpack_mat(Ssm, p);
        PackedMat sp = pack_mat(Sbig, stabilize_matrix(Ssm, M));
        hit.insert(big.coset_key(sp));  // throws if not in the big census
    }
    rep.surjective = (hit.size() == big.reps.size());

    // Representative independence of coset products (needs normality).
    rep.products_well_defined = norm_big;
    if (norm_big) {
        // Collect members per coset for random re-picks.
        std::unordered_map<PackedMat, std::vector<PackedMat>, PackedMatHash> members;
        for (const auto& [elem, key] : big.coset_of) members[key].push_back(elem);
        Rng rng(20240818);
        for (int t = 0; t < 200 && rep.products_well_defined; ++t) {
            const PackedMat& ka =
                big.reps[static_cast<size_t>(rng.below(big.reps.size()))];
            const PackedMat& kb =
                big.reps[static_cast<size_t>(rng.below(big.reps.size()))];
            const auto& ma = members[ka];
            const auto& mb = members[kb];
            const PackedMat& a1 = ma[static_cast<size_t>(rng.below(ma.size()))];
            const PackedMat& a2 = ma[static_cast<size_t>(rng.below(ma.size()))];
            const PackedMat& b1 = mb[static_cast<size_t>(rng.below(mb.size()))];
            const PackedMat& b2 = mb[static_cast<size_t>(rng.below(mb.size()))];
            if (!(big.coset_key(packed_mul(q, a1, b1)) ==
                  big.coset_key(packed_mul(q, a2, b2))))
                rep.products_well_defined = false;
        }
    }
    return rep;
}

WordCensus elementary_word_census(const QuadSetup& S, size_t budget) {
    require_packable(S);
    const long q = S.R.modulus;
    // Token-tagged atom generators.
    std::vector<std::pair<PTok, PackedMat>> gens;
    std::vector<long> odo(static_cast<size_t>(S.n), 0);
    for (;;) {
        int pos = S.n - 1;
        while (pos >= 0 && ++odo[static_cast<size_t>(pos)] == q)
            odo[static_cast<size_t>(pos)] = 0, --pos;
        if (pos < 0) break;
        Vec w(static_cast<size_t>(S.n));
        for (int i = 0; i < S.n; ++i) w[static_cast<size_t>(i)] = Elem{odo[static_cast<size_t>(i)]};
        for (int i = 1; i <= S.m; ++i) {
            PTok ta = ptok_ea(i, w);
            PTok tb = ptok_eb(i, w);
            gens.emplace_back(ta, pack_mat(S, ptok_eval(S, ta)));
            gens.emplace_back(tb, pack_mat(S, ptok_eval(S, tb)));
        }
    }
    WordCensus census;
    PackedMat I = packed_eye(S.dim());
    WordCensus::Parent root;
    root.root = true;
    census.parent.emplace(I, root);
    std::vector<PackedMat> frontier{I};
    while (!frontier.empty()) {
        std::vector<PackedMat> next;
        for (const PackedMat& M : frontier) {
            for (const auto& [tok, gm] : gens) {
                PackedMat c = packed_mul(q, M, gm);
                if (census.parent.count(c)) continue;
                if (census.parent.size() >= budget)
                    throw BudgetExceeded(census.parent.size());
                WordCensus::Parent par;
                par.prev = M;
                par.gen = tok;
                census.parent.emplace(c, par);
                next.push_back(c);
            }
        }
        frontier.swap(next);
    }
    return census;
}

std::optional<PWord> census_word(const WordCensus& census, const PackedMat& M) {
    auto it = census.parent.find(M);
    if (it == census.parent.end()) return std::nullopt;
    PWord rev;
    PackedMat cur = M;
    while (true) {
        const WordCensus::Parent& par = census.parent.at(cur);
        if (par.root) break;
        rev.push_back(par.gen);
        cur = par.prev;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

}  // namespace dser
