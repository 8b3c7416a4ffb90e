#include "dser/relations.hpp"

#include "json.hpp"

#include <stdexcept>

namespace dser {

namespace {

Vec scale_vec(const Ring& R, const Elem& c, const Vec& w) {
    Vec out;
    out.reserve(w.size());
    for (const Elem& x : w) out.push_back(ring_mul(R, c, x));
    return out;
}

Vec neg_vec(const Ring& R, const Vec& w) {
    Vec out;
    out.reserve(w.size());
    for (const Elem& x : w) out.push_back(ring_neg(R, x));
    return out;
}

void index_check(bool ok) {
    if (!ok) throw std::invalid_argument("index constraint");
}

Vec rand_vec(const Ring& R, int n, Rng& rng) {
    Vec w(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = ring_rand(R, rng);
    return w;
}

}  // namespace

const char* rel_name(RelId id) {
    switch (id) {
        case RelId::I: return "i";
        case RelId::II: return "ii";
        case RelId::III: return "iii";
        case RelId::IV: return "iv";
        case RelId::V: return "v";
        case RelId::PI: return "p-i";
        case RelId::PII: return "p-ii";
        case RelId::PIII: return "p-iii";
        case RelId::PIV: return "p-iv";
        case RelId::PV: return "p-v";
    }
    return "?";
}

std::optional<RelId> rel_parse(const std::string& s) {
    for (RelId id : all_relations())
        if (s == rel_name(id)) return id;
    return std::nullopt;
}

std::vector<RelId> all_relations() {
    return {RelId::I,  RelId::II,  RelId::III,  RelId::IV,  RelId::V,
            RelId::PI, RelId::PII, RelId::PIII, RelId::PIV, RelId::PV};
}

int relation_min_m(RelId id) {
    switch (id) {
        case RelId::I:
        case RelId::II:
        case RelId::PI:
        case RelId::PII:
            return 2;
        default:
            return 3;
    }
}

RelationCase random_relation_case(const QuadSetup& S, RelId id, Rng& rng) {
    const int m = S.m;
    if (m < relation_min_m(id)) throw std::invalid_argument("index constraint");
    RelationCase rc;
    rc.id = id;
    const uint64_t ntags = static_cast<uint64_t>(S.n);
    rc.k = 1 + static_cast<int>(rng.below(ntags));
    rc.l = 1 + static_cast<int>(rng.below(ntags));
    rc.r = 1 + static_cast<int>(rng.below(ntags));
    rc.s = 1 + static_cast<int>(rng.below(ntags));
    auto distinct_pair = [&](int& x, int& y) {
        x = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
        do {
            y = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
        } while (y == x);
    };
    int nparams = 0;
    switch (id) {
        case RelId::I:
        case RelId::II:
            distinct_pair(rc.i, rc.j);
            nparams = 3;
            break;
        case RelId::PI:
        case RelId::PII:
            rc.i = m;
            rc.j = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m - 1)));
            nparams = 3;
            break;
        case RelId::III:
        case RelId::IV:
        case RelId::V: {
            rc.i = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
            do {
                rc.j = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
            } while (rc.j == rc.i);
            do {
                rc.t = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
            } while (rc.t == rc.i || rc.t == rc.j);
            nparams = 4;
            break;
        }
        case RelId::PIII:
        case RelId::PIV:
        case RelId::PV: {
            rc.j = m;
            int x, y;
            x = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m - 1)));
            do {
                y = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m - 1)));
            } while (y == x);
            rc.i = x;
            rc.t = y;
            nparams = 4;
            break;
        }
    }
    for (int p = 0; p < nparams; ++p) rc.params.push_back(rand_vec(S.R, S.n, rng));
    return rc;
}

std::pair<GenWord, GenWord> relation_words(const QuadSetup& S,
                                           const RelationCase& rc) {
    const Ring& R = S.R;
    const int m = S.m;
    auto A = [&](int idx, const Vec& w, int tag) {
        return node_atom(rank_one_atom(S, AtomKind::EA, idx, w, tag));
    };
    auto B = [&](int idx, const Vec& w, int tag) {
        return node_atom(rank_one_atom(S, AtomKind::EBstar, idx, w, tag));
    };
    auto in_range = [&](int idx) { return idx >= 1 && idx <= m; };
    auto maybe_neg = [&](const Vec& v) {
        return rc.corrupt_derived ? neg_vec(R, v) : v;
    };
    const bool pform = rc.id == RelId::PI || rc.id == RelId::PII ||
                       rc.id == RelId::PIII || rc.id == RelId::PIV ||
                       rc.id == RelId::PV;

    switch (rc.id) {
        case RelId::I:
        case RelId::PI: {
            index_check(in_range(rc.i) && in_range(rc.j) && rc.i != rc.j);
            if (rc.id == RelId::PI) index_check(rc.i == m && m >= 2);
            if (rc.params.size() != 3)
                throw std::invalid_argument("parameter count");
            const Vec &wb = rc.params[0], &wa = rc.params[1], &wg = rc.params[2];
            Elem c = pair_value(S, wg, wa);
            Vec eta = maybe_neg(scale_vec(R, ring_neg(R, c), wb));
            Vec nu = scale_vec(R, ring_mul(R, ring_half(R), ring_neg(R, c)), wb);
            Vec zeta = neg_vec(R, wb);
            GenNodePtr outer =
                node_comm(B(rc.i, wb, rc.k), node_comm(A(rc.i, wa, rc.r),
                                                       B(rc.j, wg, rc.l)));
            GenNodePtr inner = node_comm(B(rc.j, nu, rc.k), B(rc.i, zeta, rc.k));
            if (rc.id == RelId::I)
                return {word_of({outer}), word_of({B(rc.j, eta, rc.k), inner})};
            return {word_of({B(rc.j, eta, rc.k)}),
                    word_of({outer, node_inv(inner)})};
        }
        case RelId::II:
        case RelId::PII: {
            index_check(in_range(rc.i) && in_range(rc.j) && rc.i != rc.j);
            if (rc.id == RelId::PII) index_check(rc.i == m && m >= 2);
            if (rc.params.size() != 3)
                throw std::invalid_argument("parameter count");
            const Vec &wb = rc.params[0], &wa = rc.params[1], &wd = rc.params[2];
            Elem c = pair_value(S, wd, wa);
            Vec lam_true = scale_vec(R, ring_neg(R, c), wb);
            Vec xi = scale_vec(R, ring_half(R), lam_true);
            Vec lam = maybe_neg(lam_true);
            Vec zeta = neg_vec(R, wb);
            GenNodePtr outer =
                node_comm(B(rc.i, wb, rc.k), node_comm(A(rc.i, wa, rc.r),
                                                       A(rc.j, wd, rc.l)));
            GenNodePtr inner = node_comm(A(rc.j, xi, rc.k), B(rc.i, zeta, rc.k));
            if (rc.id == RelId::II)
                return {word_of({outer}), word_of({A(rc.j, lam, rc.k), inner})};
            return {word_of({A(rc.j, lam, rc.k)}),
                    word_of({outer, node_inv(inner)})};
        }
        case RelId::III:
        case RelId::PIII: {
            index_check(in_range(rc.i) && in_range(rc.j) && in_range(rc.t) &&
                        rc.i != rc.j && rc.t != rc.i && rc.t != rc.j);
            if (rc.id == RelId::PIII) index_check(rc.j == m && m >= 3);
            if (rc.params.size() != 4)
                throw std::invalid_argument("parameter count");
            const Vec &wb = rc.params[0], &wg = rc.params[1], &wa = rc.params[2],
                      &wmu = rc.params[3];
            GenNodePtr L1 = node_comm(B(rc.i, wb, rc.r), B(rc.j, wg, rc.l));
            GenNodePtr L2 = node_comm(A(rc.j, wa, rc.s), B(rc.t, wmu, rc.k));
            Vec zeta = maybe_neg(
                scale_vec(R, ring_neg(R, pair_value(S, wg, wb)), wmu));
            const Vec& nu = wa;
            return {word_of({node_comm(L1, L2)}),
                    word_of({node_comm(B(rc.i, zeta, rc.l), B(rc.t, nu, rc.s))})};
        }
        case RelId::IV:
        case RelId::PIV: {
            index_check(in_range(rc.i) && in_range(rc.j) && in_range(rc.t) &&
                        rc.i != rc.j && rc.t != rc.i && rc.t != rc.j);
            if (rc.id == RelId::PIV) index_check(rc.j == m && m >= 3);
            if (rc.params.size() != 4)
                throw std::invalid_argument("parameter count");
            const Vec &wa = rc.params[0], &wd = rc.params[1], &wxi = rc.params[2],
                      &wb = rc.params[3];
            GenNodePtr L1 = node_comm(A(rc.i, wa, rc.r), A(rc.j, wd, rc.l));
            GenNodePtr L2 = node_comm(A(rc.t, wxi, rc.k), B(rc.j, wb, rc.s));
            Vec lam = maybe_neg(scale_vec(R, pair_value(S, wd, wa), wb));
            const Vec& eta = wxi;
            return {word_of({node_comm(L1, L2)}),
                    word_of({node_comm(A(rc.i, lam, rc.l), A(rc.t, eta, rc.s))})};
        }
        case RelId::V:
        case RelId::PV: {
            index_check(in_range(rc.i) && in_range(rc.j) && in_range(rc.t) &&
                        rc.i != rc.j && rc.t != rc.i && rc.t != rc.j);
            if (rc.id == RelId::PV) index_check(rc.j == m && m >= 3);
            if (rc.params.size() != 4)
                throw std::invalid_argument("parameter count");
            const Vec &wa = rc.params[0], &wb = rc.params[1], &wd = rc.params[2],
                      &wg = rc.params[3];
            GenNodePtr L1 = node_comm(A(rc.i, wa, rc.r), B(rc.j, wb, rc.l));
            GenNodePtr L2 = node_comm(A(rc.j, wd, rc.s), B(rc.t, wg, rc.k));
            Vec eta = maybe_neg(
                scale_vec(R, ring_neg(R, pair_value(S, wa, wb)), wd));
            const Vec& mu = wg;
            return {word_of({node_comm(L1, L2)}),
                    word_of({node_comm(A(rc.i, eta, rc.l), B(rc.t, mu, rc.s))})};
        }
    }
    (void)pform;
    throw std::logic_error("unreachable relation id");
}

bool relation_holds(const QuadSetup& S, const RelationCase& rc) {
    auto [lhs, rhs] = relation_words(S, rc);
    return mat_eq(eval_word(S, lhs), eval_word(S, rhs));
}

std::string describe_case(const QuadSetup& S, const RelationCase& rc) {
    nlohmann::json j;
    j["relation"] = rel_name(rc.id);
    j["i"] = rc.i;
    j["j"] = rc.j;
    if (rc.t != 0) j["t"] = rc.t;
    j["tags"] = {rc.k, rc.l, rc.r, rc.s};
    nlohmann::json params = nlohmann::json::array();
    for (const Vec& w : rc.params) {
        nlohmann::json row = nlohmann::json::array();
        for (const Elem& x : w) row.push_back(ring_to_string(x));
        params.push_back(row);
    }
    j["params"] = params;
    if (rc.corrupt_derived) j["corrupted"] = true;
    return j.dump();
}

RelationBatch verify_relation(const QuadSetup& S, RelId id, int trials,
                              Rng& rng, bool corrupt) {
    RelationBatch batch;
    batch.id = id;
    for (int t = 0; t < trials; ++t) {
        RelationCase rc = random_relation_case(S, id, rng);
        rc.corrupt_derived = corrupt;
        ++batch.trials;
        if (!relation_holds(S, rc)) {
            ++batch.failures;
            if (batch.first_failure.empty())
                batch.first_failure = describe_case(S, rc);
        }
    }
    return batch;
}

ClosureCheck generator_closure_check(const QuadSetup& S, size_t budget) {
    if (S.m < 1) throw std::invalid_argument("nothing to generate");
    ClosureCheck out;
    std::vector<PackedMat> top = closure_parallel(S, m_subscript_seed_mats(S), budget);
    std::vector<PackedMat> full = closure_parallel(S, atom_seed_mats(S), budget);
    out.top_count = top.size();
    out.full_count = full.size();
    out.equal = (top == full);
    return out;
}

}  // namespace dser
