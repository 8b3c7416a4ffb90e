#include "dser/tokens.hpp"

#include <sstream>
#include <stdexcept>

namespace dser {

PTok ptok_ea(int s, const Vec& w) {
    PTok t;
    t.kind = PKind::EA;
    t.s = s;
    t.w = w;
    return t;
}

PTok ptok_eb(int s, const Vec& w) {
    PTok t;
    t.kind = PKind::EB;
    t.s = s;
    t.w = w;
    return t;
}

namespace {

PTok scalar_tok(PKind k, int s, int t, const Elem& c) {
    PTok tok;
    tok.kind = k;
    tok.s = s;
    tok.t = t;
    tok.c = c;
    return tok;
}

}  // namespace

PTok ptok_mix(int s, int t, const Elem& c) { return scalar_tok(PKind::MIX, s, t, c); }
PTok ptok_uk(int s, int t, const Elem& c) { return scalar_tok(PKind::UK, s, t, c); }
PTok ptok_usk(int s, int t, const Elem& c) { return scalar_tok(PKind::USK, s, t, c); }

void ptok_check(const QuadSetup& S, const PTok& tok) {
    auto idx_ok = [&](int i) { return i >= 1 && i <= S.m; };
    switch (tok.kind) {
        case PKind::EA:
        case PKind::EB:
            if (!idx_ok(tok.s)) throw std::invalid_argument("index out of range");
            if (tok.w.size() != static_cast<size_t>(S.n))
                throw std::invalid_argument("parameter vector length must be n");
            return;
        case PKind::MIX:
        case PKind::UK:
        case PKind::USK:
            if (!idx_ok(tok.s) || !idx_ok(tok.t))
                throw std::invalid_argument("index out of range");
            if (tok.s == tok.t)
                throw std::invalid_argument("indices must differ");
            return;
    }
    throw std::logic_error("unreachable");
}

Mat ptok_eval(const QuadSetup& S, const PTok& tok) {
    ptok_check(S, tok);
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    switch (tok.kind) {
        case PKind::EA:
            return eval_atom(S, rank_one_atom(S, AtomKind::EA, tok.s, tok.w));
        case PKind::EB:
            return eval_atom(S, rank_one_atom(S, AtomKind::EBstar, tok.s, tok.w));
        case PKind::MIX: {
            Mat M = mat_eye(R, S.dim());
            M.at(n + tok.s - 1, n + tok.t - 1) = ring_neg(R, tok.c);
            M.at(n + m + tok.t - 1, n + m + tok.s - 1) = tok.c;
            return M;
        }
        case PKind::UK: {
            Mat M = mat_eye(R, S.dim());
            M.at(n + tok.t - 1, n + m + tok.s - 1) = tok.c;
            M.at(n + tok.s - 1, n + m + tok.t - 1) = ring_neg(R, tok.c);
            return M;
        }
        case PKind::USK: {
            Mat M = mat_eye(R, S.dim());
            M.at(n + m + tok.t - 1, n + tok.s - 1) = tok.c;
            M.at(n + m + tok.s - 1, n + tok.t - 1) = ring_neg(R, tok.c);
            return M;
        }
    }
    throw std::logic_error("unreachable");
}

Mat pword_eval(const QuadSetup& S, const PWord& w) {
    Mat acc = mat_eye(S.R, S.dim());
    for (const PTok& tok : w) acc = mat_mul(S.R, acc, ptok_eval(S, tok));
    return acc;
}

PTok ptok_inv(const QuadSetup& S, const PTok& tok) {
    PTok out = tok;
    switch (tok.kind) {
        case PKind::EA:
        case PKind::EB:
            for (Elem& e : out.w) e = ring_neg(S.R, e);
            return out;
        case PKind::MIX:
        case PKind::UK:
        case PKind::USK:
            out.c = ring_neg(S.R, tok.c);
            return out;
    }
    throw std::logic_error("unreachable");
}

PWord pword_inv(const QuadSetup& S, const PWord& w) {
    PWord out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        out.push_back(ptok_inv(S, *it));
    return out;
}

namespace {

Vec basis_e1(const QuadSetup& S) {
    Vec e(static_cast<size_t>(S.n), ring_zero(S.R));
    e[0] = ring_one(S.R);
    return e;
}

Vec phi_inv_e1(const QuadSetup& S) {
    Vec v(static_cast<size_t>(S.n));
    for (int i = 0; i < S.n; ++i) v[i] = S.phi_inv.at(i, 0);
    return v;
}

Vec scaled(const QuadSetup& S, const Elem& c, const Vec& v) {
    Vec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = ring_mul(S.R, c, v[i]);
    return out;
}

}  // namespace

GenNodePtr ptok_lower(const QuadSetup& S, const PTok& tok) {
    ptok_check(S, tok);
    switch (tok.kind) {
        case PKind::EA:
            return node_atom(rank_one_atom(S, AtomKind::EA, tok.s, tok.w));
        case PKind::EB:
            return node_atom(rank_one_atom(S, AtomKind::EBstar, tok.s, tok.w));
        case PKind::MIX:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EA, tok.s,
                                        scaled(S, tok.c, basis_e1(S)))),
                node_atom(rank_one_atom(S, AtomKind::EBstar, tok.t, phi_inv_e1(S))));
        case PKind::UK:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EA, tok.s,
                                        scaled(S, tok.c, basis_e1(S)))),
                node_atom(rank_one_atom(S, AtomKind::EA, tok.t, phi_inv_e1(S))));
        case PKind::USK:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EBstar, tok.s,
                                        scaled(S, tok.c, basis_e1(S)))),
                node_atom(rank_one_atom(S, AtomKind::EBstar, tok.t, phi_inv_e1(S))));
    }
    throw std::logic_error("unreachable");
}

GenWord pword_lower(const QuadSetup& S, const PWord& w) {
    GenWord out;
    out.toks.reserve(w.size());
    for (const PTok& tok : w) out.toks.push_back(ptok_lower(S, tok));
    return out;
}

PWord pword_stabilize(const PWord& w) { return w; }

PWord random_eo_pword(const QuadSetup& S, Rng& rng, int len) {
    PWord w;
    w.reserve(static_cast<size_t>(len));
    for (int k = 0; k < len; ++k) {
        int s = static_cast<int>(rng.range(1, S.m));
        Vec v(static_cast<size_t>(S.n));
        for (Elem& e : v) e = ring_rand(S.R, rng);
        w.push_back(rng.coin() ? ptok_ea(s, v) : ptok_eb(s, v));
    }
    return w;
}

Mat random_orthogonal(const QuadSetup& S, Rng& rng, int len, bool spice) {
    Mat T = pword_eval(S, random_eo_pword(S, rng, len));
    if (spice) {
        if (rng.coin()) {
            int idx = static_cast<int>(rng.range(1, S.m));
            T = mat_mul(S.R, T, hyperbolic_scale(S, idx, ring_rand_unit(S.R, rng)));
        }
        if (rng.range(0, 2) == 0)
            T = mat_mul(S.R, hyperbolic_swap(S), T);
    }
    if (!is_orthogonal(S, T)) throw std::logic_error("random sample not orthogonal");
    return T;
}

std::string ptok_describe(const PTok& tok) {
    std::ostringstream os;
    switch (tok.kind) {
        case PKind::EA: os << "EA(" << tok.s; break;
        case PKind::EB: os << "EB(" << tok.s; break;
        case PKind::MIX: os << "MIX(" << tok.s << "," << tok.t; break;
        case PKind::UK: os << "UK(" << tok.s << "," << tok.t; break;
        case PKind::USK: os << "USK(" << tok.s << "," << tok.t; break;
    }
    if (tok.kind == PKind::EA || tok.kind == PKind::EB) {
        os << "; [";
        for (size_t i = 0; i < tok.w.size(); ++i) {
            if (i) os << " ";
            os << ring_to_string(tok.w[i]);
        }
        os << "])";
    } else {
        os << "; " << ring_to_string(tok.c) << ")";
    }
    return os.str();
}

}  // namespace dser
