#include "dser/normalizer.hpp"

namespace dser {

namespace {

Mat mml(const Ring& R, std::initializer_list<Mat> Ms) {
    auto it = Ms.begin();
    Mat out = *it;
    for (++it; it != Ms.end(); ++it) out = mat_mul(R, out, *it);
    return out;
}

GenNodePtr nA(const Mat& M) { return node_atom(general_atom(AtomKind::EA, M)); }
GenNodePtr nB(const Mat& M) {
    return node_atom(general_atom(AtomKind::EBstar, M));
}

struct DisplayCtx {
    const QuadSetup& S;
    Blocks B;
    Mat jt, et, ht, ft, bt, ct;

    explicit DisplayCtx(const QuadSetup& S_, const Mat& T)
        : S(S_), B(split_blocks(S_, T)) {
        jt = mat_transpose(B.j);
        et = mat_transpose(B.e);
        ht = mat_transpose(B.h);
        ft = mat_transpose(B.f);
        bt = mat_transpose(B.b);
        ct = mat_transpose(B.c);
    }

    const Ring& R() const { return S.R; }
    Mat half_of(const Mat& M) const { return mat_scale(R(), ring_half(R()), M); }
    // M^* = phi^-1 M^t, mapping an m x n parameter to n x m.
    Mat star(const Mat& M) const {
        return mat_mul(R(), S.phi_inv, mat_transpose(M));
    }

    GenWord d1(const Mat& alpha) const {
        const Ring& r = R();
        Mat jta = mat_mul(r, jt, alpha);
        return word_of(
            {node_comm(nA(mml(r, {jta, B.b, ct, S.phi})), nA(half_of(jta))),
             node_comm(nA(mat_mul(r, ct, S.phi)), nA(jta)),
             node_comm(nB(mat_mul(r, bt, S.phi)), nA(jta)),
             nA(mat_mul(r, jta, B.a))});
    }

    GenWord d2(const Mat& beta) const {
        const Ring& r = R();
        Mat etb = mat_mul(r, et, beta);
        return word_of(
            {node_comm(nB(mml(r, {etb, B.c, bt, S.phi})), nB(half_of(etb))),
             node_comm(nB(mat_mul(r, bt, S.phi)), nB(etb)),
             node_comm(nA(mat_mul(r, ct, S.phi)), nB(etb)),
             nB(mat_mul(r, etb, B.a))});
    }

    GenWord d3(const Mat& alpha, const Mat& betak) const {
        const Ring& r = R();
        Mat jta = mat_mul(r, jt, alpha);
        Mat sb = star(betak);
        return word_of(
            {node_comm(nA(half_of(jta)),
                       nA(mml(r, {jta, sb, B.f, et, betak}))),
             node_comm(nA(jta), nA(mat_mul(r, ft, betak))),
             node_comm(nA(jta), nB(mat_mul(r, et, betak))),
             nA(mat_neg(r, mml(r, {jta, sb, B.d})))});
    }

    GenWord d4(const Mat& alphai, const Mat& beta) const {
        const Ring& r = R();
        Mat etb = mat_mul(r, et, beta);
        Mat sa = star(alphai);
        return word_of(
            {node_comm(nB(mml(r, {etb, sa, B.j, ht, alphai})),
                       nB(half_of(etb))),
             node_comm(nB(mat_mul(r, ht, alphai)), nB(etb)),
             node_comm(nA(mat_mul(r, jt, alphai)), nB(etb)),
             nB(mml(r, {etb, sa, B.g}))});
    }

    GenWord d5(const Mat& alpha, const Mat& delta) const {
        const Ring& r = R();
        Mat jta = mat_mul(r, jt, alpha);
        Mat jtd = mat_mul(r, jt, delta);
        Mat sd = star(delta);
        return word_of(
            {node_comm(nA(half_of(jta)), nA(mml(r, {jta, sd, B.h, jtd}))),
             node_comm(nA(jta), nB(mat_mul(r, ht, delta))),
             node_comm(nA(jta), nA(jtd)),
             nA(mat_neg(r, mml(r, {jta, sd, B.g})))});
    }

    GenWord d6(const Mat& beta, const Mat& gamma) const {
        const Ring& r = R();
        Mat etb = mat_mul(r, et, beta);
        Mat sg = star(gamma);
        return word_of(
            {node_comm(nB(half_of(etb)),
                       nB(mml(r, {etb, sg, B.e, mat_mul(r, ft, gamma)}))),
             node_comm(nB(etb), nB(mat_mul(r, et, gamma))),
             node_comm(nB(etb), nA(mat_mul(r, ft, gamma))),
             nB(mat_neg(r, mml(r, {etb, sg, B.d})))});
    }
};

Vec basis_e1(const QuadSetup& S) {
    Vec e(static_cast<size_t>(S.n), ring_zero(S.R));
    e[0] = ring_one(S.R);
    return e;
}

Vec scaled_e1(const QuadSetup& S, const Elem& c) {
    Vec e(static_cast<size_t>(S.n), ring_zero(S.R));
    e[0] = c;
    return e;
}

Vec phi_inv_e1(const QuadSetup& S) {
    return mat_vec(S.R, S.phi_inv, basis_e1(S));
}

Vec scale_v(const Ring& R, const Elem& c, const Vec& w) {
    Vec out;
    out.reserve(w.size());
    for (const Elem& x : w) out.push_back(ring_mul(R, c, x));
    return out;
}

Vec neg_v(const Ring& R, const Vec& w) {
    return scale_v(R, ring_neg(R, ring_one(R)), w);
}

Mat r1_param(const QuadSetup& S, AtomKind k, int i, const Vec& w) {
    return rank_one_atom(S, k, i, w).param;
}

// The conjugate of a rank-one atom below the top index, through the
// rewrite of the atom as (display-class factors):
//   E*_k(w) = [E*_m(w), [E_m(e1), E*_k(-phi^-1 e1)]]
//             * ([E*_k(w/2), E*_m(-w)])^-1
//   E_k(w)  = [E*_m(-w), [E_m(e1), E_k(phi^-1 e1)]]
//             * ([E_k(w/2), E*_m(w)])^-1
// and the identity W^-1 [A, B] W = [W^-1 A W, W^-1 B W].
GenWord conj_sub_atom(const DisplayCtx& ctx, AtomKind kind, int k,
                      const Vec& w) {
    const QuadSetup& S = ctx.S;
    const Ring& R = S.R;
    const int m = S.m;
    Vec e1 = basis_e1(S);
    Vec pe1 = phi_inv_e1(S);
    Vec half_w = scale_v(R, ring_half(R), w);
    GenWord outer, inner, tail;
    if (kind == AtomKind::EBstar) {
        outer = ctx.d2(r1_param(S, AtomKind::EBstar, m, w));
        inner = ctx.d3(r1_param(S, AtomKind::EA, m, e1),
                       r1_param(S, AtomKind::EBstar, k, neg_v(R, pe1)));
        // ([E*_k(w/2), E*_m(-w)])^-1 == [E*_m(-w), E*_k(w/2)]
        tail = ctx.d6(r1_param(S, AtomKind::EBstar, m, neg_v(R, w)),
                      r1_param(S, AtomKind::EBstar, k, half_w));
    } else {
        outer = ctx.d2(r1_param(S, AtomKind::EBstar, m, neg_v(R, w)));
        inner = ctx.d5(r1_param(S, AtomKind::EA, m, e1),
                       r1_param(S, AtomKind::EA, k, pe1));
        tail = word_inverse(
            S, ctx.d4(r1_param(S, AtomKind::EA, k, half_w),
                      r1_param(S, AtomKind::EBstar, m, w)));
    }
    GenWord out = outer;
    out = word_concat(out, inner);
    out = word_concat(out, word_inverse(S, outer));
    out = word_concat(out, word_inverse(S, inner));
    out = word_concat(out, tail);
    return out;
}

GenWord conj_token_impl(const DisplayCtx& ctx, const PTok& tok);

// [atom_s, atom_t] with both indices below m: expand the commutator into
// four atom tokens and conjugate each.
GenWord conj_sub_pair(const DisplayCtx& ctx, PKind first, PKind second,
                      int s, int t, const Elem& c) {
    const QuadSetup& S = ctx.S;
    const Ring& R = S.R;
    Vec ce1 = scaled_e1(S, c);
    Vec pe1 = phi_inv_e1(S);
    auto tok_of = [&](PKind k, int idx, const Vec& w) {
        return k == PKind::EA ? ptok_ea(idx, w) : ptok_eb(idx, w);
    };
    GenWord out = conj_token_impl(ctx, tok_of(first, s, ce1));
    out = word_concat(out, conj_token_impl(ctx, tok_of(second, t, pe1)));
    out = word_concat(out, conj_token_impl(ctx, tok_of(first, s, neg_v(R, ce1))));
    out = word_concat(out,
                      conj_token_impl(ctx, tok_of(second, t, neg_v(R, pe1))));
    return out;
}

GenWord conj_token_impl(const DisplayCtx& ctx, const PTok& tok) {
    const QuadSetup& S = ctx.S;
    const Ring& R = S.R;
    const int m = S.m;
    switch (tok.kind) {
        case PKind::EA:
            if (tok.s == m)
                return ctx.d1(r1_param(S, AtomKind::EA, m, tok.w));
            return conj_sub_atom(ctx, AtomKind::EA, tok.s, tok.w);
        case PKind::EB:
            if (tok.s == m)
                return ctx.d2(r1_param(S, AtomKind::EBstar, m, tok.w));
            return conj_sub_atom(ctx, AtomKind::EBstar, tok.s, tok.w);
        case PKind::MIX:
            // MIX(s,t,c) == [E_s(c e1), E*_t(phi^-1 e1)]
            if (tok.s == m)
                return ctx.d3(r1_param(S, AtomKind::EA, m, scaled_e1(S, tok.c)),
                              r1_param(S, AtomKind::EBstar, tok.t,
                                       phi_inv_e1(S)));
            if (tok.t == m)
                return ctx.d4(
                    r1_param(S, AtomKind::EA, tok.s, scaled_e1(S, tok.c)),
                    r1_param(S, AtomKind::EBstar, m, phi_inv_e1(S)));
            return conj_sub_pair(ctx, PKind::EA, PKind::EB, tok.s, tok.t,
                                 tok.c);
        case PKind::UK:
            // UK(s,t,c) == [E_s(c e1), E_t(phi^-1 e1)]; UK(s,t,c)==UK(t,s,-c)
            if (tok.s == m)
                return ctx.d5(r1_param(S, AtomKind::EA, m, scaled_e1(S, tok.c)),
                              r1_param(S, AtomKind::EA, tok.t, phi_inv_e1(S)));
            if (tok.t == m)
                return conj_token_impl(
                    ctx, ptok_uk(m, tok.s, ring_neg(R, tok.c)));
            return conj_sub_pair(ctx, PKind::EA, PKind::EA, tok.s, tok.t,
                                 tok.c);
        case PKind::USK:
            if (tok.s == m)
                return ctx.d6(
                    r1_param(S, AtomKind::EBstar, m, scaled_e1(S, tok.c)),
                    r1_param(S, AtomKind::EBstar, tok.t, phi_inv_e1(S)));
            if (tok.t == m)
                return conj_token_impl(
                    ctx, ptok_usk(m, tok.s, ring_neg(R, tok.c)));
            return conj_sub_pair(ctx, PKind::EB, PKind::EB, tok.s, tok.t,
                                 tok.c);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

const ConjClass all_conj_classes[6] = {
    ConjClass::AMj,        ConjClass::BstarMj,    ConjClass::AMjBstarKl,
    ConjClass::AIjBstarMk, ConjClass::AMkDJl,     ConjClass::BstarMkGJl,
};

const char* conj_class_name(ConjClass c) {
    switch (c) {
        case ConjClass::AMj: return "a_mj";
        case ConjClass::BstarMj: return "bstar_mj";
        case ConjClass::AMjBstarKl: return "a_mj_bstar_kl";
        case ConjClass::AIjBstarMk: return "a_ij_bstar_mk";
        case ConjClass::AMkDJl: return "a_mk_d_jl";
        case ConjClass::BstarMkGJl: return "bstar_mk_g_jl";
    }
    return "?";
}

std::optional<ConjClass> conj_class_parse(const std::string& name) {
    for (ConjClass c : all_conj_classes)
        if (name == conj_class_name(c)) return c;
    return std::nullopt;
}

GenNodePtr make_class_generator(const QuadSetup& S, ConjClass cls, Rng& rng) {
    const int m = S.m;
    auto rvec = [&]() {
        Vec w(static_cast<size_t>(S.n));
        for (Elem& x : w) x = ring_rand(S.R, rng);
        return w;
    };
    auto rtag = [&]() {
        return 1 + static_cast<int>(rng.below(static_cast<uint64_t>(S.n)));
    };
    auto rlow = [&]() {
        if (m < 2) throw std::invalid_argument("hyperbolic rank too small");
        return 1 + static_cast<int>(rng.below(static_cast<uint64_t>(m - 1)));
    };
    switch (cls) {
        case ConjClass::AMj:
            return node_atom(rank_one_atom(S, AtomKind::EA, m, rvec(), rtag()));
        case ConjClass::BstarMj:
            return node_atom(
                rank_one_atom(S, AtomKind::EBstar, m, rvec(), rtag()));
        case ConjClass::AMjBstarKl:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EA, m, rvec(), rtag())),
                node_atom(
                    rank_one_atom(S, AtomKind::EBstar, rlow(), rvec(), rtag())));
        case ConjClass::AIjBstarMk:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EA, rlow(), rvec(), rtag())),
                node_atom(
                    rank_one_atom(S, AtomKind::EBstar, m, rvec(), rtag())));
        case ConjClass::AMkDJl:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EA, m, rvec(), rtag())),
                node_atom(rank_one_atom(S, AtomKind::EA, rlow(), rvec(), rtag())));
        case ConjClass::BstarMkGJl:
            return node_comm(
                node_atom(rank_one_atom(S, AtomKind::EBstar, m, rvec(), rtag())),
                node_atom(
                    rank_one_atom(S, AtomKind::EBstar, rlow(), rvec(), rtag())));
    }
    throw std::logic_error("unreachable");
}

GenWord conjugate_factorization(const QuadSetup& S, const Mat& T,
                                const GenNodePtr& gen) {
    if (!is_stabilized(S, T)) throw std::invalid_argument("not stabilized");
    DisplayCtx ctx(S, T);
    const int m = S.m;
    auto ranked = [](const GenNodePtr& x) {
        return x && x->kind == GenNode::Kind::Atom && x->atom.tag_i > 0;
    };
    if (ranked(gen)) {
        const GenAtom& at = gen->atom;
        if (at.tag_i == m)
            return at.kind == AtomKind::EA ? ctx.d1(at.param)
                                           : ctx.d2(at.param);
    } else if (gen && gen->kind == GenNode::Kind::Comm && ranked(gen->a) &&
               ranked(gen->b)) {
        const GenAtom& x = gen->a->atom;
        const GenAtom& y = gen->b->atom;
        if (x.kind == AtomKind::EA && y.kind == AtomKind::EBstar) {
            if (x.tag_i == m && y.tag_i < m) return ctx.d3(x.param, y.param);
            if (x.tag_i < m && y.tag_i == m) return ctx.d4(x.param, y.param);
        } else if (x.kind == AtomKind::EA && y.kind == AtomKind::EA &&
                   x.tag_i == m && y.tag_i < m) {
            return ctx.d5(x.param, y.param);
        } else if (x.kind == AtomKind::EBstar && y.kind == AtomKind::EBstar &&
                   x.tag_i == m && y.tag_i < m) {
            return ctx.d6(x.param, y.param);
        }
    }
    throw std::invalid_argument("gen not in a recognized class");
}

Mat eval_left(const QuadSetup& S, const PWord& w) {
    Mat out = mat_eye(S.R, S.dim());
    for (const PTok& tk : w) out = mat_mul(S.R, ptok_eval(S, tk), out);
    return out;
}

ReductionTrace reduce_to_smaller(const QuadSetup& S, const Mat& T) {
    const Ring& R = S.R;
    ReductionTrace tr;
    tr.r1 = reduce_corner(S, T).toks;
    Mat T1 = mat_mul(R, T, pword_eval(S, tr.r1));
    tr.r2 = clear_row(S, T1);
    Mat T2 = mat_mul(R, T1, pword_eval(S, tr.r2));
    auto [l3, T3] = clear_col_left(S, T2);
    tr.l3 = l3;
    tr.residual = T3;
    // The dual row and column are forced by the pairing; re-check rather
    // than clear them, and keep the fourth word empty.
    if (!is_stabilized(S, tr.residual))
        throw std::logic_error("dual forcing failed");
    return tr;
}

GenWord conjugate_token(const QuadSetup& S, const Mat& W, const PTok& tok) {
    if (!is_stabilized(S, W)) throw std::invalid_argument("not stabilized");
    DisplayCtx ctx(S, W);
    return conj_token_impl(ctx, tok);
}

WitnessResult normality_witness(const QuadSetup& S, const Mat& eta,
                                const PWord& g) {
    const Ring& R = S.R;
    if (!is_orthogonal(S, eta)) throw std::invalid_argument("not orthogonal");
    WitnessResult out;
    out.trace = reduce_to_smaller(S, eta);

    // eta = L^-1 * W * A^-1 with L = eval_left(l3), A = eval(r1 r2), W the
    // stabilized residual; so eta^-1 g eta = A (W^-1 (L g L^-1) W) A^-1.
    PWord r12 = out.trace.r1;
    r12.insert(r12.end(), out.trace.r2.begin(), out.trace.r2.end());
    PWord wl(out.trace.l3.rbegin(), out.trace.l3.rend());
    PWord x = wl;
    x.insert(x.end(), g.begin(), g.end());
    PWord wl_inv = pword_inv(S, wl);
    x.insert(x.end(), wl_inv.begin(), wl_inv.end());

    DisplayCtx ctx(S, out.trace.residual);
    GenWord mid;
    for (const PTok& tk : x) mid = word_concat(mid, conj_token_impl(ctx, tk));

    GenWord word = pword_lower(S, r12);
    word = word_concat(word, mid);
    word = word_concat(word, pword_lower(S, pword_inv(S, r12)));
    out.word = word;

    Mat expect = mat_mul(
        R, mat_inv(R, eta), mat_mul(R, pword_eval(S, g), eta));
    if (!mat_eq(eval_word(S, out.word), expect))
        throw std::logic_error("witness verification failed");
    return out;
}

}  // namespace dser
