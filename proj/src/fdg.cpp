#include "dser/fdg.hpp"

#include <deque>
#include <map>
#include <sstream>

namespace dser {

namespace {

Vec scale_vec(const Ring& R, const Elem& c, const Vec& w) {
    Vec out;
    out.reserve(w.size());
    for (const Elem& x : w) out.push_back(ring_mul(R, c, x));
    return out;
}

bool vec_is_zero(const Vec& v) {
    for (const Elem& x : v)
        if (!ring_is_zero(x)) return false;
    return true;
}

struct RowSplit {
    Vec u, v, w;
};

RowSplit split_row(const QuadSetup& S, const Vec& row) {
    RowSplit out;
    out.u.assign(row.begin(), row.begin() + S.n);
    out.v.assign(row.begin() + S.n, row.begin() + S.n + S.m);
    out.w.assign(row.begin() + S.n + S.m, row.end());
    return out;
}

// Scalar menus for bounded searches.
std::vector<Elem> scalar_menu(const Ring& R) {
    std::vector<Elem> out;
    if (R.finite()) {
        for (long k = 1; k < R.modulus; ++k) out.push_back(residue_at(R, k));
    } else {
        out = {ring_from_long(R, 1), ring_from_long(R, -1),
               ring_from_long(R, 2)};
    }
    return out;
}

// Solve s * a == b; nullopt when no solution exists.
std::optional<Elem> solve_scal(const Ring& R, const Elem& a, const Elem& b) {
    if (!R.finite()) {
        if (ring_is_zero(a))
            return ring_is_zero(b) ? std::optional<Elem>(ring_from_long(R, 0))
                                   : std::nullopt;
        return ring_mul(R, b, ring_inv(R, a));
    }
    for (long s = 0; s < R.modulus; ++s) {
        Elem se = residue_at(R, s);
        if (ring_eq(ring_mul(R, se, a), b)) return se;
    }
    return std::nullopt;
}

std::vector<long> encode_row(const Vec& row) {
    std::vector<long> out;
    out.reserve(row.size());
    for (const Elem& x : row) out.push_back(std::get<long>(x));
    return out;
}

// Bounded breadth-first search on the row itself; finite rings only.
std::optional<PWord> bfs_corner_row(const QuadSetup& S, const Vec& row,
                                    size_t maxn) {
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    std::vector<std::pair<PTok, Mat>> moves;
    for (int i = 1; i < m; ++i) {
        for (long c = 1; c < R.modulus; ++c) {
            Elem ce = residue_at(R, c);
            moves.emplace_back(ptok_mix(i, m, ce), Mat{});
            moves.emplace_back(ptok_mix(m, i, ce), Mat{});
            moves.emplace_back(ptok_usk(i, m, ce), Mat{});
        }
    }
    {
        std::vector<long> odo(static_cast<size_t>(n), 0);
        for (;;) {
            int pos = n - 1;
            while (pos >= 0 && ++odo[static_cast<size_t>(pos)] == R.modulus)
                odo[static_cast<size_t>(pos)] = 0, --pos;
            if (pos < 0) break;
            Vec w(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i)
                w[static_cast<size_t>(i)] = Elem{odo[static_cast<size_t>(i)]};
            for (int idx = 1; idx <= m; ++idx)
                moves.emplace_back(ptok_eb(idx, w), Mat{});
        }
    }
    for (auto& [tok, mat] : moves) mat = ptok_eval(S, tok);

    using Key = std::vector<long>;
    std::map<Key, std::pair<Key, PTok>> parent;
    Key start = encode_row(row);
    parent.emplace(start, std::make_pair(Key{}, PTok{}));
    std::deque<Key> dq{start};
    size_t cnt = 0;
    const size_t corner = static_cast<size_t>(n + m - 1);
    while (!dq.empty() && cnt < maxn) {
        Key st = dq.front();
        dq.pop_front();
        ++cnt;
        if (st[corner] == 1) {
            PWord seq;
            Key cur = st;
            while (!(cur == start)) {
                auto& [prev, tok] = parent.at(cur);
                seq.push_back(tok);
                cur = prev;
            }
            std::reverse(seq.begin(), seq.end());
            return seq;
        }
        Vec stv(st.size());
        for (size_t i = 0; i < st.size(); ++i) stv[i] = Elem{st[i]};
        for (const auto& [tok, g] : moves) {
            Key next = encode_row(vec_mat(R, stv, g));
            if (parent.emplace(next, std::make_pair(st, tok)).second)
                dq.push_back(next);
        }
    }
    return std::nullopt;
}

}  // namespace

const char* tag_name(WordTag t) {
    switch (t) {
        case WordTag::C: return "C";
        case WordTag::D: return "D";
        case WordTag::G: return "G";
        case WordTag::F: return "F";
    }
    return "?";
}

GenWord TaggedWord::lowered(const QuadSetup& S) const {
    return pword_lower(S, toks);
}

bool tag_sound(const QuadSetup& S, const TaggedWord& tw) {
    const int m = S.m;
    auto below_m = [m](const PTok& t) {
        switch (t.kind) {
            case PKind::EA:
            case PKind::EB:
                return t.s < m;
            default:
                return t.s < m && t.t < m;
        }
    };
    auto c_tok = [m](const PTok& t) {
        switch (t.kind) {
            case PKind::EB: return t.s == m;
            case PKind::MIX:
            case PKind::USK: return t.s < m && t.t == m;
            default: return false;
        }
    };
    switch (tw.tag) {
        case WordTag::G:
            for (const PTok& t : tw.toks)
                if (t.kind == PKind::EA || t.kind == PKind::UK) return false;
            return true;
        case WordTag::D:
            for (const PTok& t : tw.toks) {
                switch (t.kind) {
                    case PKind::EA:
                        if (t.s != m) return false;
                        break;
                    case PKind::MIX:
                    case PKind::UK:
                        if (t.s != m || t.t >= m) return false;
                        break;
                    default:
                        return false;
                }
            }
            return true;
        case WordTag::C:
            for (const PTok& t : tw.toks)
                if (!c_tok(t)) return false;
            return true;
        case WordTag::F: {
            if (tw.f_prefix > tw.toks.size()) return false;
            for (size_t i = 0; i < tw.toks.size(); ++i) {
                const PTok& t = tw.toks[i];
                if (i < tw.f_prefix) {
                    if (!below_m(t)) return false;
                } else {
                    if (!c_tok(t)) return false;
                }
            }
            return true;
        }
    }
    return false;
}

int stable_rank_bound(const Ring&) {
    // Finite modular rings are semilocal and the rationals are a field;
    // both carry witnesses at rank one.
    return 1;
}

PWord reduce_corner_row(const QuadSetup& S, const Vec& row0, size_t maxbfs) {
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    if (m <= stable_rank_bound(R))
        throw std::invalid_argument("hyperbolic rank too small");
    if (row0.size() != static_cast<size_t>(S.dim()))
        throw std::invalid_argument("size mismatch");

    PWord word;
    Vec cur = row0;
    auto apply = [&](const PWord& toks) {
        for (const PTok& tk : toks) {
            cur = vec_mat(R, cur, ptok_eval(S, tk));
            word.push_back(tk);
        }
    };
    auto corner = [&]() { return cur[static_cast<size_t>(n + m - 1)]; };
    auto corner_is_one = [&]() { return ring_eq(corner(), ring_one(R)); };
    const Elem one = ring_one(R);

    if (corner_is_one()) return word;

    // --- quick single-move solves ---
    {
        RowSplit rs = split_row(S, cur);
        Elem target = ring_sub(R, one, rs.v[static_cast<size_t>(m - 1)]);
        for (int i = 1; i < m; ++i) {
            if (auto s = solve_scal(R, rs.v[static_cast<size_t>(i - 1)], target)) {
                apply({ptok_mix(i, m, ring_neg(R, *s))});
                if (!corner_is_one())
                    throw std::logic_error("corner move failed");
                return word;
            }
        }
        for (int i = 1; i < m; ++i) {
            if (auto s = solve_scal(R, rs.w[static_cast<size_t>(i - 1)], target)) {
                apply({ptok_usk(i, m, ring_neg(R, *s))});
                if (!corner_is_one())
                    throw std::logic_error("corner move failed");
                return word;
            }
        }
        // EBstar at m, linear in s when the quadratic term vanishes.
        for (int k = 0; k < n; ++k) {
            const Elem& uk = rs.u[static_cast<size_t>(k)];
            if (ring_is_zero(uk) || !ring_is_unit(R, uk)) continue;
            Vec y(static_cast<size_t>(n), ring_zero(R));
            y[static_cast<size_t>(k)] = one;
            Elem qy = ring_mul(R, ring_half(R), pair_value(S, y, y));
            if (!ring_is_zero(
                    ring_mul(R, qy, rs.w[static_cast<size_t>(m - 1)])))
                continue;
            Elem s = ring_neg(R, ring_mul(R, ring_inv(R, uk), target));
            apply({ptok_eb(m, scale_vec(R, s, y))});
            if (!corner_is_one()) throw std::logic_error("corner move failed");
            return word;
        }
    }

    // --- structured route: clear u, make v unimodular, row-reduce v ---
    RowSplit rs = split_row(S, cur);
    int kunit = -1;
    for (int k = 0; k < m; ++k)
        if (ring_is_unit(R, rs.w[static_cast<size_t>(k)])) {
            kunit = k;
            break;
        }
    bool structured_done = false;
    if (kunit >= 0) {
        if (!vec_is_zero(rs.u)) {
            Elem ik = ring_inv(R, rs.w[static_cast<size_t>(kunit)]);
            Vec bvec;
            bvec.reserve(rs.u.size());
            for (const Elem& x : rs.u)
                bvec.push_back(ring_neg(R, ring_mul(R, ik, x)));
            apply({ptok_eb(kunit + 1, mat_vec(R, S.phi_inv, bvec))});
            rs = split_row(S, cur);
            if (!vec_is_zero(rs.u))
                throw std::logic_error("Q-part clear failed");
        }
        // Alternating USK candidates until the P part is unimodular.
        if (!is_unimodular(R, rs.v)) {
            std::vector<PTok> cands;
            for (int i = 1; i < m; ++i)
                for (const Elem& c : scalar_menu(R))
                    cands.push_back(ptok_usk(i, m, c));
            for (int i = 1; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    for (const Elem& c : scalar_menu(R))
                        cands.push_back(ptok_usk(i, j, c));
            for (const PTok& cand : cands) {
                Vec probe = vec_mat(R, cur, ptok_eval(S, cand));
                RowSplit ps = split_row(S, probe);
                if (is_unimodular(R, ps.v)) {
                    apply({cand});
                    rs = ps;
                    break;
                }
            }
        }
        if (is_unimodular(R, rs.v)) {
            PWord mix;
            for (const ERecord& rec : elementary_row_reduce(R, rs.v))
                mix.push_back(ptok_mix(rec.row, rec.col, ring_neg(R, rec.scalar)));
            apply(mix);
            if (!corner_is_one())
                throw std::logic_error("elementary reduction failed");
            structured_done = true;
        }
    } else {
        // No unit in the P* part: grid-search an EBstar parameter at m.
        RowSplit gs = split_row(S, cur);
        Elem target = ring_sub(R, one, gs.v[static_cast<size_t>(m - 1)]);
        std::vector<Vec> cands;
        if (R.finite()) {
            std::vector<long> odo(static_cast<size_t>(n), 0);
            cands.push_back(Vec(static_cast<size_t>(n), ring_zero(R)));
            while (cands.size() < 2000) {
                int pos = n - 1;
                while (pos >= 0 && ++odo[static_cast<size_t>(pos)] == R.modulus)
                    odo[static_cast<size_t>(pos)] = 0, --pos;
                if (pos < 0) break;
                Vec w(static_cast<size_t>(n));
                for (int i = 0; i < n; ++i)
                    w[static_cast<size_t>(i)] = Elem{odo[static_cast<size_t>(i)]};
                cands.push_back(w);
            }
        } else {
            std::vector<Elem> base{ring_from_long(R, 0), ring_from_long(R, 1),
                                   ring_from_long(R, -1), ring_from_long(R, 2),
                                   ring_from_long(R, -2),
                                   ring_parse(R, "1/2")};
            std::vector<Vec> acc{{}};
            for (int i = 0; i < n; ++i) {
                std::vector<Vec> next;
                for (const Vec& pre : acc)
                    for (const Elem& b : base) {
                        Vec v = pre;
                        v.push_back(b);
                        next.push_back(v);
                        if (next.size() >= 200) break;
                    }
                acc = next;
            }
            cands = acc;
        }
        for (const Vec& wb : cands) {
            Elem dot = ring_zero(R);
            for (int k = 0; k < n; ++k)
                dot = ring_add(R, dot,
                               ring_mul(R, gs.u[static_cast<size_t>(k)],
                                        wb[static_cast<size_t>(k)]));
            Elem q = ring_mul(R, ring_half(R), pair_value(S, wb, wb));
            Elem delta = ring_sub(
                R, ring_neg(R, dot),
                ring_mul(R, q, gs.w[static_cast<size_t>(m - 1)]));
            if (ring_eq(delta, target)) {
                apply({ptok_eb(m, wb)});
                structured_done = corner_is_one();
                break;
            }
        }
    }
    if (structured_done) return word;

    // --- two-move fix for a row supported on the corner slot alone ---
    {
        RowSplit ts = split_row(S, cur);
        bool corner_only = vec_is_zero(ts.u) && vec_is_zero(ts.w);
        for (int i = 0; i + 1 < m && corner_only; ++i)
            corner_only = ring_is_zero(ts.v[static_cast<size_t>(i)]);
        const Elem& c = ts.v[static_cast<size_t>(m - 1)];
        if (corner_only && ring_is_unit(R, c)) {
            // MIX(m,1,1) seeds slot 1 with -c, then one MIX(1,m,*) solve.
            apply({ptok_mix(m, 1, one)});
            Elem s = ring_mul(R, ring_sub(R, one, c),
                              ring_inv(R, ring_neg(R, c)));
            apply({ptok_mix(1, m, ring_neg(R, s))});
            if (!corner_is_one()) throw std::logic_error("corner move failed");
            return word;
        }
    }

    // --- bounded breadth-first fallback (finite rings) ---
    if (R.finite()) {
        if (auto seq = bfs_corner_row(S, cur, maxbfs)) {
            apply(*seq);
            if (!corner_is_one())
                throw std::logic_error("breadth-first route failed");
            return word;
        }
    }
    throw std::runtime_error("corner reduction exhausted");
}

TaggedWord reduce_corner(const QuadSetup& S, const Mat& T, size_t maxbfs) {
    if (!is_orthogonal(S, T)) throw std::invalid_argument("not orthogonal");
    const int n = S.n, m = S.m;
    Vec row(static_cast<size_t>(S.dim()));
    for (int j = 0; j < S.dim(); ++j)
        row[static_cast<size_t>(j)] = T.at(n + m - 1, j);
    TaggedWord out;
    out.tag = WordTag::G;
    out.toks = reduce_corner_row(S, row, maxbfs);
    Mat prod = mat_mul(S.R, T, pword_eval(S, out.toks));
    if (!ring_eq(prod.at(n + m - 1, n + m - 1), ring_one(S.R)))
        throw std::logic_error("corner reduction postcondition failed");
    return out;
}

PWord clear_row(const QuadSetup& S, const Mat& T) {
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    PWord word;
    Mat cur = T;
    auto apply = [&](const PTok& tk) {
        cur = mat_mul(R, cur, ptok_eval(S, tk));
        word.push_back(tk);
    };
    auto bottom = [&]() {
        Vec row(static_cast<size_t>(S.dim()));
        for (int j = 0; j < S.dim(); ++j)
            row[static_cast<size_t>(j)] = cur.at(n + m - 1, j);
        return split_row(S, row);
    };
    RowSplit rs = bottom();
    if (!ring_eq(rs.v[static_cast<size_t>(m - 1)], ring_one(R)))
        throw std::invalid_argument("need corner 1");
    if (!vec_is_zero(rs.u)) {
        Vec neg_u;
        neg_u.reserve(rs.u.size());
        for (const Elem& x : rs.u) neg_u.push_back(ring_neg(R, x));
        apply(ptok_ea(m, mat_vec(R, S.phi_inv, neg_u)));
        rs = bottom();
        if (!vec_is_zero(rs.u)) throw std::logic_error("Q-part clear failed");
    }
    for (int i = 1; i < m; ++i) {
        rs = bottom();
        const Elem& vi = rs.v[static_cast<size_t>(i - 1)];
        if (!ring_is_zero(vi)) apply(ptok_mix(m, i, vi));
    }
    for (int i = 1; i < m; ++i) {
        rs = bottom();
        const Elem& wi = rs.w[static_cast<size_t>(i - 1)];
        if (!ring_is_zero(wi)) apply(ptok_uk(m, i, wi));
    }
    rs = bottom();
    bool clean = vec_is_zero(rs.u) &&
                 ring_eq(rs.v[static_cast<size_t>(m - 1)], ring_one(R));
    for (int i = 0; i + 1 < m && clean; ++i)
        clean = ring_is_zero(rs.v[static_cast<size_t>(i)]);
    for (int i = 0; i + 1 < m && clean; ++i)
        clean = ring_is_zero(rs.w[static_cast<size_t>(i)]);
    if (!clean) throw std::logic_error("row clearing failed");
    // The last P* slot is forced to zero by the row's self-pairing.
    if (!ring_is_zero(rs.w[static_cast<size_t>(m - 1)]))
        throw std::logic_error("self-pairing slot not forced to zero");
    return word;
}

std::pair<PWord, Mat> clear_col_right(const QuadSetup& S, const Mat& T) {
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    Mat Ti = block_inverse(S, T);
    Vec kappa(static_cast<size_t>(S.dim()));
    for (int i = 0; i < S.dim(); ++i)
        kappa[static_cast<size_t>(i)] = Ti.at(i, n + m - 1);
    if (!ring_eq(kappa[static_cast<size_t>(n + m - 1)], ring_one(R)))
        throw std::invalid_argument("need corner 1");
    PWord word;
    for (int i = 1; i < m; ++i) {
        Elem d = ring_neg(R, kappa[static_cast<size_t>(n + m + i - 1)]);
        if (!ring_is_zero(d)) word.push_back(ptok_usk(i, m, d));
    }
    for (int i = 1; i < m; ++i) {
        Elem c = ring_neg(R, kappa[static_cast<size_t>(n + i - 1)]);
        if (!ring_is_zero(c)) word.push_back(ptok_mix(i, m, c));
    }
    {
        Vec wb;
        wb.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            wb.push_back(ring_neg(R, kappa[static_cast<size_t>(i)]));
        if (!vec_is_zero(wb)) word.push_back(ptok_eb(m, wb));
    }
    Mat C = pword_eval(S, word);
    for (int i = 0; i < S.dim(); ++i)
        if (!ring_eq(C.at(i, n + m - 1), kappa[static_cast<size_t>(i)]))
            throw std::logic_error("column reconstruction mismatch");
    return {word, mat_mul(R, T, C)};
}

std::pair<PWord, Mat> clear_col_left(const QuadSetup& S, const Mat& T) {
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    PWord word;
    Mat cur = T;
    auto col_at = [&](int i) { return cur.at(i, n + m - 1); };
    auto try_tok = [&](auto make, int slot) {
        for (int sign : {1, -1}) {
            PTok tk = make(sign);
            Mat cand = mat_mul(R, ptok_eval(S, tk), cur);
            if (ring_is_zero(cand.at(slot, n + m - 1))) {
                cur = cand;
                word.push_back(tk);
                return true;
            }
        }
        return false;
    };
    if (!ring_eq(col_at(n + m - 1), ring_one(R)))
        throw std::invalid_argument("need corner 1");
    {
        Vec p(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = col_at(i);
        if (!vec_is_zero(p)) {
            bool ok = try_tok(
                [&](int sign) {
                    return ptok_eb(m,
                                   scale_vec(R, ring_from_long(R, sign), p));
                },
                0);
            for (int i = 0; i < n && ok; ++i) ok = ring_is_zero(col_at(i));
            if (!ok) throw std::logic_error("left Q-part clear failed");
        }
    }
    for (int i = 1; i < m; ++i) {
        Elem q = col_at(n + i - 1);
        if (!ring_is_zero(q)) {
            if (!try_tok(
                    [&](int sign) {
                        return ptok_mix(i, m,
                                        ring_mul(R, ring_from_long(R, sign), q));
                    },
                    n + i - 1))
                throw std::logic_error("left P-part clear failed");
        }
    }
    for (int i = 1; i < m; ++i) {
        Elem r = col_at(n + m + i - 1);
        if (!ring_is_zero(r)) {
            if (!try_tok(
                    [&](int sign) {
                        return ptok_usk(i, m,
                                        ring_mul(R, ring_from_long(R, sign), r));
                    },
                    n + m + i - 1))
                throw std::logic_error("left dual clear failed");
        }
    }
    for (int i = 0; i < S.dim(); ++i) {
        Elem want = (i == n + m - 1) ? ring_one(R) : ring_zero(R);
        if (!ring_eq(col_at(i), want))
            throw std::logic_error("left column clear incomplete");
    }
    return {word, cur};
}

bool is_D_shape(const QuadSetup& S, const Mat& X) {
    const int n = S.n, m = S.m, d = S.dim();
    if (X.rows != d || X.cols != d) return false;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == n + m - 1 || j == n + 2 * m - 1) continue;
            Elem want = (i == j) ? ring_one(S.R) : ring_zero(S.R);
            if (!ring_eq(X.at(i, j), want)) return false;
        }
    return true;
}

bool is_C_shape(const QuadSetup& S, const Mat& X) {
    const int n = S.n, m = S.m, d = S.dim();
    if (X.rows != d || X.cols != d) return false;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == n + 2 * m - 1 || j == n + m - 1) continue;
            Elem want = (i == j) ? ring_one(S.R) : ring_zero(S.R);
            if (!ring_eq(X.at(i, j), want)) return false;
        }
    return true;
}

PWord d_word_of(const QuadSetup& S, const Mat& X) {
    if (!is_D_shape(S, X)) throw std::invalid_argument("not a D-shaped element");
    PWord d = clear_row(S, X);
    Mat res = mat_mul(S.R, X, pword_eval(S, d));
    if (!mat_is_identity(S.R, res))
        throw std::logic_error("D extraction residual not identity");
    return pword_inv(S, d);
}

PWord c_word_of(const QuadSetup& S, const Mat& X) {
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    if (!is_C_shape(S, X)) throw std::invalid_argument("not a C-shaped element");
    if (!ring_eq(X.at(n + m - 1, n + m - 1), ring_one(R)))
        throw std::invalid_argument("need corner 1");
    PWord word;
    for (int i = 1; i < m; ++i) {
        Elem d = ring_neg(R, X.at(n + m + i - 1, n + m - 1));
        if (!ring_is_zero(d)) word.push_back(ptok_usk(i, m, d));
    }
    for (int i = 1; i < m; ++i) {
        Elem c = ring_neg(R, X.at(n + i - 1, n + m - 1));
        if (!ring_is_zero(c)) word.push_back(ptok_mix(i, m, c));
    }
    {
        Vec wb;
        wb.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            wb.push_back(ring_neg(R, X.at(i, n + m - 1)));
        if (!vec_is_zero(wb)) word.push_back(ptok_eb(m, wb));
    }
    if (!mat_eq(pword_eval(S, word), X))
        throw std::logic_error("C extraction mismatch");
    return word;
}

PWord conj_c_word(const QuadSetup& S, const Mat& W, const PWord& cword) {
    if (!is_stabilized(S, W)) throw std::invalid_argument("not stabilized");
    Mat Wi = mat_inv(S.R, W);
    PWord out;
    for (const PTok& tok : cword) {
        Mat M = mat_mul(S.R, Wi, mat_mul(S.R, ptok_eval(S, tok), W));
        PWord piece = c_word_of(S, M);
        out.insert(out.end(), piece.begin(), piece.end());
    }
    return out;
}

FdgBase fdg_base(const QuadSetup& S, const Mat& T) {
    const Ring& R = S.R;
    FdgBase out;
    out.g = reduce_corner(S, T).toks;
    Mat T1 = mat_mul(R, T, pword_eval(S, out.g));
    out.d = clear_row(S, T1);
    Mat T2 = mat_mul(R, T1, pword_eval(S, out.d));
    auto [cw, T3] = clear_col_right(S, T2);
    out.c = cw;
    out.residual = T3;
    if (!is_stabilized(S, out.residual))
        throw std::logic_error("residual not stabilized");
    return out;
}

FdgContext make_fdg_context(const QuadSetup& S, size_t budget) {
    if (S.m < stable_rank_bound(S.R) + 2)
        throw std::invalid_argument("hyperbolic rank too small");
    QuadSetup small(S.R, S.n, S.m - 1, S.phi);
    WordCensus census = elementary_word_census(small, budget);
    return FdgContext{S, small, std::move(census)};
}

namespace {

// Word retrieval for a stabilized big-setup matrix through the small census.
PWord small_word_or_throw(const FdgContext& ctx, const Mat& stab) {
    Mat small = compress_matrix(ctx.big, stab);
    auto w = census_word(ctx.census, pack_mat(ctx.small, small));
    if (!w)
        throw std::runtime_error("residual not in the small elementary census");
    return *w;
}

}  // namespace

FdgTriple fdg_decompose(FdgContext& ctx, const GenWord& theta) {
    const QuadSetup& S = ctx.big;
    const Ring& R = S.R;
    const int n = S.n, m = S.m;
    Mat T = eval_word(S, theta);

    FdgTriple out;
    out.eta.tag = WordTag::F;
    out.xi.tag = WordTag::D;
    out.mu.tag = WordTag::G;

    auto reduced_entry_zero = [&](const Mat& E) {
        return ring_is_zero(E.at(n + m - 2, n + m - 1));
    };

    if (mat_is_identity(R, T)) {
        out.reduced = true;
        return out;
    }
    // A single EBstar atom at index m is already a C-word, hence F-tagged.
    if (theta.toks.size() == 1 &&
        theta.toks[0]->kind == GenNode::Kind::Atom &&
        theta.toks[0]->atom.kind == AtomKind::EBstar &&
        theta.toks[0]->atom.tag_i == m && theta.toks[0]->atom.tag_w) {
        out.eta.toks = {ptok_eb(m, *theta.toks[0]->atom.tag_w)};
        out.eta.f_prefix = 0;
        out.reduced = reduced_entry_zero(pword_eval(S, out.eta.toks));
        return out;
    }

    FdgBase base = fdg_base(S, T);
    const PWord& g1 = base.g;
    const PWord& dw = base.d;
    const PWord& cw = base.c;
    const Mat& s3 = base.residual;

    Mat Cm = pword_eval(S, cw);
    Mat eta = mat_mul(R, s3, mat_inv(R, Cm));
    Mat Xi = mat_inv(R, pword_eval(S, dw));
    if (!is_D_shape(S, Xi)) throw std::logic_error("xi lost the D shape");
    if (!is_C_shape(S, pword_eval(S, pword_inv(S, cw))))
        throw std::logic_error("c-part lost the C shape");

    // t1: small-setup corner reduction on the compressed (n+m-1)-th row.
    Vec rv(static_cast<size_t>(S.dim()));
    for (int j = 0; j < S.dim(); ++j)
        rv[static_cast<size_t>(j)] = eta.at(n + m - 2, j);
    Vec small_row;
    for (int j = 0; j < n + m - 1; ++j) small_row.push_back(rv[static_cast<size_t>(j)]);
    for (int j = n + m; j < n + 2 * m - 1; ++j)
        small_row.push_back(rv[static_cast<size_t>(j)]);
    PWord t1 = reduce_corner_row(ctx.small, small_row);
    Mat T1 = pword_eval(S, t1);
    Mat eta1 = mat_mul(R, eta, T1);
    if (!ring_eq(eta1.at(n + m - 2, n + m - 2), ring_one(R)))
        throw std::logic_error("small corner reduction failed");
    Mat Xi1 = mat_mul(R, mat_mul(R, mat_inv(R, T1), Xi), T1);
    if (!is_D_shape(S, Xi1))
        throw std::logic_error("conjugated xi lost the D shape");

    // Clear the (n+m-1, n+m) entry of eta1.
    Elem tau1 = eta1.at(n + m - 2, n + m - 1);
    PWord work;
    if (!ring_is_zero(tau1)) work.push_back(ptok_mix(m - 1, m, tau1));
    Mat M2 = pword_eval(S, work);
    Mat eta2 = mat_mul(R, eta1, M2);
    if (!ring_is_zero(eta2.at(n + m - 2, n + m - 1)))
        throw std::logic_error("entry clearing failed");

    // Clear the (n+m, n+m-1) entry of the conjugated D part.
    Elem beta = Xi1.at(n + m - 1, n + m - 2);
    PWord mu3;
    if (!ring_is_zero(beta)) mu3.push_back(ptok_mix(m, m - 1, beta));
    Mat M3 = pword_eval(S, mu3);
    Mat Wpre = mat_mul(R, Xi1, M3);
    if (!ring_is_zero(Wpre.at(n + m - 1, n + m - 2)))
        throw std::logic_error("dual entry clearing failed");

    // Middle element and its split into a D part and a stabilized part.
    Mat W = mat_mul(R, mat_mul(R, mat_inv(R, M2), Wpre), M2);
    for (int i = 0; i < S.dim(); ++i) {
        Elem want = (i == n + m - 1) ? ring_one(R) : ring_zero(R);
        if (!ring_eq(W.at(i, n + m - 1), want))
            throw std::logic_error("middle element lost its unit column");
    }
    PWord d2 = clear_row(S, W);
    Mat s2 = mat_mul(R, W, pword_eval(S, d2));
    if (!is_stabilized(S, s2))
        throw std::logic_error("middle split not stabilized");
    PWord xi_final = pword_inv(S, d2);

    // Assemble mu and xi.
    PWord mu_final = pword_inv(S, work);
    for (const PWord& part : {pword_inv(S, mu3), pword_inv(S, t1), pword_inv(S, g1)})
        mu_final.insert(mu_final.end(), part.begin(), part.end());
    out.xi.toks = xi_final;
    out.mu.toks = mu_final;

    // eta = s3 C^-1 T1 M2 s2 regrouped as
    //   [s3 T1 s2] [(T1 s2)^-1 C^-1 (T1 s2)] [s2^-1 M2 s2],
    // a stabilized prefix followed by C-words.
    Mat etaF = mat_mul(R, eta2, s2);
    if (!ring_is_zero(etaF.at(n + m - 2, n + m - 1)))
        throw std::logic_error("reduced entry reappeared");
    PWord w3 = small_word_or_throw(ctx, s3);
    PWord w2 = small_word_or_throw(ctx, s2);
    PWord prefix = w3;
    prefix.insert(prefix.end(), t1.begin(), t1.end());
    prefix.insert(prefix.end(), w2.begin(), w2.end());
    Mat T1s2 = mat_mul(R, T1, s2);
    PWord cpart = conj_c_word(S, T1s2, pword_inv(S, cw));
    PWord cpart2 = conj_c_word(S, s2, work);
    cpart.insert(cpart.end(), cpart2.begin(), cpart2.end());
    out.eta.toks = prefix;
    out.eta.toks.insert(out.eta.toks.end(), cpart.begin(), cpart.end());
    out.eta.f_prefix = prefix.size();

    if (!mat_eq(pword_eval(S, out.eta.toks), etaF))
        throw std::logic_error("eta word mismatch");
    Mat total = mat_mul(
        R, mat_mul(R, etaF, pword_eval(S, out.xi.toks)),
        pword_eval(S, out.mu.toks));
    if (!mat_eq(total, T)) throw std::logic_error("triple product mismatch");
    if (!tag_sound(S, out.eta) || !tag_sound(S, out.xi) ||
        !tag_sound(S, out.mu))
        throw std::logic_error("tag soundness violated");
    out.reduced = reduced_entry_zero(etaF);
    return out;
}

FdgTriple fdg_decompose(const QuadSetup& S, const GenWord& theta,
                        size_t budget) {
    FdgContext ctx = make_fdg_context(S, budget);
    return fdg_decompose(ctx, theta);
}

GBlockForm g_block_analysis(const QuadSetup& S, const Mat& mu) {
    const Ring& R = S.R;
    if (!is_orthogonal(S, mu)) throw std::invalid_argument("not orthogonal");
    Blocks B = split_blocks(S, mu);
    auto zero_block = [&](const Mat& M) {
        for (int i = 0; i < M.rows; ++i)
            for (int j = 0; j < M.cols; ++j)
                if (!ring_is_zero(M.at(i, j))) return false;
        return true;
    };
    if (!mat_is_identity(R, B.a))
        throw std::invalid_argument("block (1,1) not identity");
    if (!zero_block(B.c)) throw std::invalid_argument("block (1,3) not zero");
    if (!zero_block(B.d)) throw std::invalid_argument("block (2,1) not zero");
    if (!zero_block(B.f)) throw std::invalid_argument("block (2,3) not zero");
    Mat eps_ti;
    try {
        eps_ti = mat_transpose(mat_inv(R, B.e));
    } catch (const std::exception&) {
        throw std::invalid_argument("block (2,2) not invertible");
    }
    if (!mat_eq(B.j, eps_ti))
        throw std::invalid_argument("block (3,3) not the inverse transpose");

    GBlockForm out;
    out.gamma = B.b;
    out.eps = B.e;
    out.theta = B.g;
    out.psi = B.h;

    // Bottom-row propagation: (u, v, w) -> (u+w theta, u gamma+v eps+w psi,
    // w eps^t^-1), checked on random rows.
    Rng rng(424242);
    for (int t = 0; t < 4; ++t) {
        Vec u(static_cast<size_t>(S.n)), v(static_cast<size_t>(S.m)),
            w(static_cast<size_t>(S.m));
        for (auto& x : u) x = ring_rand(R, rng);
        for (auto& x : v) x = ring_rand(R, rng);
        for (auto& x : w) x = ring_rand(R, rng);
        Vec row;
        row.insert(row.end(), u.begin(), u.end());
        row.insert(row.end(), v.begin(), v.end());
        row.insert(row.end(), w.begin(), w.end());
        Vec full = vec_mat(R, row, mu);
        Vec q1 = vec_mat(R, w, out.theta);
        Vec q2a = vec_mat(R, u, out.gamma);
        Vec q2b = vec_mat(R, v, out.eps);
        Vec q2c = vec_mat(R, w, out.psi);
        Vec q3 = vec_mat(R, w, eps_ti);
        for (int i = 0; i < S.n; ++i)
            if (!ring_eq(full[static_cast<size_t>(i)],
                         ring_add(R, u[static_cast<size_t>(i)],
                                  q1[static_cast<size_t>(i)])))
                throw std::logic_error("row propagation mismatch (Q)");
        for (int i = 0; i < S.m; ++i) {
            Elem want = ring_add(
                R, ring_add(R, q2a[static_cast<size_t>(i)],
                            q2b[static_cast<size_t>(i)]),
                q2c[static_cast<size_t>(i)]);
            if (!ring_eq(full[static_cast<size_t>(S.n + i)], want))
                throw std::logic_error("row propagation mismatch (P)");
        }
        for (int i = 0; i < S.m; ++i)
            if (!ring_eq(full[static_cast<size_t>(S.n + S.m + i)],
                         q3[static_cast<size_t>(i)]))
                throw std::logic_error("row propagation mismatch (P*)");
    }

    out.eps_embedded = true;
    for (int i = 0; i < S.m && out.eps_embedded; ++i) {
        Elem want_row = (i == S.m - 1) ? ring_one(R) : ring_zero(R);
        if (!ring_eq(out.eps.at(S.m - 1, i), want_row) ||
            !ring_eq(out.eps.at(i, S.m - 1), want_row))
            out.eps_embedded = false;
    }
    return out;
}

}  // namespace dser
