#include "dser/transvect.hpp"

#include <json.hpp>
#include <stdexcept>

namespace dser {

GenAtom general_atom(AtomKind kind, const Mat& param) {
    GenAtom a;
    a.kind = kind;
    a.param = param;
    return a;
}

GenAtom rank_one_atom(const QuadSetup& S, AtomKind kind, int i, const Vec& w,
                      int j) {
    if (i < 1 || i > S.m) throw std::invalid_argument("index out of range");
    if (j < 1 || j > S.n) throw std::invalid_argument("index out of range");
    if (w.size() != static_cast<size_t>(S.n))
        throw std::invalid_argument("parameter vector length must be n");
    Vec phiw = mat_vec(S.R, S.phi, w);  // (w^t phi)^t, phi symmetric
    Mat M = mat_zeros(S.R, S.m, S.n);
    for (int col = 0; col < S.n; ++col) M.at(i - 1, col) = phiw[col];
    GenAtom a;
    a.kind = kind;
    a.param = M;
    a.tag_i = i;
    a.tag_j = j;
    a.tag_w = w;
    return a;
}

GenAtom atom_inverse(const QuadSetup& S, const GenAtom& a) {
    GenAtom r = a;
    r.param = mat_neg(S.R, a.param);
    if (r.tag_w) {
        for (Elem& e : *r.tag_w) e = ring_neg(S.R, e);
    }
    return r;
}

Mat eval_atom(const QuadSetup& S, const GenAtom& a) {
    const Ring& R = S.R;
    if (a.param.rows != S.m || a.param.cols != S.n)
        throw std::invalid_argument("parameter must be m x n");
    const Mat& M = a.param;
    Mat Mstar = mat_mul(R, S.phi_inv, mat_transpose(M));      // n x m
    Mat MM = mat_mul(R, M, Mstar);                            // m x m
    Mat halfMM = mat_scale(R, ring_half(R), MM);
    Blocks B;
    B.a = mat_eye(R, S.n);
    B.e = mat_eye(R, S.m);
    B.j = mat_eye(R, S.m);
    if (a.kind == AtomKind::EA) {
        B.b = mat_zeros(R, S.n, S.m);
        B.c = mat_neg(R, Mstar);
        B.d = M;
        B.f = mat_neg(R, halfMM);
        B.g = mat_zeros(R, S.m, S.n);
        B.h = mat_zeros(R, S.m, S.m);
    } else {
        B.b = mat_neg(R, Mstar);
        B.c = mat_zeros(R, S.n, S.m);
        B.d = mat_zeros(R, S.m, S.n);
        B.f = mat_zeros(R, S.m, S.m);
        B.g = M;
        B.h = mat_neg(R, halfMM);
    }
    return assemble_blocks(S, B);
}

GenNodePtr node_atom(const GenAtom& a) {
    auto n = std::make_shared<GenNode>();
    n->kind = GenNode::Kind::Atom;
    n->atom = a;
    return n;
}

GenNodePtr node_inv(const GenNodePtr& x) {
    auto n = std::make_shared<GenNode>();
    n->kind = GenNode::Kind::Inv;
    n->a = x;
    return n;
}

GenNodePtr node_comm(const GenNodePtr& g, const GenNodePtr& h) {
    auto n = std::make_shared<GenNode>();
    n->kind = GenNode::Kind::Comm;
    n->a = g;
    n->b = h;
    return n;
}

GenWord word_of(std::vector<GenNodePtr> toks) {
    GenWord w;
    w.toks = std::move(toks);
    return w;
}

GenWord word_concat(const GenWord& x, const GenWord& y) {
    GenWord w;
    w.toks = x.toks;
    w.toks.insert(w.toks.end(), y.toks.begin(), y.toks.end());
    return w;
}

namespace {

GenNodePtr node_inverse_folded(const QuadSetup& S, const GenNodePtr& x) {
    switch (x->kind) {
        case GenNode::Kind::Atom:
            return node_atom(atom_inverse(S, x->atom));
        case GenNode::Kind::Inv:
            return x->a;
        case GenNode::Kind::Comm:
            // [g,h]^-1 = [h,g]
            return node_comm(x->b, x->a);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

GenWord word_inverse(const QuadSetup& S, const GenWord& w) {
    GenWord out;
    out.toks.reserve(w.toks.size());
    for (auto it = w.toks.rbegin(); it != w.toks.rend(); ++it)
        out.toks.push_back(node_inverse_folded(S, *it));
    return out;
}

Mat eval_node(const QuadSetup& S, const GenNodePtr& x) {
    switch (x->kind) {
        case GenNode::Kind::Atom:
            return eval_atom(S, x->atom);
        case GenNode::Kind::Inv:
            return block_inverse(S, eval_node(S, x->a));
        case GenNode::Kind::Comm: {
            Mat g = eval_node(S, x->a);
            Mat h = eval_node(S, x->b);
            Mat gi = block_inverse(S, g);
            Mat hi = block_inverse(S, h);
            return mat_mul(S.R, mat_mul(S.R, g, h), mat_mul(S.R, gi, hi));
        }
    }
    throw std::logic_error("unreachable");
}

Mat eval_word(const QuadSetup& S, const GenWord& w) {
    if (w.cache && w.cache->R == S.R && w.cache->n == S.n && w.cache->m == S.m)
        return w.cache->value;
    Mat acc = mat_eye(S.R, S.dim());
    for (const GenNodePtr& t : w.toks) acc = mat_mul(S.R, acc, eval_node(S, t));
    auto c = std::make_shared<GenWord::Cache>();
    c->R = S.R;
    c->n = S.n;
    c->m = S.m;
    c->value = acc;
    w.cache = c;
    return acc;
}

namespace {

GenNodePtr stabilize_node(const QuadSetup& small, const GenNodePtr& x) {
    switch (x->kind) {
        case GenNode::Kind::Atom: {
            GenAtom a = x->atom;
            Mat padded = mat_zeros(small.R, small.m + 1, small.n);
            for (int r = 0; r < small.m; ++r)
                for (int c = 0; c < small.n; ++c)
                    padded.at(r, c) = a.param.at(r, c);
            a.param = padded;
            return node_atom(a);
        }
        case GenNode::Kind::Inv:
            return node_inv(stabilize_node(small, x->a));
        case GenNode::Kind::Comm:
            return node_comm(stabilize_node(small, x->a),
                             stabilize_node(small, x->b));
    }
    throw std::logic_error("unreachable");
}

}  // namespace

GenWord stabilize_word(const QuadSetup& small, const GenWord& w) {
    GenWord out;
    out.toks.reserve(w.toks.size());
    for (const GenNodePtr& t : w.toks)
        out.toks.push_back(stabilize_node(small, t));
    return out;
}

namespace {

using nlohmann::json;

json atom_to_json(const GenAtom& a) {
    json t;
    t["t"] = (a.kind == AtomKind::EA) ? "EA" : "EBstar";
    if (a.tag_i > 0 && a.tag_w) {
        t["i"] = a.tag_i;
        json w = json::array();
        for (const Elem& e : *a.tag_w) w.push_back(ring_to_string(e));
        t["w"] = w;
    } else {
        json rows = json::array();
        for (int r = 0; r < a.param.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < a.param.cols; ++c)
                row.push_back(ring_to_string(a.param.at(r, c)));
            rows.push_back(row);
        }
        t["M"] = rows;
    }
    return t;
}

json node_to_json(const GenNodePtr& x) {
    switch (x->kind) {
        case GenNode::Kind::Atom:
            return atom_to_json(x->atom);
        case GenNode::Kind::Inv: {
            json t;
            t["t"] = "inv";
            t["a"] = node_to_json(x->a);
            return t;
        }
        case GenNode::Kind::Comm: {
            json t;
            t["t"] = "comm";
            t["a"] = node_to_json(x->a);
            t["b"] = node_to_json(x->b);
            return t;
        }
    }
    throw std::logic_error("unreachable");
}

GenNodePtr node_from_json(const QuadSetup& S, const json& t) {
    const std::string kind = t.at("t").get<std::string>();
    if (kind == "inv") return node_inv(node_from_json(S, t.at("a")));
    if (kind == "comm")
        return node_comm(node_from_json(S, t.at("a")),
                         node_from_json(S, t.at("b")));
    AtomKind ak;
    if (kind == "EA") {
        ak = AtomKind::EA;
    } else if (kind == "EBstar") {
        ak = AtomKind::EBstar;
    } else {
        throw std::invalid_argument("unknown token kind: " + kind);
    }
    if (t.contains("i")) {
        int i = t.at("i").get<int>();
        Vec w;
        for (const auto& s : t.at("w"))
            w.push_back(ring_parse(S.R, s.get<std::string>()));
        int j = t.contains("j") ? t.at("j").get<int>() : 1;
        return node_atom(rank_one_atom(S, ak, i, w, j));
    }
    const json& rows = t.at("M");
    Mat M = mat_zeros(S.R, static_cast<int>(rows.size()),
                      rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int r = 0; r < M.rows; ++r)
        for (int c = 0; c < M.cols; ++c)
            M.at(r, c) = ring_parse(S.R, rows[r][c].get<std::string>());
    return node_atom(general_atom(ak, M));
}

}  // namespace

std::string word_to_json(const GenWord& w) {
    json arr = json::array();
    for (const GenNodePtr& t : w.toks) arr.push_back(node_to_json(t));
    return arr.dump();
}

GenWord word_from_json(const QuadSetup& S, const std::string& text) {
    json arr = json::parse(text);
    if (!arr.is_array()) throw std::invalid_argument("word must be a JSON array");
    GenWord w;
    for (const auto& t : arr) w.toks.push_back(node_from_json(S, t));
    return w;
}

}  // namespace dser
