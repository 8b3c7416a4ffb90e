#include "dser/ring.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace dser {

Ring Ring::parse(const std::string& spec) {
    if (spec == "rationals") return rationals();
    const std::string prefix = "zmod:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string digits = spec.substr(prefix.size());
        if (digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad ring spec: " + spec);
        return zmod(std::stol(digits));
    }
    throw std::invalid_argument("bad ring spec: " + spec);
}

namespace {

long mod_reduce(long v, long m) {
    long r = v % m;
    return r < 0 ? r + m : r;
}

const long& as_res(const Elem& a) { return std::get<long>(a); }
const mpq_class& as_rat(const Elem& a) { return std::get<mpq_class>(a); }

// Extended gcd: returns g and x with a*x == g (mod m).
long ext_gcd_inv(long a, long m, bool& ok) {
    long old_r = a, r = m;
    long old_s = 1, s = 0;
    while (r != 0) {
        long q = old_r / r;
        long t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    ok = (old_r == 1 || old_r == -1);
    long inv = (old_r == -1) ? -old_s : old_s;
    return mod_reduce(inv, m);
}

}  // namespace

Elem ring_zero(const Ring& R) {
    if (R.finite()) return Elem{0L};
    return Elem{mpq_class(0)};
}

Elem ring_one(const Ring& R) {
    if (R.finite()) return Elem{1L};
    return Elem{mpq_class(1)};
}

Elem ring_from_long(const Ring& R, long v) {
    if (R.finite()) return Elem{mod_reduce(v, R.modulus)};
    return Elem{mpq_class(v)};
}

Elem ring_parse(const Ring& R, const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty element literal");
    if (R.finite()) {
        // Accept optionally signed decimal integers of any size.
        mpz_class z(text);
        mpz_class m(R.modulus);
        mpz_class r = z % m;
        if (r < 0) r += m;
        return Elem{r.get_si()};
    }
    mpq_class q(text);
    q.canonicalize();
    return Elem{q};
}

Elem ring_add(const Ring& R, const Elem& a, const Elem& b) {
    if (R.finite()) return Elem{mod_reduce(as_res(a) + as_res(b), R.modulus)};
    return Elem{mpq_class(as_rat(a) + as_rat(b))};
}

Elem ring_sub(const Ring& R, const Elem& a, const Elem& b) {
    if (R.finite()) return Elem{mod_reduce(as_res(a) - as_res(b), R.modulus)};
    return Elem{mpq_class(as_rat(a) - as_rat(b))};
}

Elem ring_mul(const Ring& R, const Elem& a, const Elem& b) {
    if (R.finite()) return Elem{mod_reduce(as_res(a) * as_res(b), R.modulus)};
    return Elem{mpq_class(as_rat(a) * as_rat(b))};
}

Elem ring_neg(const Ring& R, const Elem& a) {
    if (R.finite()) return Elem{mod_reduce(-as_res(a), R.modulus)};
    return Elem{mpq_class(-as_rat(a))};
}

Elem ring_inv(const Ring& R, const Elem& a) {
    if (R.finite()) {
        bool ok = false;
        long inv = ext_gcd_inv(as_res(a), R.modulus, ok);
        if (!ok) throw std::domain_error("not a unit");
        return Elem{inv};
    }
    if (as_rat(a) == 0) throw std::domain_error("not a unit");
    return Elem{mpq_class(1 / as_rat(a))};
}

Elem ring_half(const Ring& R) { return ring_inv(R, ring_from_long(R, 2)); }

bool ring_is_zero(const Elem& a) {
    if (std::holds_alternative<long>(a)) return as_res(a) == 0;
    return as_rat(a) == 0;
}

bool ring_eq(const Elem& a, const Elem& b) {
    if (a.index() != b.index()) return false;
    if (std::holds_alternative<long>(a)) return as_res(a) == as_res(b);
    return as_rat(a) == as_rat(b);
}

bool ring_is_unit(const Ring& R, const Elem& a) {
    if (R.finite()) {
        bool ok = false;
        (void)ext_gcd_inv(as_res(a), R.modulus, ok);
        return ok;
    }
    return as_rat(a) != 0;
}

std::string ring_to_string(const Elem& a) {
    if (std::holds_alternative<long>(a)) return std::to_string(as_res(a));
    return as_rat(a).get_str();
}

Elem ring_rand(const Ring& R, Rng& rng) {
    if (R.finite()) return Elem{static_cast<long>(rng.below(R.modulus))};
    return Elem{mpq_class(rng.range(-3, 3))};
}

Elem ring_rand_unit(const Ring& R, Rng& rng) {
    if (R.finite()) {
        for (;;) {
            Elem e{static_cast<long>(rng.below(R.modulus))};
            if (ring_is_unit(R, e)) return e;
        }
    }
    static const int nums[] = {2, 3, -1, 1, -2};
    static const int dens[] = {1, 1, 1, 2, 3};
    const long i = rng.range(0, 4);
    mpq_class q(nums[i], dens[i]);
    q.canonicalize();
    return Elem{q};
}

long residue_count(const Ring& R) {
    if (!R.finite()) throw std::domain_error("infinite ring");
    return R.modulus;
}

Elem residue_at(const Ring& R, long i) {
    if (!R.finite()) throw std::domain_error("infinite ring");
    return Elem{mod_reduce(i, R.modulus)};
}

bool is_unimodular(const Ring& R, const Vec& v) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    if (R.finite()) {
        long g = R.modulus;
        for (const Elem& e : v) g = std::gcd(g, as_res(e));
        return g == 1;
    }
    for (const Elem& e : v)
        if (!ring_is_zero(e)) return true;
    return false;
}

Vec stable_range_witness(const Ring& R, const Vec& v, int l) {
    if (l < 1 || v.size() != static_cast<size_t>(l) + 1)
        throw std::invalid_argument("vector length must be l+1");
    if (!is_unimodular(R, v)) throw std::runtime_error("not unimodular");

    const Elem last = v.back();
    auto shortened = [&](const Vec& b) {
        Vec s(static_cast<size_t>(l));
        for (int i = 0; i < l; ++i)
            s[i] = ring_add(R, v[i], ring_mul(R, last, b[i]));
        return s;
    };

    if (!R.finite()) {
        Vec b(static_cast<size_t>(l), ring_zero(R));
        Vec prefix(v.begin(), v.end() - 1);
        bool prefix_nonzero = false;
        for (const Elem& e : prefix)
            if (!ring_is_zero(e)) prefix_nonzero = true;
        if (!prefix_nonzero) b[0] = ring_one(R);
        if (!is_unimodular(R, shortened(b))) throw std::runtime_error("no witness");
        return b;
    }

    // Exhaustive lexicographic search over the finite ring.
    const long q = R.modulus;
    std::vector<long> odo(static_cast<size_t>(l), 0);
    for (;;) {
        Vec b(static_cast<size_t>(l));
        for (int i = 0; i < l; ++i) b[i] = Elem{odo[i]};
        if (is_unimodular(R, shortened(b))) return b;
        int pos = l - 1;
        while (pos >= 0 && ++odo[pos] == q) odo[pos--] = 0;
        if (pos < 0) break;
    }
    throw std::runtime_error("no witness");
}

Vec apply_records(const Ring& R, const Vec& v, const std::vector<ERecord>& recs) {
    Vec cur = v;
    for (const ERecord& rec : recs) {
        Elem delta = ring_mul(R, cur[rec.row - 1], rec.scalar);
        cur[rec.col - 1] = ring_add(R, cur[rec.col - 1], delta);
    }
    return cur;
}

namespace {

// Breadth-first fallback over single elementary moves, finite rings only:
// find a record sequence making the last entry a unit.
std::vector<ERecord> bfs_to_unit_tail(const Ring& R, const Vec& v) {
    const int m = static_cast<int>(v.size());
    const long q = R.modulus;
    auto key_of = [&](const Vec& x) {
        std::vector<long> k(x.size());
        for (size_t i = 0; i < x.size(); ++i) k[i] = std::get<long>(x[i]);
        return k;
    };
    std::map<std::vector<long>, std::pair<std::vector<long>, ERecord>> parent;
    std::deque<Vec> work;
    parent.emplace(key_of(v), std::make_pair(std::vector<long>{}, ERecord{0, 0, Elem{0L}}));
    work.push_back(v);
    while (!work.empty()) {
        Vec cur = work.front();
        work.pop_front();
        if (ring_is_unit(R, cur.back())) {
            // Walk parent pointers back to the start.
            std::vector<ERecord> seq;
            std::vector<long> k = key_of(cur);
            while (true) {
                auto it = parent.find(k);
                if (it->second.first.empty() && seq.size() > 100000)
                    throw std::runtime_error("no witness");
                if (it->second.first.empty()) break;
                seq.push_back(it->second.second);
                k = it->second.first;
            }
            std::reverse(seq.begin(), seq.end());
            return seq;
        }
        for (int row = 1; row <= m; ++row) {
            for (int col = 1; col <= m; ++col) {
                if (row == col) continue;
                for (long c = 1; c < q; ++c) {
                    ERecord rec{row, col, Elem{c}};
                    Vec nxt = apply_records(R, cur, {rec});
                    auto k = key_of(nxt);
                    if (parent.count(k)) continue;
                    parent.emplace(k, std::make_pair(key_of(cur), rec));
                    work.push_back(nxt);
                }
            }
        }
    }
    throw std::runtime_error("no witness");
}

}  // namespace

std::vector<ERecord> elementary_row_reduce(const Ring& R, const Vec& v) {
    const int m = static_cast<int>(v.size());
    if (!is_unimodular(R, v)) throw std::runtime_error("not unimodular");
    // Already reduced?
    bool already = ring_eq(v.back(), ring_one(R));
    for (int i = 0; i + 1 < m && already; ++i)
        if (!ring_is_zero(v[i])) already = false;
    if (already) return {};
    if (m < 2) throw std::invalid_argument("need length >= 2");

    std::vector<ERecord> recs;
    Vec cur = v;
    auto push = [&](ERecord rec) {
        cur = apply_records(R, cur, {rec});
        recs.push_back(std::move(rec));
    };

    // Phase A: make the last entry a unit.  Deterministic single-move scan
    // (lowest source index, then smallest scalar), with a breadth-first
    // fallback on finite rings when no single move suffices.
    if (!ring_is_unit(R, cur.back())) {
        bool done = false;
        if (R.finite()) {
            for (int k = 1; k < m && !done; ++k) {
                for (long c = 1; c < R.modulus && !done; ++c) {
                    Elem cand = ring_add(R, cur[m - 1], ring_mul(R, Elem{c}, cur[k - 1]));
                    if (ring_is_unit(R, cand)) {
                        push(ERecord{k, m, Elem{c}});
                        done = true;
                    }
                }
            }
            if (!done) {
                for (const ERecord& rec : bfs_to_unit_tail(R, cur)) push(rec);
                done = true;
            }
        } else {
            for (int k = 1; k < m && !done; ++k) {
                if (ring_is_zero(cur[k - 1])) continue;
                for (long c = 1; c <= 2 && !done; ++c) {
                    Elem cc = ring_from_long(R, c);
                    Elem cand = ring_add(R, cur[m - 1], ring_mul(R, cc, cur[k - 1]));
                    if (!ring_is_zero(cand)) {
                        push(ERecord{k, m, cc});
                        done = true;
                    }
                }
            }
            if (!done) throw std::runtime_error("no witness");
        }
    }

    // Phase B: clear the other entries against the unit tail.
    Elem u_inv = ring_inv(R, cur.back());
    for (int k = 1; k < m; ++k) {
        if (ring_is_zero(cur[k - 1])) continue;
        Elem s = ring_neg(R, ring_mul(R, cur[k - 1], u_inv));
        push(ERecord{m, k, s});
    }

    // Phase C: normalize the tail unit u to 1 with three det-1 moves
    // through slot m-1:  (0,u) -> (1,u) -> (1,1) -> (0,1).
    if (!ring_eq(cur.back(), ring_one(R))) {
        Elem u = cur.back();
        push(ERecord{m, m - 1, ring_inv(R, u)});
        push(ERecord{m - 1, m, ring_sub(R, ring_one(R), u)});
        push(ERecord{m, m - 1, ring_neg(R, ring_one(R))});
    }

    // Postcondition re-check (cheap, keeps every caller honest).
    for (int i = 0; i + 1 < m; ++i)
        if (!ring_is_zero(cur[i])) throw std::logic_error("row reduce failed");
    if (!ring_eq(cur.back(), ring_one(R))) throw std::logic_error("row reduce failed");
    return recs;
}

}  // namespace dser
