#include "dser/matrix.hpp"

#include <sstream>

namespace dser {

Mat mat_zeros(const Ring& R, int r, int c) { return Mat(r, c, ring_zero(R)); }

Mat mat_eye(const Ring& R, int d) {
    Mat M(d, d, ring_zero(R));
    for (int i = 0; i < d; ++i) M.at(i, i) = ring_one(R);
    return M;
}

Mat mat_from_longs(const Ring& R, int r, int c, const std::vector<long>& vals) {
    if (vals.size() != static_cast<size_t>(r) * c)
        throw std::invalid_argument("mat_from_longs: wrong element count");
    Mat M(r, c, ring_zero(R));
    for (size_t i = 0; i < vals.size(); ++i) M.a[i] = ring_from_long(R, vals[i]);
    return M;
}

Mat mat_mul(const Ring& R, const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("mat_mul: size mismatch");
    Mat C(A.rows, B.cols, ring_zero(R));
    for (int i = 0; i < A.rows; ++i) {
        for (int t = 0; t < A.cols; ++t) {
            const Elem& x = A.at(i, t);
            if (ring_is_zero(x)) continue;
            for (int j = 0; j < B.cols; ++j) {
                C.at(i, j) = ring_add(R, C.at(i, j), ring_mul(R, x, B.at(t, j)));
            }
        }
    }
    return C;
}

Mat mat_add(const Ring& R, const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("mat_add: size mismatch");
    Mat C = A;
    for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = ring_add(R, A.a[i], B.a[i]);
    return C;
}

Mat mat_sub(const Ring& R, const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols)
        throw std::invalid_argument("mat_sub: size mismatch");
    Mat C = A;
    for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = ring_sub(R, A.a[i], B.a[i]);
    return C;
}

Mat mat_neg(const Ring& R, const Mat& A) {
    Mat C = A;
    for (Elem& e : C.a) e = ring_neg(R, e);
    return C;
}

Mat mat_scale(const Ring& R, const Elem& c, const Mat& A) {
    Mat C = A;
    for (Elem& e : C.a) e = ring_mul(R, c, e);
    return C;
}

Mat mat_transpose(const Mat& A) {
    Mat C(A.cols, A.rows, A.a.empty() ? Elem{0L} : A.a[0]);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
    return C;
}

bool mat_eq(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    for (size_t i = 0; i < A.a.size(); ++i)
        if (!ring_eq(A.a[i], B.a[i])) return false;
    return true;
}

bool mat_is_identity(const Ring& R, const Mat& A) {
    if (A.rows != A.cols) return false;
    return mat_eq(A, mat_eye(R, A.rows));
}

Mat mat_inv(const Ring& R, const Mat& A) {
    if (A.rows != A.cols) throw std::invalid_argument("mat_inv: not square");
    const int n = A.rows;
    // Augmented [A | I].
    Mat M(n, 2 * n, ring_zero(R));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M.at(i, j) = A.at(i, j);
        M.at(i, n + i) = ring_one(R);
    }
    auto row_addmul = [&](int dst, int src, const Elem& f) {
        for (int j = 0; j < 2 * n; ++j)
            M.at(dst, j) = ring_add(R, M.at(dst, j), ring_mul(R, f, M.at(src, j)));
    };
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n && piv < 0; ++r)
            if (ring_is_unit(R, M.at(r, col))) piv = r;
        if (piv < 0) {
            // Manufacture a unit pivot by adding a scaled later row.
            bool made = false;
            const long scal_limit = R.finite() ? R.modulus : 2;
            for (int r = col; r < n && !made; ++r) {
                for (int r2 = col; r2 < n && !made; ++r2) {
                    if (r == r2) continue;
                    for (long t = 1; t < scal_limit && !made; ++t) {
                        Elem tt = ring_from_long(R, t);
                        Elem v = ring_add(R, M.at(r, col), ring_mul(R, tt, M.at(r2, col)));
                        if (ring_is_unit(R, v)) {
                            row_addmul(r, r2, tt);
                            piv = r;
                            made = true;
                        }
                    }
                }
            }
            if (!made) throw std::runtime_error("singular");
        }
        if (piv != col) {
            for (int j = 0; j < 2 * n; ++j) std::swap(M.at(col, j), M.at(piv, j));
        }
        Elem iv = ring_inv(R, M.at(col, col));
        for (int j = 0; j < 2 * n; ++j) M.at(col, j) = ring_mul(R, iv, M.at(col, j));
        for (int r = 0; r < n; ++r) {
            if (r == col || ring_is_zero(M.at(r, col))) continue;
            Elem f = ring_neg(R, M.at(r, col));
            row_addmul(r, col, f);
        }
    }
    Mat out(n, n, ring_zero(R));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.at(i, j) = M.at(i, n + j);
    return out;
}

Vec mat_vec(const Ring& R, const Mat& M, const Vec& x) {
    if (M.cols != static_cast<int>(x.size()))
        throw std::invalid_argument("mat_vec: size mismatch");
    Vec y(static_cast<size_t>(M.rows), ring_zero(R));
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j)
            y[i] = ring_add(R, y[i], ring_mul(R, M.at(i, j), x[j]));
    return y;
}

Vec vec_mat(const Ring& R, const Vec& x, const Mat& M) {
    if (M.rows != static_cast<int>(x.size()))
        throw std::invalid_argument("vec_mat: size mismatch");
    Vec y(static_cast<size_t>(M.cols), ring_zero(R));
    for (int j = 0; j < M.cols; ++j)
        for (int i = 0; i < M.rows; ++i)
            y[j] = ring_add(R, y[j], ring_mul(R, x[i], M.at(i, j)));
    return y;
}

std::string mat_to_text(const Mat& A) {
    std::ostringstream os;
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) {
            if (j) os << ' ';
            os << ring_to_string(A.at(i, j));
        }
        os << '\n';
    }
    return os.str();
}

Mat mat_parse_text(const Ring& R, const std::string& text) {
    std::istringstream is(text);
    std::vector<Vec> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        Vec row;
        std::string tok;
        while (ls >> tok) row.push_back(ring_parse(R, tok));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("empty matrix text");
    const size_t c = rows[0].size();
    for (const Vec& r : rows)
        if (r.size() != c) throw std::invalid_argument("ragged matrix text");
    Mat M(static_cast<int>(rows.size()), static_cast<int>(c), ring_zero(R));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < c; ++j) M.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return M;
}

}  // namespace dser
