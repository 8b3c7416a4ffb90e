#ifndef DSER_MATRIX_HPP
#define DSER_MATRIX_HPP

#include <string>
#include <vector>

#include "dser/ring.hpp"

namespace dser {

// Dense exact matrix over a Ring, row-major.  Sizes here are tiny
// (dimension n+2m <= 11 in every shipped workload), so clarity wins over
// cleverness; the enumeration lab uses its own packed representation.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<Elem> a;

    Mat() = default;
    Mat(int r, int c, Elem fill) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    Elem& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Elem& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

Mat mat_zeros(const Ring& R, int r, int c);
Mat mat_eye(const Ring& R, int d);
// Build from row-major longs (test/fixture convenience).
Mat mat_from_longs(const Ring& R, int r, int c, const std::vector<long>& vals);

Mat mat_mul(const Ring& R, const Mat& A, const Mat& B);
Mat mat_add(const Ring& R, const Mat& A, const Mat& B);
Mat mat_sub(const Ring& R, const Mat& A, const Mat& B);
Mat mat_neg(const Ring& R, const Mat& A);
Mat mat_scale(const Ring& R, const Elem& c, const Mat& A);
Mat mat_transpose(const Mat& A);
bool mat_eq(const Mat& A, const Mat& B);
bool mat_is_identity(const Ring& R, const Mat& A);

// Exact inverse by Gauss-Jordan elimination with unit pivots; when no
// entry of a column is a unit the elimination first adds a scaled row to
// manufacture one (needed over rings like Z/15).  Throws
// std::runtime_error("singular") when no inverse exists.
Mat mat_inv(const Ring& R, const Mat& A);

// y = M x  (column vector), and  y = x M  (row vector).
Vec mat_vec(const Ring& R, const Mat& M, const Vec& x);
Vec vec_mat(const Ring& R, const Vec& x, const Mat& M);

// Text format: one row per line, entries space-separated, rationals as
// "p/q", residues as decimal integers.
std::string mat_to_text(const Mat& A);
Mat mat_parse_text(const Ring& R, const std::string& text);

}  // namespace dser

#endif
