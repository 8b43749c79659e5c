#pragma once

#include <vector>

#include "elgen/errors.hpp"
#include "elgen/integers.hpp"
#include "elgen/matrix.hpp"

namespace elgen {

/// U * M * V = D with U, V unimodular and D diagonal with the invariant
/// factor chain d1 | d2 | ... (non-negative).
struct SnfResult {
    Matrix U, D, V;

    std::vector<Int> invariant_factors() const {
        std::vector<Int> f;
        int n = std::min(D.rows(), D.cols());
        for (int i = 0; i < n; ++i) {
            if (D.at(i, i) == 0) break;
            f.push_back(D.at(i, i));
        }
        return f;
    }
};

/// U * M = H with U unimodular; H in row Hermite form: pivots positive,
/// zero below, entries above a pivot reduced into [0, pivot).
struct HnfResult {
    Matrix H, U;
    std::vector<int> pivot_cols;
};

namespace detail {

// round-to-nearest quotient, |a - q*b| <= |b|/2
inline Int div_round(const Int& a, const Int& b) {
    Int q = a / b, r = a - q * b;
    if (2 * abs(r) > abs(b)) q += (a < 0) == (b < 0) ? 1 : -1;
    return q;
}

struct Sheet {
    int rows, cols;
    std::vector<Int> a;
    Int& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }

    void row_sub(int i, int k, const Int& q) { // row_i -= q*row_k
        if (q == 0) return;
        for (int j = 0; j < cols; ++j) at(i, j) -= q * at(k, j);
    }
    void col_sub(int j, int k, const Int& q) { // col_j -= q*col_k
        if (q == 0) return;
        for (int i = 0; i < rows; ++i) at(i, j) -= q * at(i, k);
    }
    void row_swap(int i, int k) {
        if (i == k) return;
        for (int j = 0; j < cols; ++j) std::swap(at(i, j), at(k, j));
    }
    void col_swap(int j, int k) {
        if (j == k) return;
        for (int i = 0; i < rows; ++i) std::swap(at(i, j), at(i, k));
    }
    void row_neg(int i) {
        for (int j = 0; j < cols; ++j) at(i, j) = -at(i, j);
    }

    Matrix to_matrix() const {
        Matrix m(RingDesc::Z(), rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m.set(i, j, a[static_cast<std::size_t>(i) * cols + j]);
        return m;
    }

    static Sheet of(const Matrix& m) {
        Sheet s{m.rows(), m.cols(), {}};
        s.a.resize(static_cast<std::size_t>(m.rows()) * m.cols());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) s.a[static_cast<std::size_t>(i) * m.cols() + j] = m.at(i, j);
        return s;
    }
    static Sheet eye(int n) {
        Sheet s{n, n, std::vector<Int>(static_cast<std::size_t>(n) * n)};
        for (int i = 0; i < n; ++i) s.at(i, i) = 1;
        return s;
    }
};

} // namespace detail

/// Smith normal form over Z. Total on any integer matrix; pivoting on the
/// minimal absolute value keeps intermediate growth moderate.
inline SnfResult snf(const Matrix& m) {
    require(!m.ring().scalar_is_modular(), errc::ring_mismatch, "snf: integer matrices only");
    using detail::Sheet;
    Sheet a = Sheet::of(m), u = Sheet::eye(m.rows()), v = Sheet::eye(m.cols());
    int r = m.rows(), c = m.cols(), kmax = std::min(r, c);

    for (int k = 0; k < kmax; ++k) {
        for (;;) {
            int pi = -1, pj = -1;
            for (int i = k; i < r; ++i)
                for (int j = k; j < c; ++j)
                    if (a.at(i, j) != 0 &&
                        (pi < 0 || abs(a.at(i, j)) < abs(a.at(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) { k = kmax; break; } // remaining submatrix zero
            a.row_swap(k, pi); u.row_swap(k, pi);
            a.col_swap(k, pj); v.col_swap(k, pj);

            bool clean = true;
            for (int i = k + 1; i < r; ++i)
                if (a.at(i, k) != 0) {
                    Int q = detail::div_round(a.at(i, k), a.at(k, k));
                    a.row_sub(i, k, q); u.row_sub(i, k, q);
                    if (a.at(i, k) != 0) clean = false;
                }
            for (int j = k + 1; j < c; ++j)
                if (a.at(k, j) != 0) {
                    Int q = detail::div_round(a.at(k, j), a.at(k, k));
                    a.col_sub(j, k, q); v.col_sub(j, k, q);
                    if (a.at(k, j) != 0) clean = false;
                }
            if (!clean) continue;

            // enforce that the pivot divides the rest of the submatrix
            int bi = -1, bj = -1;
            for (int i = k + 1; i < r && bi < 0; ++i)
                for (int j = k + 1; j < c; ++j)
                    if (a.at(i, j) % a.at(k, k) != 0) {
                        bi = i;
                        bj = j;
                        break;
                    }
            if (bi < 0) break;
            a.row_sub(k, bi, Int(-1)); // row_k += row_bi, then re-reduce
            u.row_sub(k, bi, Int(-1));
        }
        if (k == kmax) break;
    }
    for (int i = 0; i < kmax; ++i)
        if (a.at(i, i) < 0) { a.row_neg(i); u.row_neg(i); }

    return {u.to_matrix(), a.to_matrix(), v.to_matrix()};
}

/// Row Hermite form over Z with its unimodular row transform.
inline HnfResult hnf(const Matrix& m) {
    require(!m.ring().scalar_is_modular(), errc::ring_mismatch, "hnf: integer matrices only");
    using detail::Sheet;
    Sheet a = Sheet::of(m), u = Sheet::eye(m.rows());
    int r = m.rows(), c = m.cols(), row = 0;
    std::vector<int> pivots;

    for (int j = 0; j < c && row < r; ++j) {
        for (;;) {
            int best = -1;
            for (int i = row; i < r; ++i)
                if (a.at(i, j) != 0 && (best < 0 || abs(a.at(i, j)) < abs(a.at(best, j)))) best = i;
            if (best < 0) break;
            bool lone = true;
            for (int i = row; i < r; ++i)
                if (i != best && a.at(i, j) != 0) {
                    Int q = detail::div_round(a.at(i, j), a.at(best, j));
                    a.row_sub(i, best, q); u.row_sub(i, best, q);
                    if (a.at(i, j) != 0) lone = false;
                }
            if (lone) {
                a.row_swap(row, best); u.row_swap(row, best);
                break;
            }
        }
        if (a.at(row, j) == 0) continue;
        if (a.at(row, j) < 0) { a.row_neg(row); u.row_neg(row); }
        for (int i = 0; i < row; ++i) {
            Int q = a.at(i, j) / a.at(row, j);
            if (a.at(i, j) % a.at(row, j) < 0) q -= 1; // floor division
            a.row_sub(i, row, q); u.row_sub(i, row, q);
        }
        pivots.push_back(j);
        ++row;
    }
    return {a.to_matrix(), u.to_matrix(), pivots};
}

inline std::vector<Int> invariant_factors(const Matrix& m) { return snf(m).invariant_factors(); }

/// All min(rows, cols) invariant factors equal 1, i.e. the rows generate a
/// full direct summand. For stacked columns this is the left-invertibility
/// test.
inline bool has_unit_invariant_factors(const Matrix& m) {
    auto f = invariant_factors(m);
    int need = std::min(m.rows(), m.cols());
    if (static_cast<int>(f.size()) != need) return false;
    for (const Int& d : f)
        if (d != 1) return false;
    return true;
}

/// Left inverse X with X * m = I_cols, defined when the invariant factors
/// are all 1; from the Hermite row transform, so it is exact and integral.
inline std::optional<Matrix> left_inverse(const Matrix& m) {
    HnfResult h = hnf(m);
    int n = m.cols();
    if (static_cast<int>(h.pivot_cols.size()) != n) return std::nullopt;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (h.H.at(i, j) != (i == j ? 1 : 0)) return std::nullopt;
    return h.U.submatrix(0, 0, n, m.rows());
}

} // namespace elgen
