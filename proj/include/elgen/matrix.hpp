#pragma once

#include <initializer_list>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "elgen/errors.hpp"
#include "elgen/integers.hpp"
#include "elgen/ring.hpp"

namespace elgen {

/// Dense matrix with exact entries over a ring of the supported tower.
/// Entries are stored flat in the scalar base ring (reduced mod q for
/// modular rings); a matrix-ring tag on top of the same storage gives the
/// block view of the 2.2-style isomorphism, so crossing it never copies
/// entry data into a different layout.
class Matrix {
  public:
    Matrix() = default;

    Matrix(RingDesc ring, int rows, int cols)
        : ring_(std::move(ring)), rows_(rows), cols_(cols),
          e_(static_cast<std::size_t>(rows) * cols) {
        require(rows >= 0 && cols >= 0, errc::malformed_input, "negative dimension");
        check_block_shape();
    }

    static Matrix zero(const RingDesc& ring, int rows, int cols) { return Matrix(ring, rows, cols); }

    static Matrix identity(const RingDesc& ring, int n) {
        Matrix m(ring, n, n);
        for (int i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    static Matrix from_rows(const RingDesc& ring,
                            std::initializer_list<std::initializer_list<Int>> rows) {
        int r = static_cast<int>(rows.size());
        int c = r ? static_cast<int>(rows.begin()->size()) : 0;
        Matrix m(ring, r, c);
        int i = 0;
        for (auto& row : rows) {
            require(static_cast<int>(row.size()) == c, errc::malformed_input, "ragged rows");
            int j = 0;
            for (auto& v : row) m.set(i, j++, v);
            ++i;
        }
        return m;
    }

    static Matrix from_rows_z(std::initializer_list<std::initializer_list<Int>> rows) {
        return from_rows(RingDesc::Z(), rows);
    }

    const RingDesc& ring() const { return ring_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    const Int& at(int i, int j) const { return e_[idx(i, j)]; }

    void set(int i, int j, Int v) {
        if (ring_.scalar_is_modular()) v = mod_floor(v, ring_.scalar_modulus());
        e_[idx(i, j)] = std::move(v);
    }

    void add_at(int i, int j, const Int& v) { set(i, j, e_[idx(i, j)] + v); }

    /// Retags the same flat entries as a matrix over M_n(scalar).
    Matrix block_view(int n) const {
        require(!ring_.is_matrix_ring(), errc::ring_mismatch, "already a matrix ring");
        require(n >= 1 && rows_ % n == 0 && cols_ % n == 0, errc::dimension_mismatch,
                "size not divisible by block size");
        Matrix m = *this;
        m.ring_ = RingDesc::matrix_over(ring_, n);
        return m;
    }

    /// Inverse of block_view: drops down to the flat scalar ring.
    Matrix block_join() const {
        require(ring_.is_matrix_ring(), errc::ring_mismatch, "not a matrix ring");
        Matrix m = *this;
        m.ring_ = ring_.base();
        return m;
    }

    int block_rows() const { return rows_ / ring_.block_n(); }
    int block_cols() const { return cols_ / ring_.block_n(); }

    /// n x n scalar block at block position (bi, bj), 0-based.
    Matrix block(int bi, int bj) const {
        int n = ring_.block_n();
        Matrix b(ring_.scalar(), n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b.set(i, j, at(bi * n + i, bj * n + j));
        return b;
    }

    void set_block(int bi, int bj, const Matrix& b) {
        int n = ring_.block_n();
        require(b.rows() == n && b.cols() == n, errc::dimension_mismatch, "block size mismatch");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) set(bi * n + i, bj * n + j, b.at(i, j));
    }

    Matrix submatrix(int i0, int j0, int r, int c) const {
        Matrix s(ring_.is_matrix_ring() ? ring_.scalar() : ring_, r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) s.set(i, j, at(i0 + i, j0 + j));
        return s;
    }

    /// Pads to dim x dim with an identity tail (top-left embedding).
    Matrix embed(int dim) const {
        require(square() && dim >= rows_, errc::dimension_mismatch, "embed: bad target size");
        Matrix m(ring_.is_matrix_ring() ? ring_.scalar() : ring_, dim, dim);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m.set(i, j, at(i, j));
        for (int i = rows_; i < dim; ++i) m.set(i, i, 1);
        return m;
    }

    Matrix transpose() const {
        Matrix t(ring_, cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
        return t;
    }

    bool operator==(const Matrix& o) const {
        return ring_ == o.ring_ && rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    /// Equality of the flat entries, ignoring block tags.
    bool same_entries(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }

    bool is_zero() const {
        for (const Int& v : e_)
            if (v != 0) return false;
        return true;
    }

    bool is_identity() const {
        if (!square()) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                if (at(i, j) != (i == j ? 1 : 0)) return false;
        return true;
    }

    Matrix operator*(const Matrix& o) const {
        require(ring_ == o.ring_, errc::ring_mismatch, "mat_mul: ring mismatch");
        require(cols_ == o.rows_, errc::dimension_mismatch, "mat_mul: dimension mismatch");
        Matrix p(ring_, rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Int& a = at(i, k);
                if (a == 0) continue;
                for (int j = 0; j < o.cols_; ++j) {
                    const Int& b = o.at(k, j);
                    if (b != 0) p.e_[p.idx(i, j)] += a * b;
                }
            }
        if (ring_.scalar_is_modular()) p.reduce_all();
        return p;
    }

    Matrix operator+(const Matrix& o) const { return addsub(o, 1); }
    Matrix operator-(const Matrix& o) const { return addsub(o, -1); }

    Matrix operator-() const {
        Matrix m = *this;
        for (Int& v : m.e_) v = -v;
        if (ring_.scalar_is_modular()) m.reduce_all();
        return m;
    }

    Matrix scaled(const Int& c) const {
        Matrix m = *this;
        for (Int& v : m.e_) v *= c;
        if (ring_.scalar_is_modular()) m.reduce_all();
        return m;
    }

    /// Exact determinant of the flat matrix (Bareiss; reduced mod q when modular).
    Int det() const {
        require(square(), errc::dimension_mismatch, "det: matrix not square");
        int n = rows_;
        if (n == 0) return 1;
        std::vector<Int> a = e_; // works on the integer lift
        auto el = [&](int i, int j) -> Int& { return a[static_cast<std::size_t>(i) * n + j]; };
        Int sign = 1, prev = 1;
        for (int k = 0; k < n - 1; ++k) {
            if (el(k, k) == 0) {
                int piv = -1;
                for (int i = k + 1; i < n; ++i)
                    if (el(i, k) != 0) {
                        piv = i;
                        break;
                    }
                if (piv < 0) return 0;
                for (int j = 0; j < n; ++j) std::swap(el(k, j), el(piv, j));
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i) {
                for (int j = k + 1; j < n; ++j)
                    el(i, j) = (el(i, j) * el(k, k) - el(i, k) * el(k, j)) / prev;
                el(i, k) = 0;
            }
            prev = el(k, k);
        }
        Int d = sign * el(n - 1, n - 1);
        if (ring_.scalar_is_modular()) d = mod_floor(d, ring_.scalar_modulus());
        return d;
    }

    /// Exact inverse when it exists in the same ring: over Z iff det = +-1,
    /// over Z/q iff gcd(det, q) = 1. nullopt signals a non-unit.
    std::optional<Matrix> try_inverse() const {
        require(square(), errc::dimension_mismatch, "inverse: matrix not square");
        int n = rows_;
        if (ring_.scalar_is_modular()) {
            Int d = det();
            const Int& q = ring_.scalar_modulus();
            if (gcd(d, q) != 1) return std::nullopt;
            // adj = det * A^-1 over Q is integral; reduce det^-1 * adj mod q.
            Matrix lift = *this;
            lift.ring_ = RingDesc::Z();
            auto rat = lift.rational_inverse();
            if (!rat) {
                // The integer lift can be Q-singular only when det = 0 mod q,
                // which gcd(d, q) = 1 already excludes.
                return std::nullopt;
            }
            Int dz = lift.det();
            Matrix inv(ring_, n, n);
            Int dinv = inv_mod(d, q);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Rat adj = (*rat)[static_cast<std::size_t>(i) * n + j] * dz;
                    require(denominator(adj) == 1, errc::not_invertible, "internal: adjugate not integral");
                    inv.set(i, j, dinv * numerator(adj));
                }
            return inv;
        }
        auto rat = rational_inverse();
        if (!rat) return std::nullopt;
        Matrix inv(ring_, n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Rat& v = (*rat)[static_cast<std::size_t>(i) * n + j];
                if (denominator(v) != 1) return std::nullopt; // det not a unit
                inv.set(i, j, numerator(v));
            }
        return inv;
    }

    Matrix inverse() const {
        auto inv = try_inverse();
        require(inv.has_value(), errc::not_invertible, "matrix is not invertible over " + ring_.str());
        return *inv;
    }

    std::string str() const {
        std::ostringstream os;
        os << "[";
        for (int i = 0; i < rows_; ++i) {
            os << (i ? "; " : "");
            for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << at(i, j).str();
        }
        os << "]";
        return os.str();
    }

    std::size_t max_entry_bits() const {
        std::size_t b = 0;
        for (const Int& v : e_) b = std::max(b, static_cast<std::size_t>(msb(abs(v) + 1)) + 1);
        return b;
    }

  private:
    std::size_t idx(int i, int j) const {
        require(i >= 0 && i < rows_ && j >= 0 && j < cols_, errc::dimension_mismatch,
                "entry index out of range");
        return static_cast<std::size_t>(i) * cols_ + j;
    }

    void check_block_shape() const {
        if (ring_.is_matrix_ring()) {
            int n = ring_.block_n();
            require(rows_ % n == 0 && cols_ % n == 0, errc::dimension_mismatch,
                    "matrix-ring shape not divisible by block size");
        }
    }

    void reduce_all() {
        const Int& q = ring_.scalar_modulus();
        for (Int& v : e_) v = mod_floor(v, q);
    }

    Matrix addsub(const Matrix& o, int s) const {
        require(ring_ == o.ring_, errc::ring_mismatch, "add/sub: ring mismatch");
        require(rows_ == o.rows_ && cols_ == o.cols_, errc::dimension_mismatch,
                "add/sub: dimension mismatch");
        Matrix m = *this;
        for (std::size_t k = 0; k < e_.size(); ++k) m.e_[k] += s * o.e_[k];
        if (ring_.scalar_is_modular()) m.reduce_all();
        return m;
    }

    // Gauss-Jordan over exact rationals; nullopt when singular over Q.
    std::optional<std::vector<Rat>> rational_inverse() const {
        int n = rows_;
        std::vector<Rat> a(static_cast<std::size_t>(n) * 2 * n);
        auto el = [&](int i, int j) -> Rat& { return a[static_cast<std::size_t>(i) * 2 * n + j]; };
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) el(i, j) = Rat(at(i, j));
            el(i, n + i) = 1;
        }
        for (int k = 0; k < n; ++k) {
            int piv = -1;
            for (int i = k; i < n; ++i)
                if (el(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return std::nullopt;
            if (piv != k)
                for (int j = 0; j < 2 * n; ++j) std::swap(el(k, j), el(piv, j));
            Rat d = el(k, k);
            for (int j = 0; j < 2 * n; ++j) el(k, j) /= d;
            for (int i = 0; i < n; ++i) {
                if (i == k || el(i, k) == 0) continue;
                Rat f = el(i, k);
                for (int j = 0; j < 2 * n; ++j) el(i, j) -= f * el(k, j);
            }
        }
        std::vector<Rat> inv(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) inv[static_cast<std::size_t>(i) * n + j] = el(i, n + j);
        return inv;
    }

    RingDesc ring_;
    int rows_ = 0, cols_ = 0;
    std::vector<Int> e_;
};

inline Matrix mat_mul(const Matrix& a, const Matrix& b) { return a * b; }
inline Matrix mat_inv_exact(const Matrix& m) { return m.inverse(); }

/// det = 1 membership test for the elementary group (size >= 3 over Z).
inline bool is_in_el(const Matrix& m) {
    return m.square() && m.rows() >= 3 && m.det() == 1;
}

/// Stacks blocks vertically (all must share ring and column count).
inline Matrix vstack(const std::vector<Matrix>& parts) {
    require(!parts.empty(), errc::malformed_input, "vstack: empty");
    int cols = parts[0].cols(), rows = 0;
    for (const Matrix& p : parts) {
        require(p.cols() == cols, errc::dimension_mismatch, "vstack: column mismatch");
        rows += p.rows();
    }
    Matrix m(parts[0].ring().is_matrix_ring() ? parts[0].ring().scalar() : parts[0].ring(), rows, cols);
    int r0 = 0;
    for (const Matrix& p : parts) {
        for (int i = 0; i < p.rows(); ++i)
            for (int j = 0; j < cols; ++j) m.set(r0 + i, j, p.at(i, j));
        r0 += p.rows();
    }
    return m;
}

} // namespace elgen
