#pragma once

#include <string>
#include <vector>

#include "elgen/errors.hpp"
#include "elgen/integers.hpp"
#include "elgen/matrix.hpp"
#include "elgen/ring.hpp"

namespace elgen {

enum class Side { left, right };
enum class Level { base, block };

/// One elementary matrix e_ij(r), tagged with the level it lives at: base
/// (r a scalar) or block (r an n x n matrix over the scalar ring).
struct ElemFactor {
    int i = 1, j = 2;  // 1-based, in level units
    Matrix coeff;      // 1x1 at base level, n x n at block level
    int size = 0;      // ambient dimension in level units
    Level level = Level::base;
    int block_n = 1;
    Side side = Side::left;
};

struct Word {
    RingDesc scalar_ring;
    int size = 0;
    Level level = Level::base;
    int block_n = 1;
    std::vector<ElemFactor> factors;

    int flat_dim() const { return size * block_n; }

    static Word empty(const RingDesc& scalar_ring, int size, Level level, int block_n) {
        return Word{scalar_ring, size, level, block_n, {}};
    }
};

/// Builds e_ij(r) as a flat matrix; r is scalar (1x1) or a block entry.
inline Matrix elem(int i, int j, const Matrix& r, int size) {
    require(i != j, errc::malformed_input, "elem: i and j must differ");
    require(i >= 1 && j >= 1 && i <= size && j <= size, errc::malformed_input,
            "elem: index out of range");
    int n = r.rows();
    require(r.rows() == r.cols(), errc::dimension_mismatch, "elem: block entry must be square");
    Matrix m = Matrix::identity(r.ring().is_matrix_ring() ? r.ring().scalar() : r.ring(), size * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m.set((i - 1) * n + a, (j - 1) * n + b, r.at(a, b));
    return m;
}

inline Matrix elem(int i, int j, const Int& r, int size, const RingDesc& ring) {
    Matrix c(ring.is_matrix_ring() ? ring.scalar() : ring, 1, 1);
    c.set(0, 0, r);
    return elem(i, j, c, size);
}

inline Matrix factor_matrix(const ElemFactor& f) { return elem(f.i, f.j, f.coeff, f.size); }

inline Matrix eval_word(const Word& w) {
    Matrix acc = Matrix::identity(w.scalar_ring, w.flat_dim());
    for (const ElemFactor& f : w.factors) {
        require(f.size == w.size && f.block_n == w.block_n, errc::dimension_mismatch,
                "word factor has inconsistent shape");
        acc = acc * factor_matrix(f);
    }
    return acc;
}

/// Reverses the order and negates each coefficient, so that
/// eval(invert_word(w)) = eval(w)^-1.
inline Word invert_word(const Word& w) {
    Word inv = w;
    inv.factors.clear();
    for (auto it = w.factors.rbegin(); it != w.factors.rend(); ++it) {
        ElemFactor f = *it;
        f.coeff = -f.coeff;
        inv.factors.push_back(std::move(f));
    }
    return inv;
}

/// Appends e_ij(coeff) unless the coefficient is zero (identity factors are
/// never stored).
inline void push_factor(Word& w, int i, int j, Matrix coeff, Side side) {
    if (coeff.is_zero()) return;
    require(i != j, errc::malformed_input, "word factor needs i != j");
    w.factors.push_back(ElemFactor{i, j, std::move(coeff), w.size, w.level, w.block_n, side});
}

struct GenSet {
    std::string name;
    int d = 0; // matrix dimension (in ring units for S_d)
    int l = 0; // ring generator count
    int n = 1; // block size of the ring
    std::vector<Matrix> matrices; // flat, multiset per the defining formula
    int size_distinct = 0;
    std::vector<std::string> notes;

    int size() const { return static_cast<int>(matrices.size()); }
};

namespace detail {

inline int count_distinct(const std::vector<Matrix>& ms) {
    int distinct = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i && !dup; ++j) dup = ms[i].same_entries(ms[j]);
        if (!dup) ++distinct;
    }
    return distinct;
}

} // namespace detail

/// Ring generators of M_n(base): A_i = a_i * E_11 and the cyclic B with
/// super-diagonal ones and (-1)^(n-1) in the lower-left corner.
inline GenSet matring_generators(const RingDesc& base, int n) {
    require(!base.is_matrix_ring(), errc::malformed_input, "matring_generators: scalar base only");
    require(n >= 1, errc::malformed_input, "matring_generators: n >= 1");
    GenSet g;
    g.name = "matring_gens";
    g.d = n;
    g.l = base.generator_count();
    g.n = n;
    for (const Int& a : base.scalar_generators()) {
        Matrix A(base, n, n);
        A.set(0, 0, a);
        g.matrices.push_back(A);
    }
    Matrix B(base, n, n);
    for (int i = 0; i + 1 < n; ++i) B.set(i, i + 1, 1);
    B.set(n - 1, 0, (n - 1) % 2 == 0 ? 1 : -1);
    g.matrices.push_back(B);
    g.size_distinct = detail::count_distinct(g.matrices);
    g.notes.push_back("ring generators; the A_i are not invertible");
    return g;
}

/// The set S_d(R): the 2(d^2-d) elementary matrices with +-1 off the
/// diagonal together with the 4l(d-1) matrices e_ij(+-a_m), |i-j| = 1.
/// Emitted as the full multiset of the defining formula; the distinct count
/// is recorded alongside (over Z the +-a_1 part duplicates the +-1 part).
inline GenSet gen_set_S_d(const RingDesc& ring, int d) {
    require(d >= 3, errc::malformed_input, "S_d requires d >= 3");
    int n = ring.block_n();
    GenSet g;
    g.name = "S_d";
    g.d = d;
    g.l = ring.generator_count();
    g.n = n;

    const RingDesc scalar = ring.scalar();
    auto unit_block = [&](int sign) {
        Matrix u = Matrix::identity(scalar, n);
        return sign > 0 ? u : -u;
    };
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            if (i == j) continue;
            g.matrices.push_back(elem(i, j, unit_block(+1), d));
            g.matrices.push_back(elem(i, j, unit_block(-1), d));
        }

    std::vector<Matrix> ring_gens;
    if (ring.is_matrix_ring()) {
        for (const Matrix& a : matring_generators(ring.base(), n).matrices) ring_gens.push_back(a);
    } else {
        for (const Int& a : ring.scalar_generators()) {
            Matrix m(scalar, 1, 1);
            m.set(0, 0, a);
            ring_gens.push_back(m);
        }
    }
    for (const Matrix& a : ring_gens)
        for (int i = 1; i < d; ++i) {
            g.matrices.push_back(elem(i, i + 1, a, d));
            g.matrices.push_back(elem(i, i + 1, -a, d));
            g.matrices.push_back(elem(i + 1, i, a, d));
            g.matrices.push_back(elem(i + 1, i, -a, d));
        }

    g.size_distinct = detail::count_distinct(g.matrices);
    return g;
}

/// Expands one block-level elementary into a word of at most n^2 base
/// elementaries, all with row indices in block i and column indices in
/// block j (they commute, so any order works).
inline Word expand_block_elementary(const ElemFactor& f) {
    require(f.level == Level::block, errc::malformed_input, "expected a block-level factor");
    int n = f.block_n;
    const RingDesc scalar = f.coeff.ring().is_matrix_ring() ? f.coeff.ring().scalar() : f.coeff.ring();
    Word w = Word::empty(scalar, f.size * n, Level::base, 1);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (f.coeff.at(a, b) == 0) continue;
            Matrix c(scalar, 1, 1);
            c.set(0, 0, f.coeff.at(a, b));
            push_factor(w, (f.i - 1) * n + a + 1, (f.j - 1) * n + b + 1, c, f.side);
        }
    return w;
}

/// Signed transposition moving coordinate 1 to coordinate k (det 1). Used
/// as the fixed conjugator family of the peel step.
inline Matrix signed_swap(int m, int a, int b) {
    require(a != b && a >= 1 && b >= 1 && a <= m && b <= m, errc::malformed_input,
            "signed_swap: bad coordinates");
    Matrix s = Matrix::identity(RingDesc::Z(), m);
    s.set(a - 1, a - 1, 0);
    s.set(b - 1, b - 1, 0);
    s.set(b - 1, a - 1, 1);
    s.set(a - 1, b - 1, -1);
    return s;
}

/// The uniform generating set for SL_m(Z): the 2(d^2-d) signed elementary
/// generators of SL_d(Z) embedded top-left, together with S_4(M_n(Z))
/// flattened (n = floor(m/4)); when m is not a multiple of 4 the fixed peel
/// conjugators are added and the metadata flags the embedding.
inline GenSet uniform_set(int m, int d = 3) {
    require(m >= d && d >= 3, errc::malformed_input, "uniform_set: need m >= d >= 3");
    GenSet g;
    g.name = "uniform";
    g.d = d;
    g.l = 1;
    int n = m / 4;
    g.n = n;

    RingDesc z = RingDesc::Z();
    Matrix one(z, 1, 1);
    one.set(0, 0, 1);
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            if (i == j) continue;
            g.matrices.push_back(elem(i, j, one, d).embed(m));
            g.matrices.push_back(elem(i, j, -one, d).embed(m));
        }
    int k0 = g.size();

    if (n >= 1) {
        GenSet s4 = n == 1 ? gen_set_S_d(z, 4) : gen_set_S_d(RingDesc::matrix_over(z, n), 4);
        for (const Matrix& mmat : s4.matrices) g.matrices.push_back(mmat.embed(m));
        if (n == 1) g.notes.push_back("n=1 degenerates to S_4(Z) with l=1");
    } else {
        g.notes.push_back("m < 4: uniform set degenerates to the SL_d block generators");
    }

    if (m % 4 != 0 && n >= 1) {
        for (int k = m; k > 4 * n; --k) g.matrices.push_back(signed_swap(m, 1, k));
        g.matrices.push_back(signed_swap(m, 1, 2));
        g.notes.push_back("m not divisible by 4: embedded set for 4*floor(m/4) plus peel conjugators");
    }

    g.size_distinct = detail::count_distinct(g.matrices);
    g.notes.push_back("k0=" + std::to_string(k0));
    return g;
}

} // namespace elgen
