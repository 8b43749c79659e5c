#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "elgen/elwords.hpp"
#include "elgen/errors.hpp"
#include "elgen/integers.hpp"
#include "elgen/matrix.hpp"
#include "elgen/normal_form.hpp"
#include "elgen/ring.hpp"
#include "elgen/unimodular.hpp"

namespace elgen {

enum class Strategy { recursive, dv2 };
enum class DecomposeMode { shallow, deep };

inline std::string strategy_name(Strategy s) { return s == Strategy::recursive ? "recursive" : "dv2"; }

namespace detail {

inline bool ring_det_is_one(const Matrix& m) { return m.det() == 1; }

inline bool ring_det_is_unit(const Matrix& m) {
    Int d = m.det();
    if (m.ring().scalar_is_modular()) return gcd(d, m.ring().scalar_modulus()) == 1;
    return abs(d) == 1;
}

inline UniSeq block_seq(const RingDesc& scalar, int n, std::vector<Matrix> blocks) {
    RingDesc ring = n == 1 ? scalar : RingDesc::matrix_over(scalar, n);
    if (n == 1 && scalar.kind() == RingDesc::Kind::modular) ring = scalar;
    return UniSeq{ring, std::move(blocks)};
}

// completion and left-inverse that fold the modulus in for Z/q scalars
inline Matrix ring_complete_stack(const Matrix& top, const Matrix& bottom,
                                  std::vector<Matrix> fixed, const RingDesc& scalar) {
    auto lift = [](const Matrix& m) {
        Matrix z(RingDesc::Z(), m.rows(), m.cols());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) z.set(i, j, m.at(i, j));
        return z;
    };
    if (scalar.kind() == RingDesc::Kind::modular) {
        std::vector<Matrix> fz;
        for (const Matrix& f : fixed) fz.push_back(lift(f));
        fz.push_back(Matrix::identity(RingDesc::Z(), top.cols()).scaled(scalar.scalar_modulus()));
        Matrix t = complete_stack(lift(top), lift(bottom), fz);
        Matrix tq(scalar, t.rows(), t.cols());
        for (int i = 0; i < t.rows(); ++i)
            for (int j = 0; j < t.cols(); ++j) tq.set(i, j, t.at(i, j));
        return tq;
    }
    return complete_stack(top, bottom, fixed);
}

inline Matrix ring_left_inverse(const Matrix& m, const RingDesc& scalar) {
    auto lift = [](const Matrix& x) {
        Matrix z(RingDesc::Z(), x.rows(), x.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) z.set(i, j, x.at(i, j));
        return z;
    };
    if (scalar.kind() == RingDesc::Kind::modular) {
        Matrix qi = Matrix::identity(RingDesc::Z(), m.cols()).scaled(scalar.scalar_modulus());
        auto li = left_inverse(vstack({lift(m), qi}));
        require(li.has_value(), errc::not_unimodular, "left inverse does not exist modulo q");
        Matrix x(scalar, m.cols(), m.rows());
        for (int i = 0; i < m.cols(); ++i)
            for (int j = 0; j < m.rows(); ++j) x.set(i, j, li->at(i, j));
        return x;
    }
    auto li = left_inverse(m);
    require(li.has_value(), errc::not_unimodular, "left inverse does not exist");
    return *li;
}

} // namespace detail

// ---------------------------------------------------------------------------
// corner reduction in GL_4 over M_n
// ---------------------------------------------------------------------------

struct CornerResult {
    Word left, right; // eval(left) * M * eval(right) = diag(W, I)
    Matrix W;         // 2n x 2n
};

/// Reduces M in GL_4(M_n) to diag(W, I_2) by at most 20 block-elementary
/// operations: two stable-range passes and a two-term pivot correction put 1
/// in the (4,4) corner (6 ops), six more clear the last row and column, and
/// the same scheme at index 3 costs at most 8.
inline CornerResult corner_reduce_gl4(const Matrix& m_in, int n) {
    require(m_in.square() && m_in.rows() == 4 * n, errc::dimension_mismatch,
            "corner_reduce_gl4: expected a 4n x 4n matrix");
    const RingDesc scalar = m_in.ring().is_matrix_ring() ? m_in.ring().scalar() : m_in.ring();
    require(detail::ring_det_is_unit(m_in), errc::not_invertible,
            "corner_reduce_gl4: matrix is not invertible");

    Matrix a = m_in;
    if (a.ring().is_matrix_ring()) a = a.block_join();
    std::vector<ElemFactor> left_ops; // in application order
    Word right = Word::empty(scalar, 4, Level::block, n);

    auto blk = [&](const Matrix& mat, int bi, int bj) { // 1-based block index
        return mat.block_view(n).block(bi - 1, bj - 1);
    };
    auto apply_left = [&](int i, int j, const Matrix& coeff) {
        if (coeff.is_zero()) return;
        a = elem(i, j, coeff, 4) * a;
        left_ops.push_back(ElemFactor{i, j, coeff, 4, Level::block, n, Side::left});
    };
    auto apply_right = [&](int i, int j, const Matrix& coeff) {
        if (coeff.is_zero()) return;
        a = a * elem(i, j, coeff, 4);
        push_factor(right, i, j, coeff, Side::right);
    };

    const Matrix id_n = Matrix::identity(scalar, n);

    for (int k = 4; k >= 3; --k) {
        // active leading k x k block; the tail is already identity
        Matrix lead = a.submatrix(0, 0, k * n, k * n);
        bool col_ok = true, row_ok = true;
        for (int i = 1; i <= k; ++i) {
            Matrix ci = blk(a, i, k), ri = blk(a, k, i);
            if (i == k) {
                col_ok = col_ok && ci.is_identity();
                row_ok = row_ok && ri.is_identity();
            } else {
                col_ok = col_ok && ci.is_zero();
                row_ok = row_ok && ri.is_zero();
            }
        }
        if (col_ok && row_ok) continue;

        if (!blk(a, k, k).is_identity() || !col_ok) {
            Matrix inv = lead.inverse();
            std::vector<Matrix> acol, brow;
            for (int i = 1; i <= k; ++i) {
                acol.push_back(blk(a, i, k));
                brow.push_back(inv.block_view(n).block(k - 1, i - 1));
            }
            Matrix c = Matrix::zero(scalar, n, n);
            for (int i = 3; i <= k; ++i) c = c + brow[i - 1] * acol[i - 1];

            UniSeq pair = detail::block_seq(scalar, n, {acol[0], acol[1]});
            Matrix t1 = Matrix::zero(scalar, n, n), t2 = Matrix::zero(scalar, n, n);
            if (!is_unimodular(pair)) {
                UniSeq triple = detail::block_seq(scalar, n, {acol[0], acol[1], c});
                Reduction red = reduce_unimodular(triple);
                t1 = red.coefficients[0];
                t2 = red.coefficients[1];
            }
            // R_1 <- R_1 + t1*b_i R_i realizes a_1 <- a_1 + t1*c, same for R_2
            for (int i = k; i >= 3; --i) apply_left(1, i, t1 * brow[i - 1]);
            for (int i = k; i >= 3; --i) apply_left(2, i, t2 * brow[i - 1]);

            Matrix a1p = blk(a, 1, k), a2p = blk(a, 2, k);
            auto bz = bezout(detail::block_seq(scalar, n, {a1p, a2p}));
            Matrix kco = id_n - blk(a, k, k);
            apply_left(k, 1, kco * bz.coefficients[0]);
            apply_left(k, 2, kco * bz.coefficients[1]);
        }
        require(blk(a, k, k).is_identity(), errc::not_invertible,
                "corner_reduce_gl4: pivot creation failed");

        for (int i = 1; i < k; ++i) apply_left(i, k, -blk(a, i, k));
        for (int j = 1; j < k; ++j) apply_right(k, j, -blk(a, k, j));
    }

    Word left = Word::empty(scalar, 4, Level::block, n);
    for (auto it = left_ops.rbegin(); it != left_ops.rend(); ++it) left.factors.push_back(*it);
    Matrix w = a.submatrix(0, 0, 2 * n, 2 * n);
    return CornerResult{std::move(left), std::move(right), std::move(w)};
}

// ---------------------------------------------------------------------------
// block ULUL descent
// ---------------------------------------------------------------------------

struct UlulResult {
    Matrix U1, L1, U2, L2, Wp; // W = U1 L1 U2 L2 diag(Wp, I)
};

/// W = U1 L1 U2 L2 diag(W', I_{s2}) with the U's of shape [I *; 0 I] and the
/// L's of shape [I 0; * I] in the (s1, s2) block split. The first U makes the
/// top-right block left-invertible (a stable-range completion), the rest is
/// exact: a left inverse turns the bottom-right block into I, and the final
/// row clear inverts W' over the ring.
inline UlulResult block_ulul(const Matrix& w, int s1, int s2) {
    require(w.square() && w.rows() == s1 + s2, errc::dimension_mismatch, "block_ulul: bad split");
    require(s1 >= s2 && s2 >= 1 && s1 >= 2, errc::dimension_mismatch,
            "block_ulul: need s1 >= max(s2, 2)");
    const RingDesc ring = w.ring().is_matrix_ring() ? w.ring().scalar() : w.ring();
    require(detail::ring_det_is_unit(w), errc::not_invertible, "block_ulul: matrix not invertible");
    int s = s1 + s2;

    Matrix P = w.submatrix(0, 0, s1, s1), Q = w.submatrix(0, s1, s1, s2);
    Matrix R = w.submatrix(s1, 0, s2, s1), S = w.submatrix(s1, s1, s2, s2);
    Matrix I1 = Matrix::identity(ring, s1), I2 = Matrix::identity(ring, s2);

    auto assemble_u = [&](const Matrix& blk) {
        Matrix u = Matrix::identity(ring, s);
        for (int i = 0; i < s1; ++i)
            for (int j = 0; j < s2; ++j) u.set(i, s1 + j, blk.at(i, j));
        return u;
    };
    auto assemble_l = [&](const Matrix& blk) {
        Matrix l = Matrix::identity(ring, s);
        for (int i = 0; i < s2; ++i)
            for (int j = 0; j < s1; ++j) l.set(s1 + i, j, blk.at(i, j));
        return l;
    };

    if (Q.is_zero() && R.is_zero() && S.is_identity())
        return UlulResult{Matrix::identity(ring, s), Matrix::identity(ring, s),
                          Matrix::identity(ring, s), Matrix::identity(ring, s), P};

    Matrix T = detail::ring_complete_stack(Q, S, {}, ring);
    Matrix Qt = Q + T * S;
    Matrix X = detail::ring_left_inverse(Qt, ring);
    Matrix Pt = P + T * R;
    Matrix beta = (S - I2) * X;
    Matrix Rt = R - beta * Pt;
    Matrix Wp = Pt - Qt * Rt;
    Matrix delta = Rt * Wp.inverse();

    return UlulResult{assemble_u(-T), assemble_l(beta), assemble_u(Qt), assemble_l(delta), Wp};
}

// ---------------------------------------------------------------------------
// commutator identities
// ---------------------------------------------------------------------------

/// Fixed unit family: direct sums of the companion matrix of x^2 - x - 1
/// (and one copy of the x^3 - x - 1 companion when the size is odd); both A
/// and A - I have determinant +-1, so (A - I) is invertible over the ring.
inline Matrix companion_unit(const RingDesc& ring, int k) {
    require(k >= 2, errc::malformed_input, "companion_unit: size must be >= 2");
    Matrix a = Matrix::zero(ring.is_matrix_ring() ? ring.scalar() : ring, k, k);
    int pos = 0;
    if (k % 2 == 1) {
        // companion of x^3 - x - 1
        a.set(0, 2, 1);
        a.set(1, 0, 1);
        a.set(1, 2, 1);
        a.set(2, 1, 1);
        pos = 3;
    }
    for (; pos < k; pos += 2) {
        a.set(pos, pos + 1, 1);
        a.set(pos + 1, pos, 1);
        a.set(pos + 1, pos + 1, 1);
    }
    return a;
}

struct CommutatorPair {
    Matrix g, h; // [g, h] = g h g^-1 h^-1 equals the input block-unitriangular
};

/// Expresses a block-unitriangular matrix as a single commutator:
/// g = diag(A, I) for the fixed unit A, and h unitriangular with
/// C = (A - I)^-1 B (upper case) or C = B (A^-1 - I)^-1 (lower case).
inline CommutatorPair block_unitriangular_to_commutator(const Matrix& v, int s1, int s2,
                                                        int ambient) {
    require(v.square() && v.rows() == s1 + s2, errc::malformed_input,
            "commutator: matrix does not match the split");
    require(s1 >= 2, errc::malformed_input, "commutator: need s1 >= 2");
    require(ambient >= s1 + s2, errc::dimension_mismatch, "commutator: ambient too small");
    const RingDesc ring = v.ring().is_matrix_ring() ? v.ring().scalar() : v.ring();

    Matrix tl = v.submatrix(0, 0, s1, s1), br = v.submatrix(s1, s1, s2, s2);
    Matrix up = v.submatrix(0, s1, s1, s2), lo = v.submatrix(s1, 0, s2, s1);
    require(tl.is_identity() && br.is_identity(), errc::malformed_input,
            "commutator: diagonal blocks must be identity");
    bool upper = lo.is_zero(), lower = up.is_zero();
    require(upper || lower, errc::malformed_input, "commutator: matrix is not block-unitriangular");

    if (up.is_zero() && lo.is_zero()) {
        Matrix id = Matrix::identity(ring, ambient);
        return CommutatorPair{id, id};
    }

    Matrix A = companion_unit(ring, s1);
    Matrix g = Matrix::identity(ring, ambient);
    for (int i = 0; i < s1; ++i)
        for (int j = 0; j < s1; ++j) g.set(i, j, A.at(i, j));

    Matrix h = Matrix::identity(ring, ambient);
    if (upper) {
        Matrix c = (A - Matrix::identity(ring, s1)).inverse() * up;
        for (int i = 0; i < s1; ++i)
            for (int j = 0; j < s2; ++j) h.set(i, s1 + j, c.at(i, j));
    } else {
        Matrix c = lo * (A.inverse() - Matrix::identity(ring, s1)).inverse();
        for (int i = 0; i < s2; ++i)
            for (int j = 0; j < s1; ++j) h.set(s1 + i, j, c.at(i, j));
    }
    return CommutatorPair{std::move(g), std::move(h)};
}

/// diag(h, h^-1) = [1 h][1 0; -h^-1 1][1 h-1][1 0; 1 1][1 -1], as five
/// block-unitriangular 2k x 2k factors.
inline std::vector<Matrix> whitehead_diag5(const Matrix& h) {
    require(h.square(), errc::dimension_mismatch, "whitehead_diag5: h must be square");
    const RingDesc ring = h.ring().is_matrix_ring() ? h.ring().scalar() : h.ring();
    int k = h.rows();
    Matrix hinv = h.inverse();
    Matrix id = Matrix::identity(ring, k);
    auto upper = [&](const Matrix& x) {
        Matrix m = Matrix::identity(ring, 2 * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m.set(i, k + j, x.at(i, j));
        return m;
    };
    auto lower = [&](const Matrix& x) {
        Matrix m = Matrix::identity(ring, 2 * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m.set(k + i, j, x.at(i, j));
        return m;
    };
    return {upper(h), lower(-hinv), upper(h - id), lower(id), upper(-id)};
}

/// [0 h; -h^-1 0] = [I h; 0 I][I 0; -h^-1 I][I h; 0 I].
inline std::vector<Matrix> antidiag3(const Matrix& h) {
    require(h.square(), errc::dimension_mismatch, "antidiag3: h must be square");
    const RingDesc ring = h.ring().is_matrix_ring() ? h.ring().scalar() : h.ring();
    int k = h.rows();
    Matrix hinv = h.inverse();
    auto upper = [&](const Matrix& x) {
        Matrix m = Matrix::identity(ring, 2 * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m.set(i, k + j, x.at(i, j));
        return m;
    };
    auto lower = [&](const Matrix& x) {
        Matrix m = Matrix::identity(ring, 2 * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m.set(k + i, j, x.at(i, j));
        return m;
    };
    return {upper(h), lower(-hinv), upper(h)};
}

/// Word of at most 40 block elementaries in EL_4(M_n) whose product is
/// diag([g, h], I): two antidiagonal 3-chains and the Whitehead 5-chain for
/// (hg)^-1, each 2x2-block factor split into at most four elementaries (the
/// +-1 factors of the Whitehead chain cost two each).
inline Word commutator_expand40(const Matrix& g, const Matrix& h, int n) {
    require(g.square() && g.rows() == 2 * n && h.square() && h.rows() == 2 * n,
            errc::dimension_mismatch, "commutator_expand40: g, h must be 2n x 2n");
    const RingDesc ring = g.ring().is_matrix_ring() ? g.ring().scalar() : g.ring();
    Word w = Word::empty(ring, 4, Level::block, n);
    if (g.is_identity() && h.is_identity()) return w;

    Matrix z = (h * g).inverse();

    // factors in the (2,2) super-block split; bool = upper
    std::vector<std::pair<Matrix, bool>> chain;
    auto push_anti = [&](const Matrix& x) {
        chain.emplace_back(x, true);
        chain.emplace_back(-x.inverse(), false);
        chain.emplace_back(x, true);
    };
    push_anti(g);
    push_anti(-h.inverse());
    Matrix id2n = Matrix::identity(ring, 2 * n);
    chain.emplace_back(z, true);
    chain.emplace_back(-z.inverse(), false);
    chain.emplace_back(z - id2n, true);
    chain.emplace_back(id2n, false);
    chain.emplace_back(-id2n, true);

    for (auto& [x, up] : chain) {
        Matrix xb = x.block_view(n);
        for (int bi = 0; bi < 2; ++bi)
            for (int bj = 0; bj < 2; ++bj) {
                Matrix blkv = xb.block(bi, bj);
                if (blkv.is_zero()) continue;
                int i = up ? bi + 1 : bi + 3;
                int j = up ? bj + 3 : bj + 1;
                push_factor(w, i, j, blkv, Side::left);
            }
    }
    return w;
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

struct CommStage {
    Matrix g, h; // 2n x 2n
    Word word;   // product = diag([g,h], I) at 4n
};

struct PeelFactor {
    Side side = Side::left;
    Matrix conjugator, element; // reconstruction factor = conj * element * conj^-1
};

struct Counts {
    long elementary_block = 0;
    long elementary_base = 0;
    long commutators = 0;
    long peel_factors = 0;
    long max_coeff_bits = 0; // coefficient growth is unbounded in principle; report it
};

struct Certificate {
    Matrix input;
    int target_d = 3;
    Strategy strategy = Strategy::recursive;
    DecomposeMode mode = DecomposeMode::shallow;

    std::vector<PeelFactor> peel_left, peel_right;
    std::vector<int> peel_index_counts;

    int pipeline_dim = 0; // 4n where the corner/commutator stages act; 0 if none
    Word corner_left, corner_right;
    std::vector<CommStage> commutators;

    Matrix residue;           // target_d x target_d
    int residue_core_dim = 0; // actual size before embedding

    Counts counts;
    std::vector<std::shared_ptr<Certificate>> children; // deep mode
};

inline long word_base_count(const Word& w) {
    long c = 0;
    for (const ElemFactor& f : w.factors)
        for (int i = 0; i < f.coeff.rows(); ++i)
            for (int j = 0; j < f.coeff.cols(); ++j)
                if (f.coeff.at(i, j) != 0) ++c;
    return c;
}

inline long recursive_strategy_k_bound(int two_n, int d_hat) {
    long k = 0;
    long lhs = d_hat;
    while (lhs < two_n) {
        lhs *= 2;
        ++k;
    }
    return 4 * k + 4;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

/// Full EL_4(M_n) pipeline: corner reduction (<= 20 block elementaries),
/// ULUL descent of the 2n x 2n core with every block-unitriangular factor
/// rewritten as one commutator and expanded into <= 40 block elementaries,
/// and a d x d residue.
inline Certificate pipeline_el4n(const Matrix& t, int d = 3,
                                 Strategy strategy = Strategy::recursive) {
    require(t.square(), errc::dimension_mismatch, "pipeline: square input required");
    int dim = t.rows();
    require(dim % 4 == 0 && dim >= 4, errc::dimension_mismatch,
            "pipeline: dimension must be a positive multiple of 4");
    int n = dim / 4;
    require(d >= 3 && dim > d, errc::dimension_mismatch, "pipeline: need 4n > d >= 3");
    require(detail::ring_det_is_one(t), errc::not_in_sl, "pipeline: determinant must be 1");
    require(strategy == Strategy::recursive, errc::unsupported,
            "pipeline: the dv2 strategy is a declared extension point and is not provided");
    const RingDesc scalar = t.ring().is_matrix_ring() ? t.ring().scalar() : t.ring();

    Certificate cert;
    cert.input = t;
    cert.target_d = d;
    cert.strategy = strategy;
    cert.pipeline_dim = dim;

    CornerResult corner = corner_reduce_gl4(t, n);
    cert.corner_left = corner.left;
    cert.corner_right = corner.right;

    Matrix cur = corner.W;
    int s = 2 * n;
    while (s > d && s >= 4) {
        int s2 = (s - 1) / 2, s1 = s - s2; // uneven split keeps the completion target tall
        UlulResult u = block_ulul(cur, s1, s2);
        for (const Matrix* v : {&u.U1, &u.L1, &u.U2, &u.L2}) {
            if (v->is_identity()) continue;
            CommutatorPair pair = block_unitriangular_to_commutator(*v, s1, s2, 2 * n);
            Word word = commutator_expand40(pair.g, pair.h, n);
            cert.commutators.push_back(CommStage{pair.g, pair.h, std::move(word)});
        }
        cur = u.Wp;
        s = s1;
    }

    cert.residue_core_dim = s;
    require(s <= d, errc::dimension_mismatch, "pipeline: descent did not reach the residue size");
    cert.residue = cur.embed(d);

    cert.counts.commutators = static_cast<long>(cert.commutators.size());
    cert.counts.elementary_block = static_cast<long>(cert.corner_left.factors.size()) +
                                   static_cast<long>(cert.corner_right.factors.size());
    cert.counts.elementary_base =
        word_base_count(cert.corner_left) + word_base_count(cert.corner_right);
    long bits = 0;
    auto scan_word = [&bits](const Word& w) {
        for (const ElemFactor& f : w.factors)
            bits = std::max(bits, static_cast<long>(f.coeff.max_entry_bits()));
    };
    scan_word(cert.corner_left);
    scan_word(cert.corner_right);
    for (const CommStage& st : cert.commutators) {
        cert.counts.elementary_block += static_cast<long>(st.word.factors.size());
        cert.counts.elementary_base += word_base_count(st.word);
        scan_word(st.word);
    }
    cert.counts.max_coeff_bits = bits;
    (void)scalar;
    return cert;
}

// ---------------------------------------------------------------------------
// dimension peeling
// ---------------------------------------------------------------------------

struct PeelCertificate {
    Matrix input;
    int target_dim = 0;
    std::vector<PeelFactor> left, right; // reconstruction order
    std::vector<int> per_index_counts;
    Matrix residue; // target_dim x target_dim
};

namespace detail {

// CRT choice: smallest non-negative r avoiding head + r * mult = 0 mod p for
// each prime p in obstruction; primes dividing mult are skipped by callers.
inline Int crt_avoid(const std::vector<Int>& primes, const Int& head, const Int& mult) {
    std::vector<Int> residues, moduli;
    for (const Int& p : primes) {
        Int bad = mod_floor(-head * inv_mod(mod_floor(mult, p), p), p);
        residues.push_back(bad == 0 ? 1 : 0);
        moduli.push_back(p);
    }
    return residues.empty() ? Int(0) : crt(residues, moduli);
}

} // namespace detail

/// Peels dimensions m, m-1, ... down to max(4*floor(m/4), d), reducing the
/// last row and column to the unit vector with at most B_peel = 8 group
/// factors per peeled index. Every factor lies in the embedded EL_{k-1}
/// (lower right, fixing the first coordinate) or in one of its two fixed
/// conjugates: by the signed swap (1 k) for operations inside the leading
/// k-1 coordinates and by the signed swap (1 2) for the corner positions.
/// The stage list per index is fixed (identity stages are recorded), so the
/// factor count per index does not depend on the starting dimension.
inline PeelCertificate peel_dimension(const Matrix& t, int d = 3) {
    require(t.square(), errc::dimension_mismatch, "peel: square input required");
    int m = t.rows();
    require(m > std::max(d, 2), errc::dimension_mismatch, "peel: m must exceed max(d, 2)");
    require(detail::ring_det_is_one(t), errc::not_in_sl, "peel: determinant must be 1");
    const RingDesc ring = t.ring().is_matrix_ring() ? t.ring().scalar() : t.ring();
    bool modular = ring.kind() == RingDesc::Kind::modular;

    PeelCertificate cert;
    cert.input = t;
    cert.target_dim = std::max(4 * (m / 4), d);

    Matrix cur = t;
    Matrix tau = Matrix::identity(ring, m);
    {
        Matrix sw = signed_swap(m, 1, 2);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) tau.set(i, j, sw.at(i, j));
    }
    Matrix idm = Matrix::identity(ring, m);

    auto apply_op_left = [&](const Matrix& op, const Matrix& conj) {
        cur = op * cur;
        cert.left.push_back(PeelFactor{Side::left, conj, conj.inverse() * op.inverse() * conj});
    };
    auto apply_op_right = [&](const Matrix& op, const Matrix& conj) {
        cur = cur * op;
        cert.right.insert(cert.right.begin(),
                          PeelFactor{Side::right, conj, conj.inverse() * op.inverse() * conj});
    };

    for (int k = m; k > cert.target_dim; --k) {
        Matrix sigma = Matrix::identity(ring, m);
        {
            Matrix sw = signed_swap(m, 1, k);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) sigma.set(i, j, sw.at(i, j));
        }
        bool trivial = true;
        for (int i = 1; i <= k; ++i) {
            if (cur.at(i - 1, k - 1) != (i == k ? 1 : 0)) trivial = false;
            if (cur.at(k - 1, i - 1) != (i == k ? 1 : 0)) trivial = false;
        }
        if (trivial) {
            cert.per_index_counts.push_back(0);
            continue;
        }
        int emitted = 0;
        auto column = [&](int i) { return cur.at(i - 1, k - 1); };

        // gcd of the middle entries a_3..a_{k-1}
        auto middle_gcd = [&]() {
            Int g = 0;
            for (int i = 3; i < k; ++i) g = gcd(g, column(i));
            return g;
        };
        auto ring_gcd = [&](const Int& g) { return modular ? gcd(g, ring.scalar_modulus()) : g; };

        // stage 0 (lower right): when the middles are all zero over Z and no
        // unit is reachable in a_2 from a_1 and a_k alone, seed a_3 first
        {
            Matrix op = idm;
            if (!modular && middle_gcd() == 0) {
                Int g1 = gcd(column(1), column(k));
                bool direct = g1 == 0 || (1 - column(2)) % g1 == 0 || (-1 - column(2)) % g1 == 0;
                if (!direct)
                    op = column(2) != 0 ? elem(3, 2, Int(1), m, ring)
                                        : elem(3, k, Int(1), m, ring);
            }
            apply_op_left(op, idm);
            ++emitted;
        }
        // stages 1-2: two stable-range passes on a_2. Primes away from a_k
        // are fixed with a_k (inside the lower right copy), the remaining
        // ones with a_1 (inside the swap-(1,k) conjugate copy). A column
        // whose middles are identically zero gets an exact unit instead.
        {
            Matrix op1 = idm, op2 = idm;
            Int g = ring_gcd(middle_gcd());
            if (!modular && g == 0) {
                Egcd e = egcd(column(k), column(1));
                Int target = e.g != 0 && (1 - column(2)) % e.g == 0 ? 1 : -1;
                require(e.g != 0 ? (target - column(2)) % e.g == 0 : abs(column(2)) == 1,
                        errc::not_unimodular, "peel: no unit reachable in a degenerate column");
                Int scale = e.g == 0 ? 0 : (target - column(2)) / e.g;
                if (e.x * scale != 0) op1 = elem(2, k, e.x * scale, m, ring);
                if (e.y * scale != 0) op2 = elem(2, 1, e.y * scale, m, ring);
            } else {
                std::vector<Int> ps1, ps2;
                for (const Int& p : prime_divisors(g))
                    (column(k) % p != 0 ? ps1 : ps2).push_back(p);
                Int tc = detail::crt_avoid(ps1, column(2), column(k));
                if (tc != 0) op1 = elem(2, k, tc, m, ring);
            }
            apply_op_left(op1, idm);
            ++emitted;
            if (op2.is_identity() && (modular || ring_gcd(middle_gcd()) != 0)) {
                std::vector<Int> ps;
                for (const Int& p : prime_divisors(ring_gcd(middle_gcd())))
                    if (column(1) % p != 0) ps.push_back(p);
                Int rc = detail::crt_avoid(ps, column(2), column(1));
                if (rc != 0) op2 = elem(2, 1, rc, m, ring);
            }
            apply_op_left(op2, sigma);
            ++emitted;
        }
        // stage 3: one Bezout pass makes the corner 1
        {
            Matrix op = idm;
            if (column(k) != 1) {
                std::vector<Matrix> entries;
                for (int i = 2; i < k; ++i) {
                    Matrix e(ring, 1, 1);
                    e.set(0, 0, column(i));
                    entries.push_back(e);
                }
                UniSeq seq{ring, entries};
                require(is_unimodular(seq), errc::not_unimodular,
                        "peel: stable-range passes failed to make the middles unimodular");
                auto bz = bezout(seq);
                Int need = 1 - column(k);
                op = idm;
                for (int i = 2; i < k; ++i) {
                    Int coeff = bz.coefficients[i - 2].at(0, 0) * need;
                    if (modular) coeff = mod_floor(coeff, ring.scalar_modulus());
                    if (coeff != 0) op = op * elem(k, i, coeff, m, ring);
                }
            }
            apply_op_left(op, idm);
            ++emitted;
        }
        require(column(k) == 1, errc::not_invertible, "peel: corner pivot failed");
        // stage 4: clear the column above the pivot (rows 2..k-1)
        {
            Matrix op = idm;
            for (int i = 2; i < k; ++i)
                if (column(i) != 0) op = op * elem(i, k, -column(i), m, ring);
            apply_op_left(op, idm);
            ++emitted;
        }
        // stage 5: clear a_1 through the (1 2)-conjugate corner copy
        {
            Matrix op = column(1) == 0 ? idm : elem(1, k, -column(1), m, ring);
            apply_op_left(op, tau);
            ++emitted;
        }
        // stages 6-7: clear the last row with column operations
        {
            Matrix op = idm;
            for (int j = 2; j < k; ++j)
                if (cur.at(k - 1, j - 1) != 0) op = op * elem(k, j, -cur.at(k - 1, j - 1), m, ring);
            apply_op_right(op, idm);
            ++emitted;
        }
        {
            Matrix op = cur.at(k - 1, 0) == 0 ? idm : elem(k, 1, -cur.at(k - 1, 0), m, ring);
            apply_op_right(op, tau);
            ++emitted;
        }
        for (int i = 1; i <= k; ++i) {
            require(cur.at(i - 1, k - 1) == (i == k ? 1 : 0), errc::not_invertible,
                    "peel: column not cleared");
            require(cur.at(k - 1, i - 1) == (i == k ? 1 : 0), errc::not_invertible,
                    "peel: row not cleared");
        }
        cert.per_index_counts.push_back(emitted);
    }
    cert.residue = cur.submatrix(0, 0, cert.target_dim, cert.target_dim);
    return cert;
}

// ---------------------------------------------------------------------------
// full decomposition and verification
// ---------------------------------------------------------------------------

inline Certificate decompose_full(const Matrix& t, int d = 3,
                                  DecomposeMode mode = DecomposeMode::shallow,
                                  Strategy strategy = Strategy::recursive) {
    require(t.square(), errc::dimension_mismatch, "decompose: square input required");
    int m = t.rows();
    require(m >= d && d >= 3, errc::dimension_mismatch, "decompose: need m >= d >= 3");
    require(detail::ring_det_is_one(t), errc::not_in_sl, "decompose: determinant must be 1");
    const RingDesc ring = t.ring().is_matrix_ring() ? t.ring().scalar() : t.ring();

    Certificate cert;
    cert.input = t;
    cert.target_d = d;
    cert.strategy = strategy;
    cert.mode = mode;

    Matrix core = t;
    if (m > d && m % 4 != 0) {
        PeelCertificate pc = peel_dimension(t, d);
        cert.peel_left = pc.left;
        cert.peel_right = pc.right;
        cert.peel_index_counts = pc.per_index_counts;
        cert.counts.peel_factors = 0;
        for (int c : pc.per_index_counts) cert.counts.peel_factors += c;
        core = pc.residue;
    }

    int k0 = core.rows();
    if (k0 > d && k0 % 4 == 0) {
        Certificate pipe = pipeline_el4n(core, d, strategy);
        cert.pipeline_dim = pipe.pipeline_dim;
        cert.corner_left = pipe.corner_left;
        cert.corner_right = pipe.corner_right;
        cert.commutators = pipe.commutators;
        cert.residue = pipe.residue;
        cert.residue_core_dim = pipe.residue_core_dim;
        cert.counts.elementary_block = pipe.counts.elementary_block;
        cert.counts.elementary_base = pipe.counts.elementary_base;
        cert.counts.commutators = pipe.counts.commutators;
        cert.counts.max_coeff_bits = pipe.counts.max_coeff_bits;
    } else {
        require(k0 <= d, errc::dimension_mismatch, "decompose: residue larger than d");
        cert.residue = core.embed(d);
        cert.residue_core_dim = k0;
    }

    if (mode == DecomposeMode::deep) {
        auto recurse = [&](std::vector<PeelFactor>& factors) {
            for (PeelFactor& f : factors) {
                int sub_dim = f.element.rows() - 1;
                Matrix sub = f.element.submatrix(1, 1, sub_dim, sub_dim);
                if (sub_dim > d && detail::ring_det_is_one(sub) && !sub.is_identity())
                    cert.children.push_back(std::make_shared<Certificate>(
                        decompose_full(sub, d, DecomposeMode::shallow, strategy)));
            }
        };
        recurse(cert.peel_left);
        recurse(cert.peel_right);
    }
    (void)ring;
    return cert;
}

/// Exact reconstruction plus every recorded count bound. Any tampering with
/// a factor, a word coefficient, or a count makes this return false.
inline bool verify_certificate(const Certificate& cert) {
    try {
        const Matrix& t = cert.input;
        int m = t.rows();
        const RingDesc ring = t.ring().is_matrix_ring() ? t.ring().scalar() : t.ring();

        if (cert.residue.rows() != cert.target_d || cert.residue.det() != 1) return false;

        Matrix core;
        if (cert.pipeline_dim > 0) {
            int dim = cert.pipeline_dim;
            int n = dim / 4;
            // corner words: <= 20 block factors total, on the declared ambient
            if (static_cast<long>(cert.corner_left.factors.size() +
                                  cert.corner_right.factors.size()) > 20)
                return false;
            for (const Word* w : {&cert.corner_left, &cert.corner_right})
                if (w->size != 4 || w->block_n != n) return false;

            long elementary_block = static_cast<long>(cert.corner_left.factors.size() +
                                                      cert.corner_right.factors.size());
            Matrix mid = Matrix::identity(ring, dim);
            for (const CommStage& st : cert.commutators) {
                if (static_cast<long>(st.word.factors.size()) > 40) return false;
                Matrix prod = eval_word(st.word);
                Matrix expected =
                    (st.g * st.h * st.g.inverse() * st.h.inverse()).embed(dim);
                if (prod != expected) return false;
                mid = mid * prod;
                elementary_block += static_cast<long>(st.word.factors.size());
            }
            long k = static_cast<long>(cert.commutators.size());
            if (cert.counts.commutators != k) return false;
            if (cert.counts.elementary_block != elementary_block) return false;
            if (elementary_block > 20 + 40 * k) return false;
            if (cert.strategy == Strategy::recursive && cert.residue_core_dim > 0 &&
                k > recursive_strategy_k_bound(dim / 2, cert.residue_core_dim))
                return false;

            Matrix res_embedded = cert.residue.embed(dim);
            core = eval_word(invert_word(cert.corner_left)) * mid * res_embedded *
                   eval_word(invert_word(cert.corner_right));
        } else {
            core = cert.residue.embed(std::max(cert.target_d, cert.residue.rows()));
        }

        Matrix whole = core.rows() == m ? core : core.embed(m);
        long peel_total = 0;
        for (int c : cert.peel_index_counts) {
            if (c > 8) return false;
            peel_total += c;
        }
        if (cert.counts.peel_factors != peel_total) return false;

        Matrix lhs = Matrix::identity(ring, m);
        for (const PeelFactor& f : cert.peel_left) {
            if (f.element.rows() != m || f.conjugator.rows() != m) return false;
            // element must fix the first coordinate (it lies in the embedded copy)
            for (int i = 1; i < m; ++i)
                if (f.element.at(i, 0) != 0 || f.element.at(0, i) != 0) return false;
            if (f.element.at(0, 0) != 1) return false;
            lhs = lhs * f.conjugator * f.element * f.conjugator.inverse();
        }
        Matrix rhs = Matrix::identity(ring, m);
        for (const PeelFactor& f : cert.peel_right) {
            for (int i = 1; i < m; ++i)
                if (f.element.at(i, 0) != 0 || f.element.at(0, i) != 0) return false;
            if (f.element.at(0, 0) != 1) return false;
            rhs = rhs * f.conjugator * f.element * f.conjugator.inverse();
        }
        if (lhs * whole * rhs != t) return false;

        for (const auto& child : cert.children)
            if (!verify_certificate(*child)) return false;
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace elgen
