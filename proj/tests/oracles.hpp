#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// Laplace determinants, minor-gcd invariant factors, subtraction gcd, a
// dense Jacobi eigensolver, and seeded random word generators.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "elgen/elwords.hpp"
#include "elgen/matrix.hpp"

namespace oracle {

using elgen::Int;
using elgen::Matrix;

// gcd by the schoolbook remainder loop
inline Int gcd_loop(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int r = a % b;
        a = b;
        b = r;
    }
    return a;
}

// Laplace expansion determinant (exponential; keep n small)
inline Int det_laplace(const Matrix& m) {
    int n = m.rows();
    if (n == 1) return m.at(0, 0);
    Int d = 0;
    for (int j = 0; j < n; ++j) {
        if (m.at(0, j) == 0) continue;
        Matrix sub(elgen::RingDesc::Z(), n - 1, n - 1);
        for (int i = 1; i < n; ++i) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                sub.set(i - 1, cc++, m.at(i, c));
            }
        }
        Int term = m.at(0, j) * det_laplace(sub);
        d += (j % 2 == 0) ? term : -term;
    }
    return d;
}

// k-th determinantal divisor: gcd of all k x k minors
inline Int determinantal_divisor(const Matrix& m, int k) {
    std::vector<int> ri(k), ci(k);
    Int g = 0;
    std::vector<int> rows(m.rows()), cols(m.cols());
    for (int i = 0; i < m.rows(); ++i) rows[i] = i;
    for (int j = 0; j < m.cols(); ++j) cols[j] = j;

    std::vector<std::vector<int>> rsets, csets;
    std::vector<int> pick;
    auto gen = [&](auto&& self, int from, int total, std::vector<std::vector<int>>& out) -> void {
        if (static_cast<int>(pick.size()) == k) {
            out.push_back(pick);
            return;
        }
        for (int i = from; i < total; ++i) {
            pick.push_back(i);
            self(self, i + 1, total, out);
            pick.pop_back();
        }
    };
    gen(gen, 0, m.rows(), rsets);
    gen(gen, 0, m.cols(), csets);

    for (auto& rs : rsets)
        for (auto& cs : csets) {
            Matrix sub(elgen::RingDesc::Z(), k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub.set(i, j, m.at(rs[i], cs[j]));
            g = gcd_loop(g, det_laplace(sub));
        }
    return g;
}

// invariant factors from determinantal divisor quotients
inline std::vector<Int> invariant_factors_minors(const Matrix& m) {
    std::vector<Int> f;
    Int prev = 1;
    for (int k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
        Int dk = determinantal_divisor(m, k);
        if (dk == 0) break;
        f.push_back(dk / prev);
        prev = dk;
    }
    return f;
}

// --- random inputs -------------------------------------------------------

inline Matrix random_word_matrix(int dim, int num_factors, std::uint64_t seed, int coeff = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pos(1, dim), cdist(-coeff, coeff);
    Matrix acc = Matrix::identity(elgen::RingDesc::Z(), dim);
    for (int k = 0; k < num_factors; ++k) {
        int i = pos(rng), j = pos(rng);
        while (j == i) j = pos(rng);
        Int c = cdist(rng);
        if (c == 0) c = 1;
        acc = acc * elgen::elem(i, j, c, dim, elgen::RingDesc::Z());
    }
    return acc;
}

// word in block elementaries of EL_d(M_n(Z)), flat (d*n) x (d*n)
inline Matrix random_block_word_matrix(int d, int n, int num_factors, std::uint64_t seed,
                                       int coeff = 2) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pos(1, d), cdist(-coeff, coeff);
    Matrix acc = Matrix::identity(elgen::RingDesc::Z(), d * n);
    for (int k = 0; k < num_factors; ++k) {
        int i = pos(rng), j = pos(rng);
        while (j == i) j = pos(rng);
        Matrix h(elgen::RingDesc::Z(), n, n);
        bool nz = false;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Int c = cdist(rng);
                h.set(a, b, c);
                nz = nz || c != 0;
            }
        if (!nz) h.set(0, 0, 1);
        acc = acc * elgen::elem(i, j, h, d);
    }
    return acc;
}

// --- exact arithmetic in Q(sqrt(2), sqrt(l)) ------------------------------
// Basis {1, sqrt2, sqrtl, sqrt(2l)} for squarefree odd l > 1; gives symbolic
// equality and exact signs against which the interval scalars are checked.

struct Quad {
    long l = 3;
    elgen::Rat a, b, c, d; // a + b sqrt2 + c sqrtl + d sqrt(2l)

    static Quad rat(long l, const elgen::Rat& v) { return {l, v, 0, 0, 0}; }
    static Quad sqrt2(long l) { return {l, 0, 1, 0, 0}; }
    static Quad sqrtl(long l) { return {l, 0, 0, 1, 0}; }

    Quad operator+(const Quad& o) const { return {l, a + o.a, b + o.b, c + o.c, d + o.d}; }
    Quad operator-(const Quad& o) const { return {l, a - o.a, b - o.b, c - o.c, d - o.d}; }
    Quad operator-() const { return {l, -a, -b, -c, -d}; }

    Quad operator*(const Quad& o) const {
        elgen::Rat L(l);
        return {l,
                a * o.a + 2 * b * o.b + L * c * o.c + 2 * L * d * o.d,
                a * o.b + b * o.a + L * (c * o.d + d * o.c),
                a * o.c + c * o.a + 2 * (b * o.d + d * o.b),
                a * o.d + d * o.a + b * o.c + c * o.b};
    }

    bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }

    Quad conj_sqrt2() const { return {l, a, -b, c, -d}; }
    Quad conj_sqrtl() const { return {l, a, b, -c, -d}; }

    Quad inverse() const {
        Quad n1 = conj_sqrt2(), n2 = conj_sqrtl(), n3 = conj_sqrt2().conj_sqrtl();
        Quad prod = n1 * n2 * n3;
        Quad norm = *this * prod; // rational
        if (!(norm.b == 0 && norm.c == 0 && norm.d == 0) || norm.a == 0)
            throw std::runtime_error("quad inverse failed");
        elgen::Rat inv = 1 / norm.a;
        return {l, prod.a * inv, prod.b * inv, prod.c * inv, prod.d * inv};
    }
    Quad operator/(const Quad& o) const { return *this * o.inverse(); }

    // exact sign: zero is syntactic, otherwise a 512-bit enclosure separates
    int sign() const {
        if (is_zero()) return 0;
        const int prec = 512;
        auto enclose_sqrt = [&](long k) {
            Int scaled = Int(k) << (2 * prec);
            Int s = elgen::isqrt(scaled);
            elgen::Rat den(Int(1) << prec);
            return std::pair<elgen::Rat, elgen::Rat>{elgen::Rat(s) / den,
                                                     elgen::Rat(s + 1) / den};
        };
        auto [s2l, s2h] = enclose_sqrt(2);
        auto [sll, slh] = enclose_sqrt(l);
        auto [s2ll, s2lh] = enclose_sqrt(2 * l);
        auto lo_part = [&](const elgen::Rat& coeff, const elgen::Rat& rl, const elgen::Rat& rh) {
            return coeff >= 0 ? coeff * rl : coeff * rh;
        };
        auto hi_part = [&](const elgen::Rat& coeff, const elgen::Rat& rl, const elgen::Rat& rh) {
            return coeff >= 0 ? coeff * rh : coeff * rl;
        };
        elgen::Rat lo = a + lo_part(b, s2l, s2h) + lo_part(c, sll, slh) + lo_part(d, s2ll, s2lh);
        elgen::Rat hi = a + hi_part(b, s2l, s2h) + hi_part(c, sll, slh) + hi_part(d, s2ll, s2lh);
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        throw std::runtime_error("quad sign: 512-bit enclosure did not separate");
    }
};

// --- dense symmetric eigensolver (cyclic Jacobi) -------------------------

inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    int n = static_cast<int>(a.size());
    for (int sweep = 0; sweep < 120; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

} // namespace oracle
