#pragma once

#include <memory>
#include <string>
#include <utility>

#include "elgen/errors.hpp"
#include "elgen/integers.hpp"

namespace elgen {

/// Exact-interval scalar over the expression grammar
/// {rationals, sqrt(k), +, -, *, /}. Every value keeps its expression tree,
/// so enclosures can be recomputed at any precision; square roots are the
/// only source of width and are enclosed by integer square-root refinement.
/// No floating point enters any decision.
class BoundScalar {
    struct Expr {
        enum class Op { constant, sqrt_int, add, sub, mul, div, neg };
        Op op = Op::constant;
        Rat value;
        long radicand = 0;
        std::shared_ptr<const Expr> a, b;
    };

    struct Interval {
        Rat lo, hi;
        bool valid = true; // false when a denominator interval straddles zero
    };

  public:
    BoundScalar() : BoundScalar(rational(Rat(0))) {}

    static BoundScalar rational(const Rat& v) {
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::constant;
        e->value = v;
        return BoundScalar(std::move(e));
    }
    static BoundScalar from_int(long v) { return rational(Rat(v)); }

    static BoundScalar sqrt_of(long k) {
        require(k >= 0, errc::malformed_input, "sqrt of a negative integer");
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::sqrt_int;
        e->radicand = k;
        return BoundScalar(std::move(e));
    }

    friend BoundScalar operator+(const BoundScalar& x, const BoundScalar& y) {
        return combine(Expr::Op::add, x, y);
    }
    friend BoundScalar operator-(const BoundScalar& x, const BoundScalar& y) {
        return combine(Expr::Op::sub, x, y);
    }
    friend BoundScalar operator*(const BoundScalar& x, const BoundScalar& y) {
        return combine(Expr::Op::mul, x, y);
    }
    friend BoundScalar operator/(const BoundScalar& x, const BoundScalar& y) {
        return combine(Expr::Op::div, x, y);
    }
    BoundScalar operator-() const {
        auto e = std::make_shared<Expr>();
        e->op = Expr::Op::neg;
        e->a = e_;
        return BoundScalar(std::move(e));
    }

    /// Certified enclosure with width at most `width`.
    std::pair<Rat, Rat> enclosure(const Rat& width) const {
        for (int prec = 16; prec <= max_prec; prec *= 2) {
            Interval iv = eval(*e_, prec);
            if (iv.valid && iv.hi - iv.lo <= width) return {iv.lo, iv.hi};
        }
        fail(errc::undecidable, "enclosure did not reach the requested width");
    }

    std::pair<Rat, Rat> interval(int prec = 64) const {
        Interval iv = eval(*e_, prec);
        require(iv.valid, errc::undecidable, "interval undefined at this precision");
        return {iv.lo, iv.hi};
    }

    /// -1, 0 or +1 with interval certification; refusing to guess, equal
    /// values that never separate raise undecidable.
    friend int compare(const BoundScalar& x, const BoundScalar& y) {
        for (int prec = 16; prec <= max_prec; prec *= 2) {
            Interval a = eval(*x.e_, prec), b = eval(*y.e_, prec);
            if (!a.valid || !b.valid) continue;
            if (a.hi < b.lo) return -1;
            if (b.hi < a.lo) return 1;
        }
        fail(errc::undecidable, "comparison undecidable after bounded refinement");
    }

    friend bool operator<(const BoundScalar& x, const BoundScalar& y) { return compare(x, y) < 0; }
    friend bool operator>(const BoundScalar& x, const BoundScalar& y) { return compare(x, y) > 0; }

    bool is_zero() const {
        if (e_->op == Expr::Op::constant) return e_->value == 0;
        auto [lo, hi] = interval(128);
        return lo == 0 && hi == 0;
    }

    double approx() const {
        Interval iv = eval(*e_, 96);
        return (iv.lo.convert_to<double>() + iv.hi.convert_to<double>()) / 2;
    }

  private:
    explicit BoundScalar(std::shared_ptr<const Expr> e) : e_(std::move(e)) {}

    static BoundScalar combine(typename Expr::Op op, const BoundScalar& x, const BoundScalar& y) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->a = x.e_;
        e->b = y.e_;
        return BoundScalar(std::move(e));
    }

    static constexpr int max_prec = 4096;

    static Interval eval(const Expr& e, int prec) {
        switch (e.op) {
        case Expr::Op::constant: return {e.value, e.value, true};
        case Expr::Op::sqrt_int: {
            // floor(sqrt(k * 4^prec)) / 2^prec encloses sqrt(k) outward
            Int scaled = Int(e.radicand) << (2 * prec);
            Int s = isqrt(scaled);
            Rat denom = Rat(Int(1) << prec);
            Rat lo = Rat(s) / denom;
            if (s * s == scaled) return {lo, lo, true};
            return {lo, Rat(s + 1) / denom, true};
        }
        case Expr::Op::neg: {
            Interval a = eval(*e.a, prec);
            return {-a.hi, -a.lo, a.valid};
        }
        case Expr::Op::add: {
            Interval a = eval(*e.a, prec), b = eval(*e.b, prec);
            return {a.lo + b.lo, a.hi + b.hi, a.valid && b.valid};
        }
        case Expr::Op::sub: {
            Interval a = eval(*e.a, prec), b = eval(*e.b, prec);
            return {a.lo - b.hi, a.hi - b.lo, a.valid && b.valid};
        }
        case Expr::Op::mul: {
            Interval a = eval(*e.a, prec), b = eval(*e.b, prec);
            Rat c1 = a.lo * b.lo, c2 = a.lo * b.hi, c3 = a.hi * b.lo, c4 = a.hi * b.hi;
            Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
            Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
            return {lo, hi, a.valid && b.valid};
        }
        case Expr::Op::div: {
            Interval a = eval(*e.a, prec), b = eval(*e.b, prec);
            if (!a.valid || !b.valid || (b.lo <= 0 && b.hi >= 0)) return {Rat(0), Rat(0), false};
            Rat c1 = a.lo / b.lo, c2 = a.lo / b.hi, c3 = a.hi / b.lo, c4 = a.hi / b.hi;
            Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
            Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
            return {lo, hi, true};
        }
        }
        return {Rat(0), Rat(0), false};
    }

    std::shared_ptr<const Expr> e_;
};

/// M(l) < 3 sqrt(2) (sqrt(l) + 3).
inline BoundScalar m_bound(int l) {
    require(l >= 1, errc::malformed_input, "m_bound: l >= 1");
    return BoundScalar::from_int(3) * BoundScalar::sqrt_of(2) *
           (BoundScalar::sqrt_of(l) + BoundScalar::from_int(3));
}

/// ||rho(g)v - v|| <= 2 M(l) eps for every elementary g.
inline BoundScalar elementary_invariance(const BoundScalar& eps, int l) {
    return BoundScalar::from_int(2) * m_bound(l) * eps;
}

/// Almost-invariance propagates to the whole subgroup as 2 delta / eps,
/// provided 0 <= delta < eps.
inline BoundScalar subgroup_invariance(const BoundScalar& delta, const BoundScalar& eps) {
    require(!(eps < delta || compare(delta, eps) == 0), errc::delta_not_below_epsilon,
            "subgroup_invariance requires delta < eps");
    return BoundScalar::from_int(2) * delta / eps;
}

/// eps1 < eps0 sqrt(2) / (680 M(l+1) + 2).
inline BoundScalar epsilon1_threshold(const BoundScalar& eps0, int l) {
    return eps0 * BoundScalar::sqrt_of(2) /
           (BoundScalar::from_int(680) * m_bound(l + 1) + BoundScalar::from_int(2));
}

/// Derived combination constant for a product of k subgroups, each with
/// Kazhdan constant eps0: chaining the invariance lemma across the factors
/// and closing with the sqrt(2) criterion gives sqrt(2) eps0 / (2k). This is
/// a design-level derivation, not a value stated in the source material.
inline BoundScalar bounded_product_epsilon(const BoundScalar& eps0, int k) {
    require(k >= 1, errc::malformed_input, "bounded_product_epsilon: k >= 1");
    return BoundScalar::sqrt_of(2) * eps0 / BoundScalar::from_int(2 * k);
}

struct Budget {
    int l = 1;        // ring generators
    int k0 = 12;      // |F|
    long c_el = 340;  // elementary factor budget
    BoundScalar eps0; // Kazhdan constant of the small group
    BoundScalar eps1; // candidate constant for the uniform set
    int k = 0;        // uniform generating set size

    static Budget make(int l, BoundScalar eps0, BoundScalar eps1, long c_el = 340, int k0 = 12) {
        Budget b;
        b.l = l;
        b.k0 = k0;
        b.c_el = c_el;
        b.eps0 = std::move(eps0);
        b.eps1 = std::move(eps1);
        b.k = k0 + 2 * (4 * 4 - 4) + 4 * (l + 1) * 3; // k0 + |S_4(M_n(R))|
        return b;
    }
};

/// The main displayed inequality: c_el * 2 M(l+1) eps1 + 2 eps1/eps0 < sqrt(2),
/// decided by interval separation.
inline bool budget_verify(const Budget& b) {
    BoundScalar lhs = BoundScalar::from_int(b.c_el) * elementary_invariance(b.eps1, b.l + 1) +
                      BoundScalar::from_int(2) * b.eps1 / b.eps0;
    return lhs < BoundScalar::sqrt_of(2);
}

/// The side constraint eps1 < eps0 the amplification step also needs.
inline bool budget_eps1_below_eps0(const Budget& b) { return b.eps1 < b.eps0; }

} // namespace elgen
