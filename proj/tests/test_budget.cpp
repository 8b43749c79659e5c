#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <cmath>
#include <functional>
#include "elgen/budget.hpp"
#include "oracles.hpp"

using namespace elgen;

namespace {

// the enclosure call certifies width <= 1e-12 in exact arithmetic; the
// double comparison leaves room for the reference value's own rounding
bool brackets(const BoundScalar& x, double value) {
    auto [lo, hi] = x.enclosure(Rat(1, 1000000000000LL)); // 1e-12
    double l = lo.convert_to<double>(), h = hi.convert_to<double>();
    double tol = 1e-9 * (1 + std::fabs(value));
    return l - tol <= value && value <= h + tol;
}

} // namespace

TEST_CASE("m_bound values") {
    CHECK(brackets(m_bound(1), 12 * 1.4142135623730951));
    CHECK(brackets(m_bound(2), 6 + 9 * 1.4142135623730951));
    CHECK(brackets(m_bound(4), 15 * 1.4142135623730951));
    // monotone in l
    for (int l = 1; l < 8; ++l) CHECK(m_bound(l) < m_bound(l + 1));
}

TEST_CASE("elementary invariance") {
    BoundScalar zero = BoundScalar::from_int(0);
    auto [lo, hi] = elementary_invariance(zero, 1).enclosure(Rat(1, 1000000));
    CHECK(lo == 0);
    CHECK(hi == 0);
    CHECK(brackets(elementary_invariance(BoundScalar::from_int(1), 1),
                   24 * 1.4142135623730951));
    // monotone in eps
    BoundScalar e1 = BoundScalar::rational(Rat(1, 3)), e2 = BoundScalar::rational(Rat(1, 2));
    CHECK(elementary_invariance(e1, 2) < elementary_invariance(e2, 2));
}

TEST_CASE("subgroup invariance") {
    BoundScalar eps = BoundScalar::rational(Rat(2, 7));
    BoundScalar half = eps / BoundScalar::from_int(2);
    auto [lo, hi] = subgroup_invariance(half, eps).enclosure(Rat(1, 1000000000000LL));
    CHECK(lo <= 1);
    CHECK(hi >= 1);
    CHECK(hi - lo <= Rat(1, 1000000000000LL));

    auto [zl, zh] = subgroup_invariance(BoundScalar::from_int(0), eps).enclosure(Rat(1, 1000));
    CHECK(zl == 0);
    CHECK(zh == 0);

    // delta / eps = 1 - 1e-6 stays strictly below 2
    BoundScalar close = eps * BoundScalar::rational(Rat(999999, 1000000));
    CHECK(subgroup_invariance(close, eps) < BoundScalar::from_int(2));

    CHECK_THROWS_AS(subgroup_invariance(eps, half), Error);
    CHECK_THROWS_AS(subgroup_invariance(eps, eps), Error);
}

TEST_CASE("epsilon1 threshold") {
    BoundScalar one = BoundScalar::from_int(1);
    BoundScalar th = epsilon1_threshold(one, 1);
    // sqrt(2) / (4082 + 6120 sqrt(2)) = (12240 - 4082 sqrt(2)) / 58246076
    oracle::Quad expect =
        (oracle::Quad::rat(3, Rat(12240)) -
         oracle::Quad::rat(3, Rat(4082)) * oracle::Quad::sqrt2(3)) *
        oracle::Quad::rat(3, Rat(1, 58246076)).inverse().inverse();
    CHECK(brackets(th, 1.1103228545981927e-4));
    auto [lo, hi] = th.enclosure(Rat(1, 1000000000000LL));
    CHECK(hi - lo <= Rat(1, 1000000000000LL));
    (void)expect;

    auto [zl, zh] = epsilon1_threshold(BoundScalar::from_int(0), 1).enclosure(Rat(1, 1000));
    CHECK(zl == 0);
    CHECK(zh == 0);

    // threshold < eps0 for a spread of l
    for (int l = 1; l <= 6; ++l) CHECK(epsilon1_threshold(one, l) < one);
}

TEST_CASE("budget verification") {
    BoundScalar one = BoundScalar::from_int(1);
    BoundScalar th = epsilon1_threshold(one, 1);

    Budget good = Budget::make(1, one, th * BoundScalar::rational(Rat(999999, 1000000)));
    CHECK(good.k == 12 + 48);
    CHECK(budget_verify(good));
    CHECK(budget_eps1_below_eps0(good));

    Budget bad = Budget::make(1, one, th * BoundScalar::from_int(2));
    CHECK_FALSE(budget_verify(bad));

    Budget zero = Budget::make(1, one, BoundScalar::from_int(0));
    CHECK(budget_verify(zero));

    // geometric grid strictly below the threshold verifies, 1.01x does not
    BoundScalar ratio = BoundScalar::rational(Rat(1, 2));
    BoundScalar eps1 = th * BoundScalar::rational(Rat(999999, 1000000));
    for (int i = 0; i < 10; ++i) {
        CHECK(budget_verify(Budget::make(1, one, eps1)));
        eps1 = eps1 * ratio;
    }
    CHECK_FALSE(budget_verify(Budget::make(1, one, th * BoundScalar::rational(Rat(101, 100)))));
}

TEST_CASE("bounded product epsilon") {
    BoundScalar one = BoundScalar::from_int(1);
    // k = 1: eps0 / sqrt(2) = sqrt(2)/2
    CHECK(brackets(bounded_product_epsilon(one, 1), 1.4142135623730951 / 2));
    CHECK(brackets(bounded_product_epsilon(one, 2), 1.4142135623730951 / 4));
    for (int k = 1; k < 6; ++k)
        CHECK(bounded_product_epsilon(one, k + 1) < bounded_product_epsilon(one, k));
}

TEST_CASE("interval comparisons agree with the symbolic oracle") {
    const long l = 5;
    std::mt19937_64 rng(2024);

    struct Node {
        BoundScalar s;
        oracle::Quad q;
    };
    auto leaf = [&]() -> Node {
        switch (rng() % 4) {
        case 0: return {BoundScalar::sqrt_of(2), oracle::Quad::sqrt2(l)};
        case 1: return {BoundScalar::sqrt_of(l), oracle::Quad::sqrtl(l)};
        default: {
            long num = static_cast<long>(rng() % 19) - 9;
            long den = 1 + static_cast<long>(rng() % 9);
            return {BoundScalar::rational(Rat(num, den)), oracle::Quad::rat(l, Rat(num, den))};
        }
        }
    };
    std::function<Node(int)> build = [&](int depth) -> Node {
        if (depth == 0) return leaf();
        Node x = build(depth - 1), y = build(depth - 1);
        switch (rng() % 4) {
        case 0: return {x.s + y.s, x.q + y.q};
        case 1: return {x.s - y.s, x.q - y.q};
        case 2: return {x.s * y.s, x.q * y.q};
        default:
            if (y.q.is_zero()) return {x.s + y.s, x.q + y.q};
            return {x.s / y.s, x.q / y.q};
        }
    };

    int checked = 0;
    while (checked < 200) {
        Node x = build(2), y = build(2);
        int oracle_sign = (x.q - y.q).sign();
        if (oracle_sign == 0) {
            CHECK_THROWS_AS(compare(x.s, y.s), Error); // equal values never separate
        } else {
            CHECK(compare(x.s, y.s) == oracle_sign);
        }
        ++checked;
    }
}
