#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "elgen/errors.hpp"

namespace elgen {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using boost::multiprecision::abs;
using boost::multiprecision::gcd;

inline Int mod_floor(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

struct Egcd {
    Int g, x, y; // g = gcd(a, b) = x*a + y*b, g >= 0
};

inline Egcd egcd(Int a, Int b) {
    Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Int q = a / b;
        Int r = a - q * b;
        a = b;
        b = r;
        Int nx = x0 - q * x1, ny = y0 - q * y1;
        x0 = x1;
        y0 = y1;
        x1 = nx;
        y1 = ny;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    return {a, x0, y0};
}

// Inverse of a mod m (m >= 2); fails when gcd(a, m) != 1.
inline Int inv_mod(const Int& a, const Int& m) {
    Egcd e = egcd(mod_floor(a, m), m);
    require(e.g == 1, errc::not_invertible, "element not invertible modulo " + m.str());
    return mod_floor(e.x, m);
}

// Smallest non-negative solution of x = r_i (mod m_i), pairwise coprime moduli.
inline Int crt(const std::vector<Int>& residues, const std::vector<Int>& moduli) {
    Int x = 0, m = 1;
    for (std::size_t i = 0; i < residues.size(); ++i) {
        // x' = x (mod m), x' = residues[i] (mod moduli[i])
        Int t = mod_floor((residues[i] - x) * inv_mod(m, moduli[i]), moduli[i]);
        x += m * t;
        m *= moduli[i];
    }
    return x;
}

inline bool is_probable_prime(const Int& n) {
    if (n < 2) return false;
    return boost::multiprecision::miller_rabin_test(n, 32);
}

namespace detail {

inline Int pollard_rho(const Int& n) {
    // Deterministic parameter sweep; n odd composite, not a prime power pitfall-free
    // because callers retry with the next c on failure.
    for (Int c = 1;; ++c) {
        Int x = 2, y = 2, d = 1;
        auto f = [&](const Int& v) { return mod_floor(v * v + c, n); };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = gcd(abs(x - y), n);
        }
        if (d != n) return d;
    }
}

inline void factor_into(Int n, std::map<Int, int>& out) {
    if (n <= 1) return;
    if (is_probable_prime(n)) {
        out[n] += 1;
        return;
    }
    for (int p : {2, 3, 5, 7, 11, 13}) {
        if (n % p == 0) {
            out[Int(p)] += 1;
            factor_into(n / p, out);
            return;
        }
    }
    Int d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

} // namespace detail

// Prime factorization of |n| (n != 0); exponents included.
inline std::map<Int, int> factorize(const Int& n) {
    std::map<Int, int> out;
    detail::factor_into(abs(n), out);
    return out;
}

inline std::vector<Int> prime_divisors(const Int& n) {
    std::vector<Int> ps;
    for (auto& [p, e] : factorize(n)) ps.push_back(p);
    return ps;
}

// floor(sqrt(n)) for n >= 0.
inline Int isqrt(const Int& n) { return boost::multiprecision::sqrt(n); }

// Fixed-seed 64-bit mixer used by deterministic fallback searches.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace elgen
