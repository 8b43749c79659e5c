#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "elgen/elwords.hpp"
#include "elgen/errors.hpp"
#include "elgen/integers.hpp"
#include "elgen/matrix.hpp"

namespace elgen {

enum class SchreierAction { projective, vectors };

/// Multigraph of a generator action on projective points or nonzero vectors
/// of (Z/q)^n. The edge list keeps generator multiplicity; inverses are
/// appended unless a generator already acts as its own inverse matrix.
struct SchreierGraph {
    int n = 0;
    long q = 0;
    SchreierAction action = SchreierAction::projective;
    int vertices = 0;
    int degree = 0;
    std::vector<int> adj; // vertices x degree, flattened
    bool connected = true;

    int neighbor(int v, int e) const { return adj[static_cast<std::size_t>(v) * degree + e]; }
};

namespace detail {

inline bool is_small_prime(long q) {
    if (q < 2) return false;
    for (long d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

inline long pow_check(long q, int n, long limit) {
    long v = 1;
    for (int i = 0; i < n; ++i) {
        v *= q;
        require(v <= limit, errc::malformed_input, "schreier_graph: state space too large");
    }
    return v;
}

} // namespace detail

inline SchreierGraph schreier_graph(int n, long q, const std::vector<Matrix>& gens,
                                    SchreierAction action) {
    require(detail::is_small_prime(q) && q <= 7, errc::malformed_input,
            "schreier_graph: q must be a prime <= 7");
    require(n >= 2 && n <= 8, errc::malformed_input, "schreier_graph: need 2 <= n <= 8");
    long space = detail::pow_check(q, n, 1L << 22);

    // generator matrices mod q, inverses appended (deduplicated per generator)
    RingDesc zq = RingDesc::Zmod(Int(q));
    std::vector<std::vector<long>> maps;
    for (const Matrix& g : gens) {
        require(g.rows() == n && g.cols() == n, errc::dimension_mismatch,
                "schreier_graph: generator dimension mismatch");
        Matrix gm(zq, n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) gm.set(i, j, g.at(i, j));
        Matrix gi = gm.inverse();
        std::vector<long> flat(static_cast<std::size_t>(n) * n), flati(flat.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                flat[static_cast<std::size_t>(i) * n + j] = gm.at(i, j).convert_to<long>();
                flati[static_cast<std::size_t>(i) * n + j] = gi.at(i, j).convert_to<long>();
            }
        maps.push_back(flat);
        if (flat != flati) maps.push_back(flati);
    }
    require(!maps.empty(), errc::malformed_input, "schreier_graph: empty generating set");

    // inverse tables mod q for canonicalization
    std::vector<long> inv_mod_q(static_cast<std::size_t>(q), 0);
    for (long a = 1; a < q; ++a)
        for (long b = 1; b < q; ++b)
            if (a * b % q == 1) inv_mod_q[static_cast<std::size_t>(a)] = b;

    auto decode = [&](long id, std::vector<long>& v) {
        for (int i = 0; i < n; ++i) {
            v[static_cast<std::size_t>(i)] = id % q;
            id /= q;
        }
    };
    auto encode = [&](const std::vector<long>& v) {
        long id = 0;
        for (int i = n - 1; i >= 0; --i) id = id * q + v[static_cast<std::size_t>(i)];
        return id;
    };
    auto canonical = [&](std::vector<long>& v) {
        if (action == SchreierAction::vectors) return;
        long lead = 0;
        for (int i = 0; i < n && lead == 0; ++i) lead = v[static_cast<std::size_t>(i)];
        long s = inv_mod_q[static_cast<std::size_t>(lead)];
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * s % q;
    };

    std::vector<int> index(static_cast<std::size_t>(space), -1);
    std::vector<long> ids;
    std::vector<long> v(static_cast<std::size_t>(n));
    for (long id = 1; id < space; ++id) {
        decode(id, v);
        std::vector<long> w = v;
        canonical(w);
        if (encode(w) != id) continue; // not the canonical representative
        index[static_cast<std::size_t>(id)] = static_cast<int>(ids.size());
        ids.push_back(id);
    }

    SchreierGraph g;
    g.n = n;
    g.q = q;
    g.action = action;
    g.vertices = static_cast<int>(ids.size());
    g.degree = static_cast<int>(maps.size());
    g.adj.resize(static_cast<std::size_t>(g.vertices) * g.degree);

    std::vector<long> w(static_cast<std::size_t>(n));
    for (int vi = 0; vi < g.vertices; ++vi) {
        decode(ids[static_cast<std::size_t>(vi)], v);
        for (int e = 0; e < g.degree; ++e) {
            const std::vector<long>& m = maps[static_cast<std::size_t>(e)];
            for (int i = 0; i < n; ++i) {
                long acc = 0;
                for (int j = 0; j < n; ++j)
                    acc += m[static_cast<std::size_t>(i) * n + j] * v[static_cast<std::size_t>(j)];
                w[static_cast<std::size_t>(i)] = acc % q;
            }
            canonical(w);
            int target = index[static_cast<std::size_t>(encode(w))];
            require(target >= 0, errc::malformed_input, "schreier_graph: action left the state space");
            g.adj[static_cast<std::size_t>(vi) * g.degree + e] = target;
        }
    }

    // connectivity by breadth-first search
    std::vector<char> seen(static_cast<std::size_t>(g.vertices), 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int e = 0; e < g.degree; ++e) {
            int t = g.neighbor(u, e);
            if (!seen[static_cast<std::size_t>(t)]) {
                seen[static_cast<std::size_t>(t)] = 1;
                ++reached;
                bfs.push(t);
            }
        }
    }
    g.connected = reached == g.vertices;
    return g;
}

/// Synthetic multigraph from an explicit regular adjacency list (testing aid).
inline SchreierGraph graph_from_adjacency(const std::vector<std::vector<int>>& adj) {
    SchreierGraph g;
    g.vertices = static_cast<int>(adj.size());
    g.degree = adj.empty() ? 0 : static_cast<int>(adj[0].size());
    for (const auto& row : adj) {
        require(static_cast<int>(row.size()) == g.degree, errc::malformed_input,
                "graph_from_adjacency: not regular");
        for (int t : row) g.adj.push_back(t);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.vertices), 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int e = 0; e < g.degree; ++e) {
            int t = g.neighbor(u, e);
            if (!seen[static_cast<std::size_t>(t)]) {
                seen[static_cast<std::size_t>(t)] = 1;
                ++reached;
                bfs.push(t);
            }
        }
    }
    g.connected = reached == g.vertices;
    return g;
}

struct GapResult {
    double lambda2 = 0;   // second-largest eigenvalue of the normalized walk
    double gap = 0;       // 1 - lambda2
    double lambda_abs = 0; // largest |eigenvalue| away from the constants
    double gap_abs = 0;   // 1 - lambda_abs
    double residual = 0;
    long iterations = 0;
    bool connected = true;
};

/// Deterministic power iteration on the complement of the constants: the
/// shifted walk (I + W)/2 gives the one-sided lambda_2, the squared walk the
/// largest magnitude. Fixed seed vector, sequential reduction order, and a
/// residual certificate ||W x - lambda x|| < tol.
inline GapResult spectral_gap(const SchreierGraph& g, double tol = 1e-10) {
    GapResult out;
    out.connected = g.connected;
    if (!g.connected) return out; // gap 0, flagged

    int nv = g.vertices;
    double deg = static_cast<double>(g.degree);
    auto walk = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int v = 0; v < nv; ++v) {
            double acc = 0;
            for (int e = 0; e < g.degree; ++e) acc += x[static_cast<std::size_t>(g.neighbor(v, e))];
            y[static_cast<std::size_t>(v)] = acc / deg;
        }
    };
    auto project_normalize = [&](std::vector<double>& x) {
        double mean = 0;
        for (double v : x) mean += v;
        mean /= nv;
        double norm = 0;
        for (double& v : x) {
            v -= mean;
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm > 0)
            for (double& v : x) v /= norm;
        return norm;
    };

    std::vector<double> x(static_cast<std::size_t>(nv)), y(static_cast<std::size_t>(nv)),
        z(static_cast<std::size_t>(nv));
    std::uint64_t seed = 0x5eedULL;
    for (int v = 0; v < nv; ++v)
        x[static_cast<std::size_t>(v)] =
            static_cast<double>(splitmix64(seed) >> 11) / 9007199254740992.0 - 0.5;
    project_normalize(x);

    const long max_iter = 200000;
    // one-sided lambda_2 through the shifted operator (I + W)/2
    double mu = 0, res = 0;
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        walk(x, y);
        for (int v = 0; v < nv; ++v)
            y[static_cast<std::size_t>(v)] = 0.5 * (x[static_cast<std::size_t>(v)] + y[static_cast<std::size_t>(v)]);
        project_normalize(y);
        x.swap(y);
        walk(x, z);
        mu = 0;
        for (int v = 0; v < nv; ++v) mu += x[static_cast<std::size_t>(v)] * z[static_cast<std::size_t>(v)];
        res = 0;
        for (int v = 0; v < nv; ++v) {
            double r = z[static_cast<std::size_t>(v)] - mu * x[static_cast<std::size_t>(v)];
            res += r * r;
        }
        res = std::sqrt(res);
        if (res < tol) break;
    }
    out.lambda2 = mu;
    out.gap = 1.0 - mu;
    out.residual = res;

    // largest magnitude through the squared walk
    for (int v = 0; v < nv; ++v)
        x[static_cast<std::size_t>(v)] =
            static_cast<double>(splitmix64(seed) >> 11) / 9007199254740992.0 - 0.5;
    project_normalize(x);
    double nu = 0;
    for (long it = 0; it < max_iter; ++it) {
        walk(x, y);
        walk(y, z);
        project_normalize(z);
        x.swap(z);
        walk(x, y);
        walk(y, z);
        nu = 0;
        for (int v = 0; v < nv; ++v) nu += x[static_cast<std::size_t>(v)] * z[static_cast<std::size_t>(v)];
        double r2 = 0;
        for (int v = 0; v < nv; ++v) {
            double r = z[static_cast<std::size_t>(v)] - nu * x[static_cast<std::size_t>(v)];
            r2 += r * r;
        }
        if (std::sqrt(r2) < tol) break;
    }
    out.lambda_abs = std::sqrt(std::max(0.0, nu));
    out.gap_abs = 1.0 - out.lambda_abs;
    return out;
}

enum class GapFamily { elementary, uniform };

struct GapRow {
    int n = 0;
    std::string family;
    int set_size = 0;
    int vertices = 0;
    int degree = 0;
    double gap = 0;
    double gap_abs = 0;
    bool connected = true;
};

/// Tabulates gaps across n for the elementary family S_n(Z) and the uniform
/// family, both reduced mod q. Deterministic: repeated calls produce
/// identical rows.
inline std::vector<GapRow> gap_table(int n_lo, int n_hi, long q,
                                     const std::vector<GapFamily>& families,
                                     SchreierAction action = SchreierAction::projective,
                                     double tol = 1e-10) {
    std::vector<GapRow> rows;
    for (int n = n_lo; n <= n_hi; ++n)
        for (GapFamily fam : families) {
            GenSet gs = fam == GapFamily::elementary ? gen_set_S_d(RingDesc::Z(), n)
                                                     : uniform_set(n, 3);
            SchreierGraph g = schreier_graph(n, q, gs.matrices, action);
            GapResult r = spectral_gap(g, tol);
            GapRow row;
            row.n = n;
            row.family = fam == GapFamily::elementary ? "elementary" : "uniform";
            row.set_size = gs.size();
            row.vertices = g.vertices;
            row.degree = g.degree;
            row.gap = r.gap;
            row.gap_abs = r.gap_abs;
            row.connected = r.connected;
            rows.push_back(row);
        }
    return rows;
}

} // namespace elgen
