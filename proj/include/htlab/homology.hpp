#pragma once

// Cocycle tests, H1 dimension and torsion per sample, the X_n census over
// 5-cycle families, and the Cohen-Lenstra reference distribution.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/families.hpp"
#include "htlab/kernel.hpp"
#include "htlab/modp.hpp"
#include "htlab/oracle.hpp"
#include "htlab/parallel.hpp"
#include "htlab/sampler.hpp"
#include "htlab/smith.hpp"

namespace htlab::hom {

// G ∈ Z^1(C, F2) iff every triangle of C meets E(G) in an even number of edges
inline bool is_cocycle(const Complex2& c, const CocycleGraph& g) {
    if (c.n != g.n) throw std::invalid_argument("is_cocycle: vertex count mismatch");
    std::vector<char> in_g(static_cast<std::size_t>(binom(g.n, 2)), 0);
    for (auto e : g.edges) in_g[e] = 1;
    for (auto t : c.tris) {
        Tri tri = tri_unrank(t);
        int k = in_g[edge_rank(tri.b, tri.c)] + in_g[edge_rank(tri.a, tri.c)] +
                in_g[edge_rank(tri.a, tri.b)];
        if (k & 1) return false;
    }
    return true;
}

// dim H1(T, F_p) = C(n-1,2) - rank_p of the square reduced boundary submatrix
inline int h1_dim(const Hypertree& t, std::uint64_t p) {
    Int8Matrix sq = square_submatrix(t.base);
    return sq.rows - rank_mod_p(sq, p);
}

inline int h1_dim(const Int8Matrix& square, std::uint64_t p) {
    return square.rows - rank_mod_p(square, p);
}

// Full integer invariant factors of H1; |H1| = |det| of the square submatrix.
inline InvariantFactors h1_group(const Hypertree& t, int cap = 10) {
    if (t.base.n > cap) throw std::invalid_argument("h1_group: n above the configured cap");
    Int8Matrix sq = square_submatrix(t.base);
    return invariant_factors_from_diag(smith_form(IntMatrix::from_int8(sq)));
}

// ---------------------------------------------------------------------------
// X_n: valid 5-cycles and disjoint-family counts

struct ValidCycles {
    std::vector<std::array<int, 5>> cycles;  // canonical vertex tuples
    long long x = 0;                         // number of h-element disjoint sets
};

namespace detail {

inline long long count_disjoint_sets(const std::vector<std::uint64_t>& masks, int h) {
    // h is tiny and so is the cycle list; plain DFS
    long long total = 0;
    std::function<void(std::size_t, std::uint64_t, int)> rec =
        [&](std::size_t start, std::uint64_t used, int left) {
            if (left == 0) { ++total; return; }
            for (std::size_t i = start; i < masks.size(); ++i)
                if ((masks[i] & used) == 0) rec(i + 1, used | masks[i], left - 1);
        };
    rec(0, 0, h);
    return total;
}

}  // namespace detail

// Enumerates valid 5-cycles by walking chains of triangles sharing two
// vertices; a cycle is valid iff its graph lies in Z^1(T, F2). X counts
// h-element sets of pairwise vertex-disjoint valid cycles.
inline ValidCycles count_valid_cycles(const Complex2& c, int h) {
    const int n = c.n;
    if (n > 64) throw std::invalid_argument("count_valid_cycles: n above 64 unsupported");
    ValidCycles out;

    // third-vertex lists: edge -> {z : edge + z is a triangle of T}
    std::vector<std::vector<int>> thirds(static_cast<std::size_t>(binom(n, 2)));
    std::vector<char> tri_in(static_cast<std::size_t>(binom(n, 3)), 0);
    for (auto t : c.tris) {
        tri_in[t] = 1;
        Tri tri = tri_unrank(t);
        thirds[edge_rank(tri.a, tri.b)].push_back(tri.c);
        thirds[edge_rank(tri.a, tri.c)].push_back(tri.b);
        thirds[edge_rank(tri.b, tri.c)].push_back(tri.a);
    }
    auto has_tri = [&](int x, int y, int z) {
        if (x > y) std::swap(x, y);
        if (y > z) std::swap(y, z);
        if (x > y) std::swap(x, y);
        return tri_in[tri_rank(x, y, z)] != 0;
    };
    std::vector<std::array<std::uint32_t, 3>> tri_edges;
    tri_edges.reserve(c.tris.size());
    for (auto t : c.tris) {
        Tri tri = tri_unrank(t);
        tri_edges.push_back({edge_rank(tri.b, tri.c), edge_rank(tri.a, tri.c),
                             edge_rank(tri.a, tri.b)});
    }
    std::vector<char> edge_in_cycle(static_cast<std::size_t>(binom(n, 2)), 0);
    auto is_valid_cycle = [&](const std::array<int, 5>& v) {
        std::array<std::uint32_t, 5> es;
        for (int j = 0; j < 5; ++j) {
            int a = v[j], b = v[(j + 1) % 5];
            es[j] = a < b ? edge_rank(a, b) : edge_rank(b, a);
            edge_in_cycle[es[j]] = 1;
        }
        bool ok = true;
        for (const auto& te : tri_edges) {
            int k = edge_in_cycle[te[0]] + edge_in_cycle[te[1]] + edge_in_cycle[te[2]];
            if (k & 1) { ok = false; break; }
        }
        for (auto e : es) edge_in_cycle[e] = 0;
        return ok;
    };

    // walk pentagons (v0,...,v4): v0 minimal, v1 < v4, consecutive triples in T
    for (auto t : c.tris) {
        Tri tri = tri_unrank(t);
        int v0 = tri.a;
        std::array<std::array<int, 2>, 2> dirs = {{{tri.b, tri.c}, {tri.c, tri.b}}};
        for (const auto& d : dirs) {
            int v1 = d[0], v2 = d[1];
            for (int v3 : thirds[v1 < v2 ? edge_rank(v1, v2) : edge_rank(v2, v1)]) {
                if (v3 <= v0 || v3 == v1) continue;  // v3 != v2 by construction
                for (int v4 : thirds[v2 < v3 ? edge_rank(v2, v3) : edge_rank(v3, v2)]) {
                    if (v4 <= v1 || v4 == v2) continue;  // canonical v1 < v4; v4 > v0 follows
                    if (!has_tri(v3, v4, v0) || !has_tri(v4, v0, v1)) continue;
                    std::array<int, 5> cand{v0, v1, v2, v3, v4};
                    if (is_valid_cycle(cand)) out.cycles.push_back(cand);
                }
            }
        }
    }

    std::vector<std::uint64_t> masks;
    for (const auto& v : out.cycles) {
        std::uint64_t m = 0;
        for (int x : v) m |= 1ull << (x - 1);
        masks.push_back(m);
    }
    out.x = detail::count_disjoint_sets(masks, h);
    return out;
}

inline ValidCycles count_valid_cycles(const Hypertree& t, int h) {
    return count_valid_cycles(t.base, h);
}

// ---------------------------------------------------------------------------
// Cohen-Lenstra reference distribution

inline constexpr int kClProductTerms = 60;  // tail below 1e-18 for p >= 2

// P(dim H1(.,F_p) = k) under the conjectured limit
inline double cl_rank_pmf(std::uint64_t p, int k) {
    if (k < 0) return 0.0;
    long double pinv = 1.0L / static_cast<long double>(p);
    long double c_inf = 1.0L;
    long double pij = 1.0L;
    for (int j = 1; j <= kClProductTerms; ++j) {
        pij *= pinv;
        c_inf *= (1.0L - pij);
    }
    long double val = c_inf;
    pij = 1.0L;
    for (int j = 1; j <= k; ++j) {
        pij *= pinv;
        long double f = 1.0L - pij;
        val /= f * f;
    }
    for (int i = 0; i < k * k; ++i) val *= pinv;  // p^{-k^2}
    return static_cast<double>(val);
}

// P(Sylow p-part isomorphic to the group with the given exponents)
inline double cl_group_pmf(std::uint64_t p, const std::vector<int>& exponents) {
    long double pinv = 1.0L / static_cast<long double>(p);
    long double c_inf = 1.0L, pij = 1.0L;
    for (int j = 1; j <= kClProductTerms; ++j) {
        pij *= pinv;
        c_inf *= (1.0L - pij);
    }
    std::uint64_t aut = oracle::brute_aut_count(exponents, p);
    return static_cast<double>(c_inf / static_cast<long double>(aut));
}

// ---------------------------------------------------------------------------
// torsion census

struct CensusOptions {
    int group_cap = 10;  // collect full invariant factors when n <= cap
};

struct TorsionReport {
    int n = 0;
    std::vector<std::uint64_t> primes;
    std::uint64_t trials = 0;
    std::uint64_t master_seed = 0;
    bool has_groups = false;
    // per prime index: histogram of dim H1(., F_p)
    std::vector<std::vector<std::uint64_t>> dim_counts;
    // per prime index: Sylow isomorphism type (exponent list) -> count
    std::vector<std::map<std::vector<int>, std::uint64_t>> group_counts;

    double empirical_pmf(std::size_t pi, int k) const {
        const auto& h = dim_counts[pi];
        if (k < 0 || k >= static_cast<int>(h.size()) || trials == 0) return 0.0;
        return static_cast<double>(h[k]) / static_cast<double>(trials);
    }
    double stderr_pmf(std::size_t pi, int k) const {
        double p = empirical_pmf(pi, k);
        return trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
    }
    // total variation distance to the conjectured rank distribution
    double tv_distance(std::size_t pi) const {
        double tv = 0.0;
        int kmax = std::max<int>(40, static_cast<int>(dim_counts[pi].size()));
        double ref_mass = 0.0;
        for (int k = 0; k <= kmax; ++k) {
            double ref = cl_rank_pmf(primes[pi], k);
            ref_mass += ref;
            tv += std::abs(empirical_pmf(pi, k) - ref);
        }
        tv += std::max(0.0, 1.0 - ref_mass);  // reference tail beyond kmax
        return tv / 2.0;
    }
};

inline TorsionReport torsion_census(int n, const std::vector<std::uint64_t>& primes,
                                    std::uint64_t trials, std::uint64_t master_seed,
                                    CensusOptions opt = {}) {
    ProjectionKernel kernel = build_kernel(n);
    struct Acc {
        std::vector<std::vector<std::uint64_t>> dims;
        std::vector<std::map<std::vector<int>, std::uint64_t>> groups;
    };
    const bool groups = n <= opt.group_cap;
    auto report = parallel_trials<Acc>(
        trials,
        [&](Acc& a, std::uint64_t i) {
            if (a.dims.empty()) {
                a.dims.assign(primes.size(), {});
                a.groups.assign(primes.size(), {});
            }
            Hypertree t = sample(kernel, SeedScheme{master_seed, i});
            Int8Matrix sq = square_submatrix(t.base);
            for (std::size_t pi = 0; pi < primes.size(); ++pi) {
                int d = h1_dim(sq, primes[pi]);
                if (a.dims[pi].size() <= static_cast<std::size_t>(d)) a.dims[pi].resize(d + 1, 0);
                ++a.dims[pi][d];
            }
            if (groups) {
                InvariantFactors inv = h1_group(t, n);
                for (std::size_t pi = 0; pi < primes.size(); ++pi)
                    ++a.groups[pi][inv.exponents(BigInt(primes[pi]))];
            }
        },
        [](Acc& tot, const Acc& a) {
            if (tot.dims.empty()) { tot = a; return; }
            if (a.dims.empty()) return;
            for (std::size_t pi = 0; pi < tot.dims.size(); ++pi) {
                if (tot.dims[pi].size() < a.dims[pi].size()) tot.dims[pi].resize(a.dims[pi].size(), 0);
                for (std::size_t k = 0; k < a.dims[pi].size(); ++k) tot.dims[pi][k] += a.dims[pi][k];
                for (const auto& [key, cnt] : a.groups[pi]) tot.groups[pi][key] += cnt;
            }
        });

    TorsionReport r;
    r.n = n;
    r.primes = primes;
    r.trials = trials;
    r.master_seed = master_seed;
    r.has_groups = groups;
    if (report.dims.empty()) {
        report.dims.assign(primes.size(), {});
        report.groups.assign(primes.size(), {});
    }
    r.dim_counts = std::move(report.dims);
    r.group_counts = std::move(report.groups);
    return r;
}

}  // namespace htlab::hom
