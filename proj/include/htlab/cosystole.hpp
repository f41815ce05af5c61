#pragma once

// Weighted cochain norms, coset norms, the cosystole syst^1, the expansion
// quotient at tiny n, and the event statistics behind the bad-expander
// result. All norms are exact rationals: the weight of an i-face is
// (number of triangles of T containing it) / (3 |T(2)|), so for a fixed T
// every norm is an integer over 3*C(n-1,2) and minimization is integer
// comparison.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/homology.hpp"
#include "htlab/kernel.hpp"
#include "htlab/modp.hpp"
#include "htlab/parallel.hpp"
#include "htlab/sampler.hpp"
#include "htlab/types.hpp"

namespace htlab::cosys {

namespace detail {

// triangle-degree of every i-face; i = 0 indexes vertices by v-1, i = 1 by
// edge colex rank
inline std::vector<std::int64_t> face_degrees(const Complex2& c, int i) {
    std::vector<std::int64_t> deg(i == 0 ? c.n : binom(c.n, 2), 0);
    for (auto t : c.tris) {
        Tri tri = tri_unrank(t);
        if (i == 0) {
            ++deg[tri.a - 1];
            ++deg[tri.b - 1];
            ++deg[tri.c - 1];
        } else {
            ++deg[edge_rank(tri.b, tri.c)];
            ++deg[edge_rank(tri.a, tri.c)];
            ++deg[edge_rank(tri.a, tri.b)];
        }
    }
    return deg;
}

inline std::int64_t popcount_masked_sum(const std::vector<std::uint64_t>& bits,
                                        const std::vector<std::int64_t>& deg) {
    std::int64_t s = 0;
    for (std::size_t w = 0; w < bits.size(); ++w) {
        std::uint64_t x = bits[w];
        while (x) {
            int b = __builtin_ctzll(x);
            s += deg[64 * w + b];
            x &= x - 1;
        }
    }
    return s;
}

}  // namespace detail

// ||f|| = sum of w(sigma) over the support; exact rational
inline BigRat cochain_norm(const Complex2& c, const std::vector<std::uint32_t>& support, int i) {
    if (i != 0 && i != 1) throw std::invalid_argument("cochain_norm: dimension must be 0 or 1");
    auto deg = detail::face_degrees(c, i);
    std::int64_t s = 0;
    std::vector<char> seen(deg.size(), 0);
    for (auto f : support) {
        if (f >= deg.size()) throw std::invalid_argument("cochain_norm: face out of range");
        if (seen[f]) throw std::invalid_argument("cochain_norm: duplicate face in support");
        seen[f] = 1;
        s += deg[f];
    }
    return BigRat(BigInt(s), BigInt(3) * static_cast<std::int64_t>(c.tris.size()));
}

// ---------------------------------------------------------------------------
// F2 cochain machinery (packed over edges / vertices)

namespace detail {

struct CochainSpace {
    int n = 0;
    int nfaces = 0;  // C(n,2) for i=1, n for i=0
    int words = 0;
    std::vector<std::int64_t> deg;

    std::int64_t support_weight(const std::vector<std::uint64_t>& f) const {
        return popcount_masked_sum(f, deg);
    }
};

inline CochainSpace cochain_space(const Complex2& c, int i) {
    CochainSpace s;
    s.n = c.n;
    s.nfaces = i == 0 ? c.n : static_cast<int>(binom(c.n, 2));
    s.words = (s.nfaces + 63) / 64;
    s.deg = face_degrees(c, i);
    return s;
}

// basis of Z^i(T, F2) as packed vectors; i=0: the all-ones vector, i=1: the
// nullspace of the triangle-edge incidence matrix
inline std::vector<std::vector<std::uint64_t>> cocycle_basis(const Complex2& c, int i) {
    if (i == 0) {
        int words = (c.n + 63) / 64;
        std::vector<std::uint64_t> ones(words, 0);
        for (int v = 0; v < c.n; ++v) ones[v >> 6] |= 1ull << (v & 63);
        return {ones};
    }
    BitMatrix delta(static_cast<int>(c.tris.size()), static_cast<int>(binom(c.n, 2)));
    for (std::size_t r = 0; r < c.tris.size(); ++r) {
        Tri tri = tri_unrank(c.tris[r]);
        delta.set(static_cast<int>(r), edge_rank(tri.b, tri.c));
        delta.set(static_cast<int>(r), edge_rank(tri.a, tri.c));
        delta.set(static_cast<int>(r), edge_rank(tri.a, tri.b));
    }
    return nullspace_gf2(std::move(delta));
}

// vertex-star coboundary basis (stars of vertices 1..n-1 span B^1)
inline std::vector<std::vector<std::uint64_t>> coboundary_basis(int n) {
    int words = (static_cast<int>(binom(n, 2)) + 63) / 64;
    std::vector<std::vector<std::uint64_t>> basis;
    for (int v = 1; v <= n - 1; ++v) {
        std::vector<std::uint64_t> star(words, 0);
        for (int u = 1; u <= n; ++u) {
            if (u == v) continue;
            std::uint32_t e = u < v ? edge_rank(u, v) : edge_rank(v, u);
            star[e >> 6] |= 1ull << (e & 63);
        }
        basis.push_back(std::move(star));
    }
    return basis;
}

inline void xor_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

// reduced-row-echelon basis over F2: distinct pivots, each pivot bit present
// only in its own vector
struct F2Basis {
    std::vector<std::vector<std::uint64_t>> vecs;
    std::vector<int> pivots;

    void reduce(std::vector<std::uint64_t>& v) const {
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            int p = pivots[i];
            if ((v[p >> 6] >> (p & 63)) & 1) xor_into(v, vecs[i]);
        }
    }
    // returns false when v lies in the current span
    bool insert(std::vector<std::uint64_t> v) {
        reduce(v);
        int p = -1;
        for (std::size_t w = 0; w < v.size() && p < 0; ++w)
            if (v[w]) p = static_cast<int>(64 * w) + __builtin_ctzll(v[w]);
        if (p < 0) return false;
        for (std::size_t i = 0; i < vecs.size(); ++i)
            if ((vecs[i][p >> 6] >> (p & 63)) & 1) xor_into(vecs[i], v);
        vecs.push_back(std::move(v));
        pivots.push_back(p);
        return true;
    }
    bool contains(std::vector<std::uint64_t> v) const {
        reduce(v);
        for (auto w : v)
            if (w) return false;
        return true;
    }
};

// minimal support-weight over the affine space f + span(basis); Gray-code
// walk with incremental weight updates
inline std::int64_t min_weight_over_span(const CochainSpace& sp,
                                         std::vector<std::uint64_t> cur,
                                         const std::vector<std::vector<std::uint64_t>>& basis) {
    std::int64_t w = sp.support_weight(cur);
    std::int64_t best = w;
    const std::size_t k = basis.size();
    if (k == 0) return best;
    if (k > 30) throw std::invalid_argument("coset enumeration above 2^30 elements");
    std::uint64_t total = 1ull << k;
    for (std::uint64_t g = 1; g < total; ++g) {
        int bit = __builtin_ctzll(g);
        const auto& bv = basis[bit];
        // incremental: toggling bv changes weight by +deg on newly set bits,
        // -deg on cleared ones
        for (std::size_t word = 0; word < bv.size(); ++word) {
            std::uint64_t x = bv[word];
            while (x) {
                int b = __builtin_ctzll(x);
                std::uint64_t mask = 1ull << b;
                if (cur[word] & mask)
                    w -= sp.deg[64 * word + b];
                else
                    w += sp.deg[64 * word + b];
                x &= x - 1;
            }
        }
        xor_into(cur, basis[bit]);
        if (w < best) best = w;
    }
    return best;
}

}  // namespace detail

// ||f + Z^i|| = min over the coset; tiny n only
inline BigRat coset_norm(const Complex2& c, const std::vector<std::uint32_t>& support, int i) {
    if (i != 0 && i != 1) throw std::invalid_argument("coset_norm: dimension must be 0 or 1");
    if (c.n > 16) throw std::invalid_argument("coset_norm: n above the enumeration cap 16");
    auto sp = detail::cochain_space(c, i);
    std::vector<std::uint64_t> f(sp.words, 0);
    for (auto x : support) {
        if (x >= static_cast<std::uint32_t>(sp.nfaces))
            throw std::invalid_argument("coset_norm: face out of range");
        f[x >> 6] ^= 1ull << (x & 63);
    }
    auto basis = detail::cocycle_basis(c, i);
    std::int64_t best = detail::min_weight_over_span(sp, std::move(f), basis);
    return BigRat(BigInt(best), BigInt(3) * static_cast<std::int64_t>(c.tris.size()));
}

// ---------------------------------------------------------------------------
// syst^1

enum class SystoleMode { Upper, Exact };

// nullopt encodes +infinity (no nontrivial cocycle / no valid cycle found)
inline std::optional<BigRat> systole(const Complex2& c, SystoleMode mode) {
    const std::int64_t den = 3 * static_cast<std::int64_t>(c.tris.size());
    if (mode == SystoleMode::Upper) {
        hom::ValidCycles vc = hom::count_valid_cycles(c, 1);
        if (vc.cycles.empty()) return std::nullopt;
        auto deg = detail::face_degrees(c, 1);
        std::int64_t best = -1;
        for (const auto& cyc : vc.cycles) {
            std::int64_t s = 0;
            for (int j = 0; j < 5; ++j) {
                int a = cyc[j], b = cyc[(j + 1) % 5];
                s += deg[a < b ? edge_rank(a, b) : edge_rank(b, a)];
            }
            if (best < 0 || s < best) best = s;
        }
        return BigRat(BigInt(best), BigInt(den));
    }

    // exact: minimize over Z^1 \ B^1 = nonzero harmonic part
    auto sp = detail::cochain_space(c, 1);
    auto zbasis = detail::cocycle_basis(c, 1);
    auto bbasis = detail::coboundary_basis(c.n);
    // split Z^1 into B^1 ⊕ harmonic lifts by reducing the Z-basis against the
    // star basis over F2
    detail::F2Basis span;
    for (const auto& b : bbasis) span.insert(b);
    std::vector<std::vector<std::uint64_t>> lifts;
    for (const auto& z : zbasis)
        if (span.insert(z)) lifts.push_back(z);  // independent of B^1 and earlier lifts
    if (lifts.empty()) return std::nullopt;  // H^1 = 0: empty feasible set
    if (static_cast<int>(lifts.size() + bbasis.size()) > 24)
        throw std::invalid_argument("systole: exact mode above the 2^24 enumeration cap");

    std::int64_t best = -1;
    std::uint64_t hcombos = 1ull << lifts.size();
    for (std::uint64_t hc = 1; hc < hcombos; ++hc) {
        std::vector<std::uint64_t> f(sp.words, 0);
        for (std::size_t i = 0; i < lifts.size(); ++i)
            if ((hc >> i) & 1) detail::xor_into(f, lifts[i]);
        std::int64_t m = detail::min_weight_over_span(sp, std::move(f), bbasis);
        if (best < 0 || m < best) best = m;
    }
    return BigRat(BigInt(best), BigInt(den));
}

inline std::optional<BigRat> systole(const Hypertree& t, SystoleMode mode) {
    return systole(t.base, mode);
}

// ---------------------------------------------------------------------------
// expansion quotient at tiny n: min over f not in Z^i of ||df|| / ||f + Z^i||

inline BigRat epsilon_tilde(const Complex2& c, int i) {
    if (c.n > 6) throw std::invalid_argument("epsilon_tilde: full scan limited to n <= 6");
    if (i != 0 && i != 1) throw std::invalid_argument("epsilon_tilde: dimension must be 0 or 1");
    auto sp = detail::cochain_space(c, i);

    // coboundary of a packed i-cochain
    auto coboundary = [&](const std::vector<std::uint64_t>& f) {
        if (i == 0) {
            // edges with exactly one endpoint set
            std::vector<std::uint64_t> out((binom(c.n, 2) + 63) / 64, 0);
            for (int b = 2; b <= c.n; ++b)
                for (int a = 1; a < b; ++a) {
                    bool xa = (f[(a - 1) >> 6] >> ((a - 1) & 63)) & 1;
                    bool xb = (f[(b - 1) >> 6] >> ((b - 1) & 63)) & 1;
                    if (xa != xb) {
                        std::uint32_t e = edge_rank(a, b);
                        out[e >> 6] |= 1ull << (e & 63);
                    }
                }
            return out;
        }
        // triangles of T with odd edge intersection; norm lives in top degree
        std::vector<std::uint64_t> out((c.tris.size() + 63) / 64, 0);
        for (std::size_t r = 0; r < c.tris.size(); ++r) {
            Tri tri = tri_unrank(c.tris[r]);
            int k = 0;
            for (std::uint32_t e : {edge_rank(tri.b, tri.c), edge_rank(tri.a, tri.c),
                                    edge_rank(tri.a, tri.b)})
                k += (f[e >> 6] >> (e & 63)) & 1;
            if (k & 1) out[r >> 6] |= 1ull << (r & 63);
        }
        return out;
    };

    // norm of a coboundary: for i=0 it is an edge-supported cochain; for i=1
    // supports are top faces with weight 1/|T(2)| each
    auto cob_weight = [&](const std::vector<std::uint64_t>& df) {
        if (i == 0) {
            auto deg = detail::face_degrees(c, 1);
            return detail::popcount_masked_sum(df, deg);
        }
        std::int64_t cnt = 0;
        for (auto w : df) cnt += __builtin_popcountll(w);
        return cnt * 3;  // weight 1/|T| = 3/(3|T|): keep the common denominator
    };

    auto zbasis = detail::cocycle_basis(c, i);
    if (zbasis.size() > 25) throw std::invalid_argument("epsilon_tilde: cocycle space too large");

    // iterate over coset representatives of C^i / Z^i: the quotient and the
    // norms are constant along Z^i, so one representative per coset suffices.
    // Representatives = combinations of unit cochains on non-pivot
    // coordinates of the echelonized Z basis.
    detail::F2Basis zspan;
    for (const auto& z : zbasis) zspan.insert(z);
    std::vector<char> is_pivot(sp.nfaces, 0);
    for (int p : zspan.pivots) is_pivot[p] = 1;
    std::vector<int> complement;
    for (int x = 0; x < sp.nfaces; ++x)
        if (!is_pivot[x]) complement.push_back(x);

    std::optional<BigRat> best;
    if (complement.size() > 22) throw std::invalid_argument("epsilon_tilde: scan too large");
    std::uint64_t combos = 1ull << complement.size();
    for (std::uint64_t g = 1; g < combos; ++g) {
        std::vector<std::uint64_t> f(sp.words, 0);
        for (std::size_t b = 0; b < complement.size(); ++b)
            if ((g >> b) & 1) f[complement[b] >> 6] ^= 1ull << (complement[b] & 63);
        auto df = coboundary(f);
        std::int64_t num_d = cob_weight(df);
        std::int64_t denom_w = detail::min_weight_over_span(sp, f, zbasis);
        if (denom_w <= 0) throw std::logic_error("epsilon_tilde: zero coset norm off Z^i");
        BigRat q(BigInt(num_d), BigInt(denom_w));
        if (!best || q < *best) best = q;
    }
    if (!best) throw std::domain_error("epsilon_tilde: no non-cocycle exists");
    return *best;
}

// ---------------------------------------------------------------------------
// Theorem 4 event statistics

struct CosysRow {
    std::uint64_t trial = 0;
    bool x_positive = false;
    bool event_7_over_n2 = false;
    std::optional<BigRat> systole_upper;  // nullopt = +infinity
};

struct CosysStats {
    int n = 0;
    std::uint64_t trials = 0, master_seed = 0;
    std::vector<CosysRow> rows;
    std::uint64_t count_x_pos = 0;
    std::uint64_t count_upper_le_cycle_value = 0;  // systole <= 20/(3(n-1)(n-2))
    std::uint64_t count_event_7_over_n2 = 0;
    std::uint64_t norm_equality_violations = 0;  // found cocycle norm != 20/(3(n-1)(n-2))
    std::uint64_t lemma13_violations = 0;

    BigRat cycle_value() const {
        return BigRat(BigInt(20), BigInt(3) * (n - 1) * (n - 2));
    }
    BigRat seven_over_n2() const { return BigRat(BigInt(7), BigInt(n) * n); }
};

inline CosysStats cosys_event_stats(int n, std::uint64_t trials, std::uint64_t master_seed) {
    ProjectionKernel kernel = build_kernel(n);
    const BigRat v(BigInt(20), BigInt(3) * (n - 1) * (n - 2));
    const BigRat seven(BigInt(7), BigInt(n) * n);
    struct Acc {
        std::vector<CosysRow> rows;
        std::uint64_t xpos = 0, le_v = 0, e7 = 0, badnorm = 0, lemma13 = 0;
    };
    Acc tot = parallel_trials<Acc>(
        trials,
        [&](Acc& a, std::uint64_t i) {
            Hypertree t = sample(kernel, SeedScheme{master_seed, i});
            hom::ValidCycles vc = hom::count_valid_cycles(t, 1);
            CosysRow row;
            row.trial = i;
            row.x_positive = vc.x > 0;
            auto deg = detail::face_degrees(t.base, 1);
            if (!vc.cycles.empty()) {
                std::int64_t bests = -1;
                for (const auto& cyc : vc.cycles) {
                    std::int64_t s = 0;
                    for (int j = 0; j < 5; ++j) {
                        int a2 = cyc[j], b2 = cyc[(j + 1) % 5];
                        s += deg[a2 < b2 ? edge_rank(a2, b2) : edge_rank(b2, a2)];
                    }
                    BigRat norm(BigInt(s), BigInt(3) * static_cast<std::int64_t>(t.base.tris.size()));
                    if (norm != v) ++a.badnorm;
                    if (bests < 0 || s < bests) bests = s;
                }
                row.systole_upper =
                    BigRat(BigInt(bests), BigInt(3) * static_cast<std::int64_t>(t.base.tris.size()));
            }
            if (row.x_positive) {
                ++a.xpos;
                if (hom::h1_dim(t, 2) < 1) ++a.lemma13;
            }
            if (row.systole_upper && *row.systole_upper <= v) ++a.le_v;
            row.event_7_over_n2 = row.systole_upper && *row.systole_upper <= seven;
            if (row.event_7_over_n2) ++a.e7;
            a.rows.push_back(std::move(row));
        },
        [](Acc& t, const Acc& a) {
            t.rows.insert(t.rows.end(), a.rows.begin(), a.rows.end());
            t.xpos += a.xpos;
            t.le_v += a.le_v;
            t.e7 += a.e7;
            t.badnorm += a.badnorm;
            t.lemma13 += a.lemma13;
        });
    std::sort(tot.rows.begin(), tot.rows.end(),
              [](const CosysRow& a, const CosysRow& b) { return a.trial < b.trial; });
    CosysStats st;
    st.n = n;
    st.trials = trials;
    st.master_seed = master_seed;
    st.rows = std::move(tot.rows);
    st.count_x_pos = tot.xpos;
    st.count_upper_le_cycle_value = tot.le_v;
    st.count_event_7_over_n2 = tot.e7;
    st.norm_equality_violations = tot.badnorm;
    st.lemma13_violations = tot.lemma13;
    return st;
}

}  // namespace htlab::cosys
