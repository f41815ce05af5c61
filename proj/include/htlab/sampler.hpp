#pragma once

// Exact sampling from the projection determinantal measure.
//
// Sequential conditional sampling: at step t the residual projection (the
// kernel deflated by the already-selected directions) has trace r - t, and
// the next triangle is drawn with probability residual-diagonal / (r - t).
// The residual projection is maintained in factored form: an orthonormal
// basis W of the span of the selected triangles' boundary chains. Since
// every diagonal entry of K equals 3/n, the draw is a uniform proposal
// accepted with probability d_j / (3/n), which costs O(t) per proposal
// thanks to the 3-sparse boundary chains. Deflation adds one orthonormal
// direction per step with a second orthogonalization pass every 32 steps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/kernel.hpp"
#include "htlab/modp.hpp"
#include "htlab/rng.hpp"

namespace htlab {

struct SamplerDefect : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct GramColumn {
    std::uint32_t e[3];
    double s[3];
};

inline std::vector<GramColumn> gram_columns(int n) {
    std::vector<GramColumn> cols(binom(n, 3));
    for (int c = 3; c <= n; ++c)
        for (int b = 2; b < c; ++b)
            for (int a = 1; a < b; ++a) {
                GramColumn& g = cols[tri_rank(a, b, c)];
                g.e[0] = edge_rank(b, c); g.s[0] = +1.0;
                g.e[1] = edge_rank(a, c); g.s[1] = -1.0;
                g.e[2] = edge_rank(a, b); g.s[2] = +1.0;
            }
    return cols;
}

}  // namespace detail

// Draws the triangle set only (no certificate); building block for sample().
inline std::vector<std::uint32_t> sample_triangles(int n, SeedScheme seed) {
    const int m = static_cast<int>(binom(n, 3));
    const int r = static_cast<int>(binom(n - 1, 2));
    const int N = static_cast<int>(binom(n, 2));
    const auto cols = detail::gram_columns(n);

    RngStream rng(seed);
    std::vector<double> W(std::size_t(N) * r);  // row-major: row = edge, col = step
    std::vector<double> coef(r), u(N);
    std::vector<char> selected(m, 0);
    std::vector<std::uint32_t> picked;
    picked.reserve(r);

    for (int t = 0; t < r; ++t) {
        // rejection draw: uniform proposal, accept with d_j / (3/n)
        std::uint32_t j = 0;
        long proposals = 0;
        for (;;) {
            if (++proposals > (1l << 24))
                throw SamplerDefect("sample: rejection loop failed to terminate");
            j = static_cast<std::uint32_t>(rng.index(m));
            double uacc = rng.u01();
            if (selected[j]) continue;
            const detail::GramColumn& g = cols[j];
            const double* r0 = &W[std::size_t(g.e[0]) * r];
            const double* r1 = &W[std::size_t(g.e[1]) * r];
            const double* r2 = &W[std::size_t(g.e[2]) * r];
            double acc = 0.0;
            for (int s = 0; s < t; ++s) {
                double c = g.s[0] * r0[s] + g.s[1] * r1[s] + g.s[2] * r2[s];
                acc += c * c;
            }
            double resid = 3.0 - acc;  // n * residual diagonal
            if (resid < -1e-9 * n)
                throw SamplerDefect("sample: residual diagonal below clamp threshold");
            if (3.0 * uacc < resid) break;
        }
        selected[j] = 1;
        picked.push_back(j);

        // deflate: orthonormalize the boundary chain of j against W
        const detail::GramColumn& g = cols[j];
        for (int s = 0; s < t; ++s)
            coef[s] = g.s[0] * W[std::size_t(g.e[0]) * r + s] +
                      g.s[1] * W[std::size_t(g.e[1]) * r + s] +
                      g.s[2] * W[std::size_t(g.e[2]) * r + s];
        std::fill(u.begin(), u.end(), 0.0);
        u[g.e[0]] = g.s[0];
        u[g.e[1]] = g.s[1];
        u[g.e[2]] = g.s[2];
        double norm2 = 0.0;
        for (int e = 0; e < N; ++e) {
            const double* row = &W[std::size_t(e) * r];
            double acc = u[e];
            for (int s = 0; s < t; ++s) acc -= coef[s] * row[s];
            u[e] = acc;
            norm2 += acc * acc;
        }
        if (norm2 < 1.5 || (t + 1) % 32 == 0) {  // second orthogonalization pass
            for (int s = 0; s < t; ++s) {
                double c = 0.0;
                for (int e = 0; e < N; ++e) c += u[e] * W[std::size_t(e) * r + s];
                coef[s] = c;
            }
            norm2 = 0.0;
            for (int e = 0; e < N; ++e) {
                const double* row = &W[std::size_t(e) * r];
                double acc = u[e];
                for (int s = 0; s < t; ++s) acc -= coef[s] * row[s];
                u[e] = acc;
                norm2 += acc * acc;
            }
        }
        if (!(norm2 > 1e-12)) throw SamplerDefect("sample: degenerate deflation direction");
        double inv = 1.0 / std::sqrt(norm2);
        for (int e = 0; e < N; ++e) W[std::size_t(e) * r + t] = u[e] * inv;
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

// Full draw: triangle set plus nonsingularity certificate (rank mod a random
// 30-bit prime, retried once with a second prime).
inline Hypertree sample(const ProjectionKernel& k, SeedScheme seed) {
    Complex2 c{k.n, sample_triangles(k.n, seed)};
    RngStream certrng(SeedScheme{seed.trial_seed(), 0x63657274ull});  // "cert" substream
    Int8Matrix sq = square_submatrix(c);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::uint64_t q = random_prime_30bit(certrng);
        if (rank_mod_p(sq, q) == sq.rows) return Hypertree{std::move(c), q};
    }
    throw SamplerDefect(
        "sample: matrix singular modulo two independent random primes (sampler defect)");
}

}  // namespace htlab
