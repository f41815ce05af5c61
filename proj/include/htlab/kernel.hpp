#pragma once

// Projection kernel of the determinantal hypertree measure on triangles:
// K = A^T (A A^T)^{-1} A with A the reduced boundary matrix. Principal minors
// of K are inclusion probabilities.
//
// The same projection has closed-form entries: K[s,t] = <ds,dt>/n (boundary
// chains of the two triangles). build_kernel materializes the solve-based
// dense matrix up to a size cap and the closed form serves as the entry
// oracle beyond it; the two are cross-checked in tests.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/types.hpp"

namespace htlab {

enum class KernelMode { Exact, Float };

// <boundary(s), boundary(t)> as an integer in {-1,0,1,3} * (shared-edge sign)
inline int boundary_inner_product(std::uint32_t s, std::uint32_t t) {
    if (s == t) return 3;
    Tri a = tri_unrank(s), b = tri_unrank(t);
    int av[3] = {a.a, a.b, a.c}, bv[3] = {b.a, b.b, b.c};
    int sa[2], sb[2], cnt = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (av[i] == bv[j]) {
                if (cnt < 2) { sa[cnt] = i; sb[cnt] = j; }
                ++cnt;
            }
    if (cnt != 2) return 0;
    // sign of edge {x,y} inside triangle {v0<v1<v2} is (-1)^(index of the
    // dropped vertex); dropped index = 3 - i - j for shared positions i, j
    int sgn_a = ((3 - sa[0] - sa[1]) % 2 == 0) ? 1 : -1;
    int sgn_b = ((3 - sb[0] - sb[1]) % 2 == 0) ? 1 : -1;
    return sgn_a * sgn_b;
}

struct ProjectionKernel {
    int n = 0;
    int m = 0;   // number of triangles C(n,3)
    int r = 0;   // rank C(n-1,2)
    KernelMode mode = KernelMode::Float;
    std::optional<Eigen::MatrixXd> dense;            // solve-based K
    std::optional<std::vector<BigRat>> exact;        // exact-mode K entries

    double entry(std::uint32_t s, std::uint32_t t) const {
        if (dense) return (*dense)(s, t);
        return static_cast<double>(boundary_inner_product(s, t)) / n;
    }
    const BigRat& exact_entry(std::uint32_t s, std::uint32_t t) const {
        return (*exact)[std::size_t(s) * m + t];
    }
};

struct KernelOptions {
    KernelMode mode = KernelMode::Float;
    int dense_cap_n = 24;  // materialize dense K only up to this n
};

inline ProjectionKernel build_kernel(int n, KernelOptions opt = {}) {
    if (n < 4) throw std::invalid_argument("build_kernel: need n >= 4");
    ProjectionKernel k;
    k.n = n;
    k.m = static_cast<int>(binom(n, 3));
    k.r = static_cast<int>(binom(n - 1, 2));
    k.mode = opt.mode;
    if (opt.mode == KernelMode::Exact && n > 8)
        throw std::invalid_argument("build_kernel: exact mode is limited to n <= 8");
    if (opt.mode == KernelMode::Float && n > opt.dense_cap_n) return k;  // implicit kernel

    Int8Matrix a = reduced_boundary(n);
    if (opt.mode == KernelMode::Exact) {
        // G = A A^T over the integers, inverted in exact rationals
        std::vector<BigRat> g(std::size_t(k.r) * k.r);
        for (int i = 0; i < k.r; ++i)
            for (int j = 0; j < k.r; ++j) {
                std::int64_t s = 0;
                for (int c = 0; c < k.m; ++c) s += std::int64_t(a.at(i, c)) * a.at(j, c);
                g[std::size_t(i) * k.r + j] = s;
            }
        // Gauss-Jordan inverse
        std::vector<BigRat> inv(std::size_t(k.r) * k.r);
        for (int i = 0; i < k.r; ++i) inv[std::size_t(i) * k.r + i] = 1;
        for (int c = 0; c < k.r; ++c) {
            int piv = -1;
            for (int i = c; i < k.r; ++i)
                if (g[std::size_t(i) * k.r + c] != 0) { piv = i; break; }
            if (piv < 0) throw std::domain_error("build_kernel: A A^T singular");
            for (int j = 0; j < k.r; ++j) {
                std::swap(g[std::size_t(c) * k.r + j], g[std::size_t(piv) * k.r + j]);
                std::swap(inv[std::size_t(c) * k.r + j], inv[std::size_t(piv) * k.r + j]);
            }
            BigRat d = g[std::size_t(c) * k.r + c];
            for (int j = 0; j < k.r; ++j) {
                g[std::size_t(c) * k.r + j] /= d;
                inv[std::size_t(c) * k.r + j] /= d;
            }
            for (int i = 0; i < k.r; ++i) {
                if (i == c) continue;
                BigRat f = g[std::size_t(i) * k.r + c];
                if (f == 0) continue;
                for (int j = 0; j < k.r; ++j) {
                    g[std::size_t(i) * k.r + j] -= f * g[std::size_t(c) * k.r + j];
                    inv[std::size_t(i) * k.r + j] -= f * inv[std::size_t(c) * k.r + j];
                }
            }
        }
        // K = A^T inv A, exploiting column sparsity of A
        std::vector<std::vector<std::pair<int, int>>> colnz(k.m);
        for (int c = 0; c < k.m; ++c)
            for (int i = 0; i < k.r; ++i)
                if (a.at(i, c) != 0) colnz[c].push_back({i, a.at(i, c)});
        std::vector<BigRat> kx(std::size_t(k.m) * k.m);
        for (int s = 0; s < k.m; ++s)
            for (int t = 0; t < k.m; ++t) {
                BigRat acc = 0;
                for (auto [i, si] : colnz[s])
                    for (auto [j, sj] : colnz[t])
                        acc += BigRat(si * sj) * inv[std::size_t(i) * k.r + j];
                kx[std::size_t(s) * k.m + t] = acc;
            }
        Eigen::MatrixXd kd(k.m, k.m);
        for (int s = 0; s < k.m; ++s)
            for (int t = 0; t < k.m; ++t)
                kd(s, t) = static_cast<double>(kx[std::size_t(s) * k.m + t]);
        k.exact = std::move(kx);
        k.dense = std::move(kd);
        return k;
    }

    // float mode: symmetric positive definite solve
    Eigen::MatrixXd ad(k.r, k.m);
    for (int i = 0; i < k.r; ++i)
        for (int j = 0; j < k.m; ++j) ad(i, j) = a.at(i, j);
    Eigen::MatrixXd g = ad * ad.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw std::domain_error("build_kernel: LLT failed");
    Eigen::MatrixXd x = llt.solve(ad);
    k.dense = ad.transpose() * x;
    return k;
}

// det of the principal minor K[F,F] = P(F subset of T_n).
inline double inclusion_prob(const ProjectionKernel& k, const std::vector<std::uint32_t>& faces) {
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = i + 1; j < faces.size(); ++j)
            if (faces[i] == faces[j])
                throw std::invalid_argument("inclusion_prob: duplicate faces");
    const int f = static_cast<int>(faces.size());
    if (f == 0) return 1.0;
    Eigen::MatrixXd minor(f, f);
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j) minor(i, j) = k.entry(faces[i], faces[j]);
    return minor.determinant();
}

}  // namespace htlab
