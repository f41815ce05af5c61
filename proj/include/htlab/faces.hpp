#pragma once

// Canonical face encodings and boundary matrices.
//
// Faces are sorted tuples of 1-based vertices; on the wire (and as matrix
// row/column indices) a face is its 0-based colexicographic rank:
//   rank{a<b}   = (b-1)(b-2)/2 + a - 1
//   rank{a<b<c} = (c-1)(c-2)(c-3)/6 + (b-1)(b-2)/2 + a - 1

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "htlab/types.hpp"

namespace htlab {

struct Edge {
    int a = 0, b = 0;  // a < b

    bool operator==(const Edge&) const = default;
};

struct Tri {
    int a = 0, b = 0, c = 0;  // a < b < c

    bool operator==(const Tri&) const = default;

    std::array<Edge, 3> boundary() const {
        return {Edge{b, c}, Edge{a, c}, Edge{a, b}};
    }
};

inline std::uint32_t edge_rank(int a, int b) {
    return static_cast<std::uint32_t>(
        std::int64_t(b - 1) * (b - 2) / 2 + a - 1);
}
inline std::uint32_t edge_rank(Edge e) { return edge_rank(e.a, e.b); }

inline Edge edge_unrank(std::uint32_t r) {
    int b = 2;
    while (std::int64_t(b) * (b - 1) / 2 <= r) ++b;
    int a = static_cast<int>(r - std::int64_t(b - 1) * (b - 2) / 2) + 1;
    return Edge{a, b};
}

inline std::uint32_t tri_rank(int a, int b, int c) {
    return static_cast<std::uint32_t>(
        std::int64_t(c - 1) * (c - 2) * (c - 3) / 6 +
        std::int64_t(b - 1) * (b - 2) / 2 + a - 1);
}
inline std::uint32_t tri_rank(Tri t) { return tri_rank(t.a, t.b, t.c); }

inline Tri tri_unrank(std::uint32_t r) {
    int c = 3;
    while (std::int64_t(c) * (c - 1) * (c - 2) / 6 <= r) ++c;
    std::uint32_t rem = r - static_cast<std::uint32_t>(std::int64_t(c - 1) * (c - 2) * (c - 3) / 6);
    Edge e = edge_unrank(rem);
    return Tri{e.a, e.b, c};
}

// Dense matrix with entries in {-1,0,+1}; widening to exact integer or
// floating point types happens in the linear-algebra layer.
struct Int8Matrix {
    int rows = 0, cols = 0;
    std::vector<std::int8_t> v;

    Int8Matrix() = default;
    Int8Matrix(int r, int c) : rows(r), cols(c), v(std::size_t(r) * c, 0) {}

    std::int8_t& at(int i, int j) { return v[std::size_t(i) * cols + j]; }
    std::int8_t at(int i, int j) const { return v[std::size_t(i) * cols + j]; }
};

// Matrix of the d-th boundary map of the simplex on [n], faces ordered by
// colex rank. Column sigma = {x0<...<xd} has entry (-1)^i at row sigma\{x_i}.
inline Int8Matrix boundary_matrix(int n, int d) {
    if (d != 1 && d != 2) throw std::invalid_argument("boundary_matrix: dimension must be 1 or 2");
    if (n < d + 2) throw std::invalid_argument("boundary_matrix: need n >= d + 2");
    if (d == 1) {
        Int8Matrix m(static_cast<int>(binom(n, 1)), static_cast<int>(binom(n, 2)));
        for (int b = 2; b <= n; ++b)
            for (int a = 1; a < b; ++a) {
                std::uint32_t col = edge_rank(a, b);
                m.at(b - 1, col) = +1;  // drop x0 = a
                m.at(a - 1, col) = -1;  // drop x1 = b
            }
        return m;
    }
    Int8Matrix m(static_cast<int>(binom(n, 2)), static_cast<int>(binom(n, 3)));
    for (int c = 3; c <= n; ++c)
        for (int b = 2; b < c; ++b)
            for (int a = 1; a < b; ++a) {
                std::uint32_t col = tri_rank(a, b, c);
                m.at(edge_rank(b, c), col) = +1;
                m.at(edge_rank(a, c), col) = -1;
                m.at(edge_rank(a, b), col) = +1;
            }
    return m;
}

// Rows of boundary_matrix(n,2) restricted to edges avoiding vertex n.
inline Int8Matrix reduced_boundary(int n) {
    if (n < 4) throw std::invalid_argument("reduced_boundary: need n >= 4");
    Int8Matrix full = boundary_matrix(n, 2);
    int r = static_cast<int>(binom(n - 1, 2));
    Int8Matrix m(r, full.cols);
    // edges inside [n-1] are exactly the first C(n-1,2) colex ranks
    std::copy(full.v.begin(), full.v.begin() + std::size_t(r) * full.cols, m.v.begin());
    return m;
}

// A 2-complex on [n] with complete 1-skeleton, given by its triangles
// (sorted colex ranks).
struct Complex2 {
    int n = 0;
    std::vector<std::uint32_t> tris;

    bool contains(std::uint32_t t) const {
        return std::binary_search(tris.begin(), tris.end(), t);
    }
};

// A hypertree: C(n-1,2) triangles whose reduced square boundary submatrix is
// nonsingular, witnessed by full rank modulo certificate_prime.
struct Hypertree {
    Complex2 base;
    std::uint64_t certificate_prime = 0;
};

// A graph on [n], identified with an F2 1-cochain by its support.
struct CocycleGraph {
    int n = 0;
    std::vector<std::uint32_t> edges;  // sorted colex ranks

    bool contains(std::uint32_t e) const {
        return std::binary_search(edges.begin(), edges.end(), e);
    }
};

// Square submatrix J^r_{n,2}[C(2)]: rows = edges inside [n-1], columns = the
// complex's triangles in colex order.
inline Int8Matrix square_submatrix(const Complex2& c) {
    int n = c.n;
    int r = static_cast<int>(binom(n - 1, 2));
    Int8Matrix m(r, static_cast<int>(c.tris.size()));
    for (int j = 0; j < static_cast<int>(c.tris.size()); ++j) {
        Tri t = tri_unrank(c.tris[j]);
        std::uint32_t bc = edge_rank(t.b, t.c), ac = edge_rank(t.a, t.c), ab = edge_rank(t.a, t.b);
        if (bc < std::uint32_t(r)) m.at(static_cast<int>(bc), j) = +1;
        if (ac < std::uint32_t(r)) m.at(static_cast<int>(ac), j) = -1;
        if (ab < std::uint32_t(r)) m.at(static_cast<int>(ab), j) = +1;
    }
    return m;
}

// Partition of all C(n,3) triangles by |boundary ∩ E(G)|.
struct FaceClassification {
    std::array<std::vector<std::uint32_t>, 4> F;
    // filled when classifying the union of a cycle family: F2 sliced per cycle
    std::vector<std::vector<std::uint32_t>> f2_slices;
};

inline FaceClassification classify_faces(const CocycleGraph& g) {
    FaceClassification fc;
    int n = g.n;
    std::vector<char> in_g(static_cast<std::size_t>(binom(n, 2)), 0);
    for (auto e : g.edges) in_g[e] = 1;
    for (int c = 3; c <= n; ++c)
        for (int b = 2; b < c; ++b)
            for (int a = 1; a < b; ++a) {
                int k = in_g[edge_rank(b, c)] + in_g[edge_rank(a, c)] + in_g[edge_rank(a, b)];
                fc.F[k].push_back(tri_rank(a, b, c));
            }
    return fc;
}

}  // namespace htlab
