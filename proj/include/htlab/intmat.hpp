#pragma once

// Exact integer matrices: fraction-free (Bareiss) determinant and rank.
// Entry growth stays polynomial because every division in the Bareiss
// recurrence is exact.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/types.hpp"

namespace htlab {

struct IntMatrix {
    int rows = 0, cols = 0;
    std::vector<BigInt> v;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), v(std::size_t(r) * c, 0) {}

    static IntMatrix from_int8(const Int8Matrix& m) {
        IntMatrix r(m.rows, m.cols);
        for (std::size_t i = 0; i < m.v.size(); ++i) r.v[i] = m.v[i];
        return r;
    }

    BigInt& at(int i, int j) { return v[std::size_t(i) * cols + j]; }
    const BigInt& at(int i, int j) const { return v[std::size_t(i) * cols + j]; }

    IntMatrix transpose() const {
        IntMatrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols != o.rows) throw std::invalid_argument("IntMatrix: shape mismatch");
        IntMatrix r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                if (at(i, k) == 0) continue;
                for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
            }
        return r;
    }
};

// Exact determinant by fraction-free elimination.
inline BigInt det_exact(IntMatrix m) {
    if (m.rows != m.cols) throw std::invalid_argument("det_exact: matrix not square");
    int n = m.rows;
    if (n == 0) return 1;
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { pivot = i; break; }
            if (pivot < 0) return 0;
            for (int j = k; j < n; ++j) std::swap(m.at(k, j), m.at(pivot, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
            }
            m.at(i, k) = 0;
        }
        prev = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

// Rank over the rationals, same fraction-free scheme with column pivoting.
inline int rank_exact(IntMatrix m) {
    int r = 0;
    BigInt prev = 1;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int pivot = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.at(i, c) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int j = c; j < m.cols; ++j) std::swap(m.at(r, j), m.at(pivot, j));
        for (int i = r + 1; i < m.rows; ++i) {
            for (int j = c + 1; j < m.cols; ++j)
                m.at(i, j) = (m.at(i, j) * m.at(r, c) - m.at(i, c) * m.at(r, j)) / prev;
            m.at(i, c) = 0;
        }
        prev = m.at(r, c);
        ++r;
    }
    return r;
}

// int64 Bareiss determinant with overflow guard; returns false on overflow so
// callers can fall back to the arbitrary-precision path. Used by the oracle's
// subset scan where entries are tiny.
inline bool det_int64(std::vector<std::int64_t>& m, int n, std::int64_t& out) {
    constexpr std::int64_t kGuard = std::int64_t(1) << 31;
    auto at = [&](int i, int j) -> std::int64_t& { return m[std::size_t(i) * n + j]; };
    if (n == 0) { out = 1; return true; }
    std::int64_t prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (at(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < n; ++i)
                if (at(i, k) != 0) { pivot = i; break; }
            if (pivot < 0) { out = 0; return true; }
            for (int j = k; j < n; ++j) std::swap(at(k, j), at(pivot, j));
            sign = -sign;
        }
        if (at(k, k) >= kGuard || at(k, k) <= -kGuard) return false;
        for (int i = k + 1; i < n; ++i) {
            if (at(i, k) >= kGuard || at(i, k) <= -kGuard) return false;
            for (int j = k + 1; j < n; ++j) {
                if (at(k, j) >= kGuard || at(k, j) <= -kGuard ||
                    at(i, j) >= kGuard || at(i, j) <= -kGuard)
                    return false;
                at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
            }
            at(i, k) = 0;
        }
        prev = at(k, k);
    }
    out = sign > 0 ? at(n - 1, n - 1) : -at(n - 1, n - 1);
    return true;
}

}  // namespace htlab
