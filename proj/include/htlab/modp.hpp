#pragma once

// Rank computations over F_p. Two paths with identical results:
//   - p = 2: bit-packed rows, XOR elimination (also exposes a nullspace
//     routine used for F2 cocycle bases);
//   - general p < 2^31: word elimination with Shoup-precomputed multipliers.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/intmat.hpp"
#include "htlab/rng.hpp"

namespace htlab {

// ---------------------------------------------------------------------------
// GF(2), bit-packed

struct BitMatrix {
    int rows = 0, cols = 0, words = 0;
    std::vector<std::uint64_t> v;

    BitMatrix() = default;
    BitMatrix(int r, int c)
        : rows(r), cols(c), words((c + 63) / 64), v(std::size_t(r) * words, 0) {}

    void set(int i, int j) { v[std::size_t(i) * words + (j >> 6)] |= 1ull << (j & 63); }
    bool get(int i, int j) const { return (v[std::size_t(i) * words + (j >> 6)] >> (j & 63)) & 1; }
    std::uint64_t* row(int i) { return v.data() + std::size_t(i) * words; }
    const std::uint64_t* row(int i) const { return v.data() + std::size_t(i) * words; }

    static BitMatrix from_int8(const Int8Matrix& m) {
        BitMatrix b(m.rows, m.cols);
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j)
                if (m.at(i, j) & 1) b.set(i, j);
        return b;
    }
};

inline int rank_gf2(BitMatrix m) {
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int w = c >> 6;
        std::uint64_t bit = 1ull << (c & 63);
        int pivot = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.row(i)[w] & bit) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int k = w; k < m.words; ++k) std::swap(m.row(r)[k], m.row(pivot)[k]);
        for (int i = r + 1; i < m.rows; ++i)
            if (m.row(i)[w] & bit)
                for (int k = w; k < m.words; ++k) m.row(i)[k] ^= m.row(r)[k];
        ++r;
    }
    return r;
}

// Basis of the right nullspace {x : Mx = 0} over F2, one packed vector per
// basis element (cols bits each).
inline std::vector<std::vector<std::uint64_t>> nullspace_gf2(BitMatrix m) {
    int nwords = (m.cols + 63) / 64;
    std::vector<int> pivot_col;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int w = c >> 6;
        std::uint64_t bit = 1ull << (c & 63);
        int pivot = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.row(i)[w] & bit) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int k = 0; k < m.words; ++k) std::swap(m.row(r)[k], m.row(pivot)[k]);
        for (int i = 0; i < m.rows; ++i)
            if (i != r && (m.row(i)[w] & bit))
                for (int k = 0; k < m.words; ++k) m.row(i)[k] ^= m.row(r)[k];
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<char> is_pivot(m.cols, 0);
    for (int c : pivot_col) is_pivot[c] = 1;
    std::vector<std::vector<std::uint64_t>> basis;
    for (int c = 0; c < m.cols; ++c) {
        if (is_pivot[c]) continue;
        std::vector<std::uint64_t> x(nwords, 0);
        x[c >> 6] |= 1ull << (c & 63);
        for (int i = 0; i < r; ++i)
            if (m.get(i, c)) x[pivot_col[i] >> 6] |= 1ull << (pivot_col[i] & 63);
        basis.push_back(std::move(x));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// general prime modulus, p < 2^31

namespace detail {

// Shoup multiplication: for fixed f, precompute floor(f * 2^64 / p); then
// f*b mod p costs two multiplies and a correction.
struct ShoupMul {
    std::uint64_t f, fp, p;
    ShoupMul(std::uint64_t f_, std::uint64_t p_) : f(f_), p(p_) {
        fp = static_cast<std::uint64_t>((static_cast<unsigned __int128>(f_) << 64) / p_);
    }
    std::uint64_t operator()(std::uint64_t b) const {
        std::uint64_t q = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(fp) * b) >> 64);
        std::uint64_t r = f * b - q * p;
        return r >= p ? r - p : r;
    }
};

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    return powmod_u64(a, p - 2, p);
}

}  // namespace detail

// Rank of a row-major matrix with entries already reduced mod p.
inline int rank_mod_p_words(std::vector<std::uint32_t>& m, int rows, int cols, std::uint64_t p) {
    auto row = [&](int i) { return m.data() + std::size_t(i) * cols; };
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int pivot = -1;
        for (int i = r; i < rows; ++i)
            if (row(i)[c] != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != r)
            for (int j = c; j < cols; ++j) std::swap(row(r)[j], row(pivot)[j]);
        std::uint64_t ipiv = detail::inv_mod(row(r)[c], p);
        for (int i = r + 1; i < rows; ++i) {
            std::uint64_t a = row(i)[c];
            if (a == 0) continue;
            std::uint64_t f = detail::mulmod_u64(a, ipiv, p);
            detail::ShoupMul mul(p - f, p);  // row_i += (p - f) * row_r
            const std::uint32_t* src = row(r);
            std::uint32_t* dst = row(i);
            for (int j = c; j < cols; ++j) {
                std::uint64_t t = dst[j] + mul(src[j]);
                dst[j] = static_cast<std::uint32_t>(t >= p ? t - p : t);
            }
        }
        ++r;
    }
    return r;
}

inline std::vector<std::uint32_t> reduce_int8_mod_p(const Int8Matrix& m, std::uint64_t p) {
    std::vector<std::uint32_t> w(m.v.size());
    for (std::size_t i = 0; i < m.v.size(); ++i) {
        int e = m.v[i];  // entries are in {-1,0,+1}
        w[i] = static_cast<std::uint32_t>(e >= 0 ? std::uint64_t(e) : p + e);
    }
    return w;
}

inline int rank_mod_p(const Int8Matrix& m, std::uint64_t p) {
    if (!is_prime_u32(p)) throw std::invalid_argument("rank_mod_p: modulus is not prime");
    if (p == 2) return rank_gf2(BitMatrix::from_int8(m));
    auto w = reduce_int8_mod_p(m, p);
    return rank_mod_p_words(w, m.rows, m.cols, p);
}

inline int rank_mod_p(const IntMatrix& m, std::uint64_t p) {
    if (!is_prime_u32(p)) throw std::invalid_argument("rank_mod_p: modulus is not prime");
    if (p == 2) {
        BitMatrix b(m.rows, m.cols);
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j)
                if (m.at(i, j) % 2 != 0) b.set(i, j);
        return rank_gf2(std::move(b));
    }
    std::vector<std::uint32_t> w(m.v.size());
    const BigInt bp = p;
    for (std::size_t i = 0; i < m.v.size(); ++i) {
        BigInt r = m.v[i] % bp;
        if (r < 0) r += bp;
        w[i] = static_cast<std::uint32_t>(r);
    }
    return rank_mod_p_words(w, m.rows, m.cols, p);
}

}  // namespace htlab
