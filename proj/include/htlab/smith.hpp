#pragma once

// Integer Smith normal form, p-adic Sylow invariants, and the small
// factorization helpers needed to read off cokernel structure.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "htlab/intmat.hpp"
#include "htlab/rng.hpp"
#include "htlab/types.hpp"

namespace htlab {

// ---------------------------------------------------------------------------
// factorization (trial division + Brent-Pollard rho)

namespace detail {

inline BigInt pollard_rho(const BigInt& n) {
    // Brent's cycle finding; deterministic parameter sweep
    for (BigInt c = 1; ; ++c) {
        BigInt x = 2, y = 2, d = 1;
        BigInt saved_x = x;
        std::int64_t power = 1, lam = 0;
        while (d == 1) {
            if (lam == power) { saved_x = y; power *= 2; lam = 0; }
            y = (y * y + c) % n;
            ++lam;
            BigInt diff = y > saved_x ? y - saved_x : saved_x - y;
            if (diff == 0) break;  // cycle without factor; retry with next c
            d = boost::multiprecision::gcd(diff, n);
        }
        if (d != 1 && d != n) return d;
    }
}

inline bool is_prime_u64(std::uint64_t m) {
    if (m < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        if (m % p == 0) return m == p;
    }
    std::uint64_t d = m - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // deterministic for all 64-bit inputs with these bases
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, m);
        if (x == 1 || x == m - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, m);
            if (x == m - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

inline bool is_probable_prime(const BigInt& n) {
    if (n < 2) return false;
    if (n < (BigInt(1) << 62)) return is_prime_u64(static_cast<std::uint64_t>(n));
    // Miller-Rabin with fixed bases on the arbitrary-precision path
    BigInt d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                            23ull, 29ull, 31ull, 37ull}) {
        BigInt x = boost::multiprecision::powm(BigInt(a), d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = (x * x) % n;
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

inline void factor_rec(BigInt n, std::map<BigInt, int>& out) {
    if (n <= 1) return;
    if (is_probable_prime(n)) { ++out[n]; return; }
    BigInt d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace detail

inline std::map<BigInt, int> factorize(BigInt n) {
    if (n < 0) n = -n;
    std::map<BigInt, int> out;
    if (n <= 1) return out;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        while (n % p == 0) { ++out[BigInt(p)]; n /= p; }
    }
    for (std::uint64_t p = 17; p < 100000 && BigInt(p) * p <= n; p += 2) {
        while (n % p == 0) { ++out[BigInt(p)]; n /= p; }
    }
    detail::factor_rec(n, out);
    return out;
}

// ---------------------------------------------------------------------------
// invariant factors

struct InvariantFactors {
    // prime -> nondecreasing positive exponents of the Sylow p-part
    std::map<BigInt, std::vector<int>> sylow;
    BigInt order = 1;  // |cok| = prod p^(sum of exponents)

    std::vector<int> exponents(const BigInt& p) const {
        auto it = sylow.find(p);
        return it == sylow.end() ? std::vector<int>{} : it->second;
    }
};

// Full integer Smith normal form; returns the diagonal d_1 | d_2 | ... (all
// nonnegative; zero entries mean a free part).
inline std::vector<BigInt> smith_form(IntMatrix a) {
    int rows = a.rows, cols = a.cols;
    std::vector<BigInt> diag;
    int t = 0;
    auto abscmp = [](const BigInt& x, const BigInt& y) {
        return boost::multiprecision::abs(x) < boost::multiprecision::abs(y);
    };
    while (t < rows && t < cols) {
        // locate a nonzero entry of minimal magnitude
        int pi = -1, pj = -1;
        for (int i = t; i < rows; ++i)
            for (int j = t; j < cols; ++j)
                if (a.at(i, j) != 0 && (pi < 0 || abscmp(a.at(i, j), a.at(pi, pj)))) {
                    pi = i; pj = j;
                }
        if (pi < 0) break;  // all remaining zero
        for (int j = 0; j < cols; ++j) std::swap(a.at(t, j), a.at(pi, j));
        for (int i = 0; i < rows; ++i) std::swap(a.at(i, t), a.at(i, pj));

        bool clean = true;
        for (int i = t + 1; i < rows; ++i) {
            if (a.at(i, t) == 0) continue;
            BigInt q = a.at(i, t) / a.at(t, t);
            for (int j = t; j < cols; ++j) a.at(i, j) -= q * a.at(t, j);
            if (a.at(i, t) != 0) clean = false;
        }
        for (int j = t + 1; j < cols; ++j) {
            if (a.at(t, j) == 0) continue;
            BigInt q = a.at(t, j) / a.at(t, t);
            for (int i = t; i < rows; ++i) a.at(i, j) -= q * a.at(i, t);
            if (a.at(t, j) != 0) clean = false;
        }
        if (!clean) continue;  // smaller remainders appeared; re-pivot

        // pivot must divide the rest of the matrix
        bool divides = true;
        for (int i = t + 1; i < rows && divides; ++i)
            for (int j = t + 1; j < cols; ++j)
                if (a.at(i, j) % a.at(t, t) != 0) {
                    for (int jj = t; jj < cols; ++jj) a.at(t, jj) += a.at(i, jj);
                    divides = false;
                    break;
                }
        if (!divides) continue;

        diag.push_back(boost::multiprecision::abs(a.at(t, t)));
        ++t;
    }
    while (static_cast<int>(diag.size()) < std::min(rows, cols)) diag.push_back(0);
    return diag;
}

inline InvariantFactors invariant_factors_from_diag(const std::vector<BigInt>& diag) {
    InvariantFactors inv;
    for (const BigInt& d : diag) {
        if (d == 0) throw std::domain_error("invariant factors: cokernel has free part");
        inv.order *= d;
        for (auto& [p, e] : factorize(d)) inv.sylow[p].push_back(e);
    }
    for (auto& [p, es] : inv.sylow) std::sort(es.begin(), es.end());
    return inv;
}

// ---------------------------------------------------------------------------
// p-adic Sylow invariants: unit-pivot elimination over Z/p^K, K doubled until
// the exponent list stabilizes. Avoids full integer Smith form cost when the
// determinant is astronomically large.

namespace detail {

// exponents mod p^K; complete=false when entries vanished mod p^K before the
// matrix was exhausted (K too small)
inline bool sylow_at_precision(const IntMatrix& m, const BigInt& p, int K,
                               std::vector<int>& exps) {
    int n = m.rows;
    BigInt mod = pow_big(p, K);
    std::vector<BigInt> a(m.v);
    for (auto& x : a) { x %= mod; if (x < 0) x += mod; }
    auto at = [&](int i, int j) -> BigInt& { return a[std::size_t(i) * n + j]; };

    std::vector<int> act(n);
    for (int i = 0; i < n; ++i) act[i] = i;
    std::vector<int> actc = act;
    exps.clear();

    while (!act.empty()) {
        // entry of minimal p-valuation
        int bi = -1, bj = -1, bv = K;
        for (int i : act)
            for (int j : actc) {
                if (at(i, j) == 0) continue;
                BigInt x = at(i, j);
                int v = 0;
                while (x % p == 0 && v < bv) { x /= p; ++v; }
                if (v < bv) { bv = v; bi = i; bj = j; }
                if (bv == 0) break;
            }
        if (bi < 0) return false;  // everything ≡ 0 mod p^K, precision exhausted

        BigInt pv = pow_big(p, bv);
        BigInt unit = at(bi, bj) / pv;
        BigInt mod_red = pow_big(p, K - bv);
        // inverse of unit mod p^(K-bv)
        BigInt iu = 1;
        {
            // Newton-Hensel inversion from the inverse mod p
            BigInt u0 = unit % p;
            BigInt ip = boost::multiprecision::powm(u0, p - 2, p);
            iu = ip;
            BigInt cur = p;
            while (cur < mod_red) {
                cur *= cur;
                BigInt c = cur < mod_red ? cur : mod_red;
                iu = (iu * (2 - ((unit % c) * iu) % c)) % c;
                if (iu < 0) iu += c;
            }
            iu %= mod_red;
            if (iu < 0) iu += mod_red;
        }

        for (int i : act) {
            if (i == bi || at(i, bj) == 0) continue;
            BigInt f = ((at(i, bj) / pv) * iu) % mod_red;
            for (int j : actc) {
                at(i, j) = (at(i, j) - f * at(bi, j)) % mod;
                if (at(i, j) < 0) at(i, j) += mod;
            }
        }
        for (int j : actc) {
            if (j == bj || at(bi, j) == 0) continue;
            BigInt f = ((at(bi, j) / pv) * iu) % mod_red;
            for (int i : act) {
                at(i, j) = (at(i, j) - f * at(i, bj)) % mod;
                if (at(i, j) < 0) at(i, j) += mod;
            }
        }
        exps.push_back(bv);
        act.erase(std::find(act.begin(), act.end(), bi));
        actc.erase(std::find(actc.begin(), actc.end(), bj));
    }
    return true;
}

}  // namespace detail

// Exponents of the p-part of cok(M) for square nonsingular M.
inline std::vector<int> sylow_invariants(const IntMatrix& m, const BigInt& p) {
    if (m.rows != m.cols) throw std::invalid_argument("sylow_invariants: matrix not square");
    int K = 8;
    std::vector<int> prev, cur;
    bool prev_ok = detail::sylow_at_precision(m, p, K, prev);
    for (;;) {
        K *= 2;
        if (K > (1 << 16))
            throw std::domain_error("sylow_invariants: precision cap hit; matrix is singular?");
        bool ok = detail::sylow_at_precision(m, p, K, cur);
        if (prev_ok && ok && prev == cur) break;
        prev = cur;
        prev_ok = ok;
    }
    std::vector<int> out;
    for (int v : cur)
        if (v > 0) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace htlab
