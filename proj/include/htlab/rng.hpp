#pragma once

// Deterministic seeding: one 64-bit master seed, one counter-mode SplitMix64
// stream per trial. Identical (master, trial_index) pairs reproduce identical
// draw sequences, which makes every report reproducible byte for byte.

#include <cstdint>

namespace htlab {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

struct SeedScheme {
    std::uint64_t master = 0;
    std::uint64_t trial_index = 0;

    std::uint64_t trial_seed() const { return mix64(master ^ (trial_index * kGolden)); }
};

class RngStream {
public:
    explicit RngStream(SeedScheme s) : state_(s.trial_seed()) {}
    explicit RngStream(std::uint64_t raw_seed) : state_(raw_seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // uniform in [0,1), 53 random bits
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform index in [0, m) by 128-bit multiply (no modulo bias worth caring
    // about at these ranges, and bit-exact across runs)
    std::uint64_t index(std::uint64_t m) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * m) >> 64);
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % m);
}
inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}
}  // namespace detail

// Deterministic Miller-Rabin, valid for all m < 3'215'031'751
inline bool is_prime_u32(std::uint64_t m) {
    if (m < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
        if (m % p == 0) return m == p;
    }
    std::uint64_t d = m - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull}) {
        std::uint64_t x = detail::powmod_u64(a, d, m);
        if (x == 1 || x == m - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = detail::mulmod_u64(x, x, m);
            if (x == m - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// random prime in [2^29, 2^30)
inline std::uint64_t random_prime_30bit(RngStream& rng) {
    for (;;) {
        std::uint64_t c = (rng.next() & ((1ull << 30) - 1)) | (1ull << 29) | 1ull;
        if (is_prime_u32(c)) return c;
    }
}

}  // namespace htlab
