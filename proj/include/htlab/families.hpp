#pragma once

// Families of h pairwise vertex-disjoint 5-cycles on [n] (the sets G_{n,h}).
//
// Canonical representative of a single 5-cycle: rooted at its minimal vertex,
// traversed in the direction that makes the second vertex smaller than the
// last. Cycles of a family are sorted by their minimal vertices. This
// de-duplicates the 10^h h! vertex-sequence descriptions of each family.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/types.hpp"

namespace htlab {

struct CycleFamily {
    int n = 0;
    int h = 0;
    // v[i][j]: vertex j of cycle i, canonical form
    std::vector<std::array<int, 5>> cycles;
};

inline BigInt cycle_family_count(int n, int h) {
    if (n < 0 || h < 0) throw std::invalid_argument("cycle_family_count: negative argument");
    if (5 * h > n) return 0;
    BigInt r = 1;
    for (int i = 0; i < 5 * h; ++i) r *= (n - i);
    for (int i = 0; i < h; ++i) r /= 10;
    for (int i = 2; i <= h; ++i) r /= i;
    return r;
}

// Union graph of the family (all 5h edges).
inline CocycleGraph family_union(const CycleFamily& f) {
    CocycleGraph g;
    g.n = f.n;
    for (const auto& cyc : f.cycles)
        for (int j = 0; j < 5; ++j) {
            int u = cyc[j], v = cyc[(j + 1) % 5];
            g.edges.push_back(u < v ? edge_rank(u, v) : edge_rank(v, u));
        }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

// The h component 5-cycles as graphs plus their union.
inline std::pair<std::vector<CocycleGraph>, CocycleGraph> family_components(const CycleFamily& f) {
    std::vector<CocycleGraph> comps;
    comps.reserve(f.cycles.size());
    for (const auto& cyc : f.cycles) {
        CycleFamily single{f.n, 1, {cyc}};
        comps.push_back(family_union(single));
    }
    return {comps, family_union(f)};
}

// F2 of the family's union sliced per cycle: F2_i = consecutive vertex
// triples of cycle i.
inline std::vector<std::vector<std::uint32_t>> family_f2_slices(const CycleFamily& f) {
    std::vector<std::vector<std::uint32_t>> slices;
    for (const auto& cyc : f.cycles) {
        std::vector<std::uint32_t> s;
        for (int j = 0; j < 5; ++j) {
            int x = cyc[j], y = cyc[(j + 1) % 5], z = cyc[(j + 2) % 5];
            if (x > y) std::swap(x, y);
            if (y > z) std::swap(y, z);
            if (x > y) std::swap(x, y);
            s.push_back(tri_rank(x, y, z));
        }
        std::sort(s.begin(), s.end());
        slices.push_back(std::move(s));
    }
    return slices;
}

inline FaceClassification classify_family(const CycleFamily& f) {
    FaceClassification fc = classify_faces(family_union(f));
    fc.f2_slices = family_f2_slices(f);
    return fc;
}

// Restartable stream over canonical families in lexicographic order of the
// flattened vertex grid. Plain backtracking odometer over the 5h positions.
class CycleFamilyEnumerator {
public:
    CycleFamilyEnumerator(int n, int h) : n_(n), h_(h), a_(std::size_t(5) * h, 0) {
        if (n < 0 || h < 0) throw std::invalid_argument("enumerate_cycle_families: negative argument");
        used_.assign(std::size_t(n) + 1, 0);
        if (5 * h > n) done_ = true;
    }

    std::optional<CycleFamily> next() {
        if (done_) return std::nullopt;
        if (h_ == 0) {  // single empty family
            done_ = true;
            return CycleFamily{n_, 0, {}};
        }
        bool ok = started_ ? bump(5 * h_ - 1) : fill(0);
        started_ = true;
        if (!ok) { done_ = true; return std::nullopt; }
        return current();
    }

private:
    CycleFamily current() const {
        CycleFamily f{n_, h_, {}};
        for (int i = 0; i < h_; ++i) {
            std::array<int, 5> c{};
            for (int j = 0; j < 5; ++j) c[j] = a_[5 * i + j];
            f.cycles.push_back(c);
        }
        return f;
    }

    bool valid(int p, int v) const {
        if (used_[v]) return false;
        int i = p / 5, j = p % 5;
        if (j == 0) return i == 0 || v > a_[5 * (i - 1)];
        if (v <= a_[5 * i]) return false;     // root is the cycle minimum
        if (j == 4) return v > a_[5 * i + 1]; // direction: second < last
        return true;
    }

    // fill positions p..5h-1 with the lexicographically smallest valid values
    bool fill(int p) {
        if (p == 5 * h_) return true;
        for (int v = 1; v <= n_; ++v) {
            if (!valid(p, v)) continue;
            a_[p] = v;
            used_[v] = 1;
            if (fill(p + 1)) return true;
            used_[v] = 0;
        }
        a_[p] = 0;
        return false;
    }

    // advance position p to its next valid value (refilling the suffix), or
    // backtrack to p-1
    bool bump(int p) {
        if (p < 0) return false;
        int old = a_[p];
        used_[old] = 0;
        for (int v = old + 1; v <= n_; ++v) {
            if (!valid(p, v)) continue;
            a_[p] = v;
            used_[v] = 1;
            if (fill(p + 1)) return true;
            used_[v] = 0;
        }
        a_[p] = 0;
        return bump(p - 1);
    }

    int n_, h_;
    std::vector<int> a_;
    std::vector<char> used_;
    bool started_ = false;
    bool done_ = false;
};

inline void for_each_cycle_family(int n, int h, const std::function<void(const CycleFamily&)>& fn) {
    CycleFamilyEnumerator e(n, h);
    while (auto f = e.next()) fn(*f);
}

inline std::vector<CycleFamily> all_cycle_families(int n, int h) {
    std::vector<CycleFamily> out;
    for_each_cycle_family(n, h, [&](const CycleFamily& f) { out.push_back(f); });
    return out;
}

}  // namespace htlab
