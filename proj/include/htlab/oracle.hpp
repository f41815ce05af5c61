#pragma once

// Brute-force ground truth at tiny n: full hypertree enumeration with exact
// determinants, the Kalai identity, chi-square goodness of fit for the
// sampler, brute-force cocycle probabilities, and abelian p-group
// automorphism counts.

#include <boost/math/distributions/chi_squared.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/intmat.hpp"
#include "htlab/parallel.hpp"
#include "htlab/types.hpp"

namespace htlab::oracle {

struct HypertreePMF {
    int n = 0;
    struct Entry {
        std::vector<std::uint32_t> tris;  // sorted colex ranks
        std::uint32_t mask = 0;           // bit t set iff triangle rank t present
        std::int64_t absdet = 0;
    };
    std::vector<Entry> entries;  // ordered by combination colex rank
    BigInt normalizer = 0;       // n^C(n-2,2)

    BigRat probability(std::size_t i) const {
        return BigRat(BigInt(entries[i].absdet) * entries[i].absdet, normalizer);
    }
    BigRat total_probability() const {
        BigInt s = 0;
        for (const auto& e : entries) s += BigInt(e.absdet) * e.absdet;
        return BigRat(s, normalizer);
    }
};

namespace detail {

// colex-rank combination unranking: {c_1 < ... < c_k} has rank sum C(c_i, i)
inline std::vector<int> combination_unrank(std::int64_t rank, int m, int k) {
    std::vector<int> c(k);
    for (int i = k; i >= 1; --i) {
        int v = i - 1;
        while (v + 1 < m && binom(v + 1, i) <= rank) ++v;
        c[i - 1] = v;
        rank -= binom(v, i);
    }
    return c;
}

inline bool combination_next(std::vector<int>& c, int m) {
    int k = static_cast<int>(c.size());
    for (int i = 0; i < k; ++i) {
        if (i + 1 < k ? c[i] + 1 < c[i + 1] : c[i] + 1 < m) {
            ++c[i];
            for (int j = 0; j < i; ++j) c[j] = j;
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Scan all C(C(n,3), C(n-1,2)) triangle subsets; keep the nonsingular ones.
// The subset scan partitions the combination space into contiguous rank
// intervals, one per thread.
inline HypertreePMF enumerate_hypertrees(int n) {
    if (n < 4 || n > 6) throw std::invalid_argument("enumerate_hypertrees: n must be 4, 5 or 6");
    const int m = static_cast<int>(binom(n, 3));
    const int k = static_cast<int>(binom(n - 1, 2));
    const std::int64_t total = binom(m, k);
    const Int8Matrix full = reduced_boundary(n);

    struct Acc {
        std::vector<HypertreePMF::Entry> entries;
    };
    unsigned nt = thread_count();
    std::vector<Acc> accs(nt);
    std::vector<std::thread> threads;
    for (unsigned tix = 0; tix < nt; ++tix) {
        std::int64_t lo = total * tix / nt, hi = total * (tix + 1) / nt;
        threads.emplace_back([&, tix, lo, hi] {
            std::vector<int> comb = detail::combination_unrank(lo, m, k);
            std::vector<std::int64_t> w(std::size_t(k) * k);
            for (std::int64_t r = lo; r < hi; ++r) {
                for (int j = 0; j < k; ++j)
                    for (int i = 0; i < k; ++i)
                        w[std::size_t(i) * k + j] = full.at(i, comb[j]);
                std::int64_t det = 0;
                if (!det_int64(w, k, det)) {
                    IntMatrix big(k, k);
                    for (int j = 0; j < k; ++j)
                        for (int i = 0; i < k; ++i) big.at(i, j) = full.at(i, comb[j]);
                    det = static_cast<std::int64_t>(det_exact(big));
                }
                if (det != 0) {
                    HypertreePMF::Entry e;
                    e.absdet = det < 0 ? -det : det;
                    for (int j = 0; j < k; ++j) {
                        e.tris.push_back(static_cast<std::uint32_t>(comb[j]));
                        e.mask |= 1u << comb[j];
                    }
                    accs[tix].entries.push_back(std::move(e));
                }
                if (r + 1 < hi) detail::combination_next(comb, m);
            }
        });
    }
    for (auto& t : threads) t.join();

    HypertreePMF pmf;
    pmf.n = n;
    pmf.normalizer = pow_big(BigInt(n), binom(n - 2, 2));
    for (auto& a : accs)
        for (auto& e : a.entries) pmf.entries.push_back(std::move(e));
    return pmf;
}

// cache file: one line per hypertree, "rank rank ... rank |det|", keyed by n
inline void save_pmf(const HypertreePMF& pmf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_pmf: cannot write " + path);
    out << "n " << pmf.n << "\n";
    for (const auto& e : pmf.entries) {
        for (auto t : e.tris) out << t << ' ';
        out << e.absdet << "\n";
    }
}

inline HypertreePMF load_pmf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_pmf: cannot read " + path);
    std::string tag;
    HypertreePMF pmf;
    in >> tag >> pmf.n;
    if (tag != "n") throw std::runtime_error("load_pmf: bad header");
    const int k = static_cast<int>(binom(pmf.n - 1, 2));
    pmf.normalizer = pow_big(BigInt(pmf.n), binom(pmf.n - 2, 2));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        HypertreePMF::Entry e;
        for (int i = 0; i < k; ++i) {
            std::uint32_t t;
            ls >> t;
            e.tris.push_back(t);
            e.mask |= 1u << t;
        }
        ls >> e.absdet;
        pmf.entries.push_back(std::move(e));
    }
    return pmf;
}

inline HypertreePMF cached_hypertrees(int n, const std::string& cache_dir) {
    namespace fs = std::filesystem;
    if (cache_dir.empty()) return enumerate_hypertrees(n);
    fs::create_directories(cache_dir);
    std::string path = cache_dir + "/hypertree_pmf_n" + std::to_string(n) + ".txt";
    if (fs::exists(path)) return load_pmf(path);
    HypertreePMF pmf = enumerate_hypertrees(n);
    save_pmf(pmf, path);
    return pmf;
}

// ---------------------------------------------------------------------------
// chi-square goodness of fit against the exact pmf

struct GofResult {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t pooled_bins = 0;
};

inline GofResult goodness_of_fit(const HypertreePMF& pmf,
                                 const std::vector<std::vector<std::uint32_t>>& samples) {
    std::map<std::vector<std::uint32_t>, std::size_t> index;
    for (std::size_t i = 0; i < pmf.entries.size(); ++i) index[pmf.entries[i].tris] = i;
    std::vector<std::int64_t> counts(pmf.entries.size(), 0);
    for (const auto& s : samples) {
        auto it = index.find(s);
        if (it == index.end())
            throw std::domain_error("goodness_of_fit: sample outside the pmf support");
        ++counts[it->second];
    }
    const double N = static_cast<double>(samples.size());
    // bins with expected count below 5 are pooled into one
    double chi2 = 0.0;
    int bins = 0;
    double pooled_exp = 0.0;
    std::int64_t pooled_obs = 0;
    std::size_t pooled_members = 0;
    for (std::size_t i = 0; i < pmf.entries.size(); ++i) {
        double e = static_cast<double>(pmf.probability(i)) * N;
        if (e < 5.0) {
            pooled_exp += e;
            pooled_obs += counts[i];
            ++pooled_members;
            continue;
        }
        double d = counts[i] - e;
        chi2 += d * d / e;
        ++bins;
    }
    if (pooled_members > 0 && pooled_exp > 0) {
        double d = pooled_obs - pooled_exp;
        chi2 += d * d / pooled_exp;
        ++bins;
    }
    GofResult r;
    r.chi2 = chi2;
    r.dof = bins - 1;
    r.pooled_bins = pooled_members;
    if (r.dof >= 1) {
        boost::math::chi_squared dist(r.dof);
        r.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
    }
    return r;
}

// ---------------------------------------------------------------------------
// brute-force cocycle probability: sum of det^2/n^C(n-2,2) over enumerated
// hypertrees whose triangles all lie in F0(G) ∪ F2(G)

inline BigRat brute_prob_cocycle(const HypertreePMF& pmf, const CocycleGraph& g) {
    if (pmf.n != g.n) throw std::invalid_argument("brute_prob_cocycle: size mismatch");
    FaceClassification fc = classify_faces(g);
    std::uint32_t allowed = 0;
    for (auto t : fc.F[0]) allowed |= 1u << t;
    for (auto t : fc.F[2]) allowed |= 1u << t;
    BigInt s = 0;
    for (const auto& e : pmf.entries)
        if ((e.mask & ~allowed) == 0) s += BigInt(e.absdet) * e.absdet;
    return BigRat(s, pmf.normalizer);
}

inline BigRat brute_prob_cocycle(int n, const CocycleGraph& g, const std::string& cache_dir = "") {
    return brute_prob_cocycle(cached_hypertrees(n, cache_dir), g);
}

// ---------------------------------------------------------------------------
// |Aut| of an abelian p-group given by its exponent list, by exhaustive
// generator-image search

namespace detail {

struct PGroup {
    std::uint64_t p;
    std::vector<int> exps;          // e_1 <= e_2 <= ...
    std::vector<std::uint64_t> mod; // p^e_i per coordinate
    std::size_t order = 1;

    std::size_t element_count() const { return order; }
};

inline std::vector<int> group_element(const PGroup& g, std::size_t idx) {
    std::vector<int> v(g.exps.size());
    for (std::size_t i = 0; i < g.exps.size(); ++i) {
        v[i] = static_cast<int>(idx % g.mod[i]);
        idx /= g.mod[i];
    }
    return v;
}

inline std::size_t element_index(const PGroup& g, const std::vector<int>& v) {
    std::size_t idx = 0;
    for (std::size_t i = g.exps.size(); i-- > 0;) idx = idx * g.mod[i] + v[i];
    return idx;
}

// multiplicative order of x divides p^e? i.e. p^e * x == 0
inline bool order_divides(const PGroup& g, std::size_t idx, int e) {
    std::uint64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= g.p;
    auto v = group_element(g, idx);
    for (std::size_t i = 0; i < v.size(); ++i)
        if ((static_cast<std::uint64_t>(v[i]) * pe) % g.mod[i] != 0) return false;
    return true;
}

}  // namespace detail

inline std::uint64_t brute_aut_count(const std::vector<int>& exponents, std::uint64_t p) {
    detail::PGroup g;
    g.p = p;
    g.exps = exponents;
    for (int e : exponents) {
        std::uint64_t m = 1;
        for (int i = 0; i < e; ++i) m *= p;
        g.mod.push_back(m);
        g.order *= m;
        if (g.order > 256) throw std::invalid_argument("brute_aut_count: group order above 256");
    }
    if (exponents.empty()) return 1;
    const std::size_t N = g.order;
    const std::size_t k = exponents.size();

    // candidate images per generator (correct order divisibility)
    std::vector<std::vector<std::size_t>> candidates(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t x = 0; x < N; ++x)
            if (detail::order_divides(g, x, exponents[i])) candidates[i].push_back(x);

    // precompute the addition table (N <= 256)
    std::vector<std::uint16_t> add(N * N);
    for (std::size_t x = 0; x < N; ++x) {
        auto xv = detail::group_element(g, x);
        for (std::size_t y = 0; y < N; ++y) {
            auto yv = detail::group_element(g, y);
            std::vector<int> s(k);
            for (std::size_t c = 0; c < k; ++c)
                s[c] = static_cast<int>((std::uint64_t(xv[c]) + yv[c]) % g.mod[c]);
            add[x * N + y] = static_cast<std::uint16_t>(detail::element_index(g, s));
        }
    }

    // BFS closure of the subgroup generated by the chosen images
    auto closure_size = [&](const std::vector<std::size_t>& gens, std::size_t upto) {
        std::vector<char> span(N, 0);
        std::vector<std::uint16_t> work{0};
        span[0] = 1;
        std::size_t sz = 1;
        while (!work.empty()) {
            std::uint16_t x = work.back();
            work.pop_back();
            for (std::size_t gi = 0; gi < upto; ++gi) {
                std::uint16_t y = add[std::size_t(x) * N + gens[gi]];
                if (!span[y]) {
                    span[y] = 1;
                    ++sz;
                    work.push_back(y);
                }
            }
        }
        return sz;
    };

    // DFS over image tuples, pruning branches that cannot reach a generating set
    std::vector<std::uint64_t> suffix(k + 1, 1);
    for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * g.mod[i];

    std::uint64_t count = 0;
    std::vector<std::size_t> chosen(k);
    std::function<void(std::size_t)> dfs = [&](std::size_t level) {
        if (level == k) {
            ++count;  // pruning already guaranteed full span at the last level
            return;
        }
        for (std::size_t x : candidates[level]) {
            chosen[level] = x;
            std::size_t sz = closure_size(chosen, level + 1);
            if (std::uint64_t(sz) * suffix[level + 1] < N) continue;
            dfs(level + 1);
        }
    };
    dfs(0);
    return count;
}

}  // namespace htlab::oracle
