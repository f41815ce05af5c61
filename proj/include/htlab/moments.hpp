#pragma once

// Exact and Monte Carlo evaluation of E[X_n] and E[X_n^2], the closed-form
// cocycle probability P(G ∈ Z^1(T_n, F2)) = 2^{2h} det(M_G) / n^C(n-2,2),
// its spectral verification, the overlap combinatorics, and the
// Paley-Zygmund bound.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "htlab/faces.hpp"
#include "htlab/families.hpp"
#include "htlab/homology.hpp"
#include "htlab/intmat.hpp"
#include "htlab/kernel.hpp"
#include "htlab/parallel.hpp"
#include "htlab/sampler.hpp"
#include "htlab/spectra.hpp"

namespace htlab::mom {

// natural log of a positive rational at 100-digit working precision
inline long double log_rational(const BigRat& p) {
    using F = boost::multiprecision::cpp_bin_float_100;
    F num(boost::multiprecision::numerator(p));
    F den(boost::multiprecision::denominator(p));
    return static_cast<long double>(
        (boost::multiprecision::log(num) - boost::multiprecision::log(den)).convert_to<double>());
}

inline long double log_bigint(const BigInt& v) {
    using F = boost::multiprecision::cpp_bin_float_100;
    return static_cast<long double>(boost::multiprecision::log(F(v)).convert_to<double>());
}

// Exchangeability lets us assume vertex n is isolated; swap n for the
// smallest unused vertex when the family touches it.
inline CycleFamily relabel_avoiding_last(const CycleFamily& f) {
    bool touches = false;
    std::vector<char> used(std::size_t(f.n) + 1, 0);
    for (const auto& c : f.cycles)
        for (int v : c) {
            used[v] = 1;
            if (v == f.n) touches = true;
        }
    if (!touches) return f;
    int sub = 0;
    for (int v = 1; v < f.n; ++v)
        if (!used[v]) { sub = v; break; }
    if (sub == 0) throw std::invalid_argument("relabel: family occupies every vertex");
    CycleFamily out = f;
    for (auto& c : out.cycles)
        for (int& v : c)
            if (v == f.n) v = sub;
    return out;
}

namespace detail {

// row index of each edge of the complement graph Gbar (edges inside [n-1]
// not in E(G)), by ascending colex rank; -1 elsewhere
inline std::vector<int> gbar_row_index(int n, const CocycleGraph& g, int& rows) {
    const int ne = static_cast<int>(binom(n - 1, 2));
    std::vector<int> idx(binom(n, 2), -1);
    std::vector<char> in_g(binom(n, 2), 0);
    for (auto e : g.edges) in_g[e] = 1;
    rows = 0;
    for (int e = 0; e < ne; ++e)
        if (!in_g[e]) idx[e] = rows++;
    return idx;
}

struct GramAccumulator {
    int dim;
    std::vector<std::int64_t> a;
    explicit GramAccumulator(int d) : dim(d), a(std::size_t(d) * d, 0) {}
    void add_column(const int* rows_idx, const int* signs, int cnt) {
        for (int i = 0; i < cnt; ++i)
            for (int j = 0; j < cnt; ++j)
                a[std::size_t(rows_idx[i]) * dim + rows_idx[j]] += signs[i] * signs[j];
    }
};

// M_G = J^r[E(Gbar), cols] (J^r[E(Gbar), cols])^T accumulated column by column
inline GramAccumulator gram_over_columns(int n, const std::vector<int>& row_idx, int rows,
                                         const std::vector<std::uint32_t>& cols) {
    GramAccumulator acc(rows);
    for (auto t : cols) {
        Tri tri = tri_unrank(t);
        std::uint32_t er[3] = {edge_rank(tri.b, tri.c), edge_rank(tri.a, tri.c),
                               edge_rank(tri.a, tri.b)};
        int sg[3] = {+1, -1, +1};
        int ridx[3], rsg[3], cnt = 0;
        for (int i = 0; i < 3; ++i)
            if (row_idx[er[i]] >= 0) {
                ridx[cnt] = row_idx[er[i]];
                rsg[cnt] = sg[i];
                ++cnt;
            }
        acc.add_column(ridx, rsg, cnt);
    }
    return acc;
}

}  // namespace detail

// M_G over F0 as an exact integer matrix (after internal relabeling).
inline IntMatrix build_mg_int(int n, const CycleFamily& family) {
    CycleFamily f = relabel_avoiding_last(family);
    for (const auto& c : f.cycles)
        for (int v : c)
            if (v == n) throw std::logic_error("build_mg: family touches vertex n after relabel");
    CocycleGraph g = family_union(f);
    FaceClassification fc = classify_faces(g);
    int rows = 0;
    auto row_idx = detail::gbar_row_index(n, g, rows);
    auto acc = detail::gram_over_columns(n, row_idx, rows, fc.F[0]);
    IntMatrix m(rows, rows);
    for (std::size_t i = 0; i < acc.a.size(); ++i) m.v[i] = acc.a[i];
    return m;
}

inline Eigen::MatrixXd to_dense(const IntMatrix& m) {
    Eigen::MatrixXd d(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) d(i, j) = static_cast<double>(m.at(i, j));
    return d;
}

// N_G and M'_G from their own definitions (for the M_G = nI - N_G - M'_G check)
inline IntMatrix build_ng_int(int n, const CycleFamily& family) {
    CycleFamily f = relabel_avoiding_last(family);
    CocycleGraph g = family_union(f);
    int rows = 0;
    auto row_idx = detail::gbar_row_index(n, g, rows);
    // N_G = (J_{n-1,1}[*, E(Gbar)])^T J_{n-1,1}[*, E(Gbar)]: entries over shared
    // vertices of Gbar edge pairs
    IntMatrix m(rows, rows);
    const int ne = static_cast<int>(binom(n - 1, 2));
    std::vector<std::uint32_t> edges;
    for (int e = 0; e < ne; ++e)
        if (row_idx[e] >= 0) edges.push_back(e);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        Edge a = edge_unrank(edges[i]);
        for (std::size_t j = 0; j < edges.size(); ++j) {
            Edge b = edge_unrank(edges[j]);
            int dot = 0;  // <d_a, d_b> with d{x<y} = e_y - e_x
            if (i == j) dot = 2;
            else {
                if (a.a == b.a) dot += 1;
                if (a.b == b.b) dot += 1;
                if (a.a == b.b) dot -= 1;
                if (a.b == b.a) dot -= 1;
            }
            m.at(static_cast<int>(i), static_cast<int>(j)) = dot;
        }
    }
    return m;
}

inline IntMatrix build_mgprime_int(int n, const CycleFamily& family) {
    CycleFamily f = relabel_avoiding_last(family);
    CocycleGraph g = family_union(f);
    FaceClassification fc = classify_faces(g);
    int rows = 0;
    auto row_idx = detail::gbar_row_index(n, g, rows);
    std::vector<std::uint32_t> f12 = fc.F[1];
    f12.insert(f12.end(), fc.F[2].begin(), fc.F[2].end());
    std::sort(f12.begin(), f12.end());
    auto acc = detail::gram_over_columns(n, row_idx, rows, f12);
    IntMatrix m(rows, rows);
    for (std::size_t i = 0; i < acc.a.size(); ++i) m.v[i] = acc.a[i];
    return m;
}

// ---------------------------------------------------------------------------
// P(G ∈ Z^1(T_n, F2)): exact rational for n <= 8, log-domain real otherwise

struct CocycleProb {
    std::optional<BigRat> rational;  // set in rational mode
    long double log_value = 0.0L;    // natural log, always set
};

enum class ProbMode { Auto, Rational, Log };

inline CocycleProb exact_prob_cocycle(int n, const CycleFamily& family,
                                      ProbMode mode = ProbMode::Auto) {
    if (family.n != n) throw std::invalid_argument("exact_prob_cocycle: vertex count mismatch");
    const int h = family.h;
    bool rational = (mode == ProbMode::Rational) || (mode == ProbMode::Auto && n <= 8);
    IntMatrix mg = build_mg_int(n, family);
    CocycleProb out;
    if (rational) {
        BigInt det = det_exact(mg);
        if (det < 0) throw std::logic_error("exact_prob_cocycle: negative det of a Gram matrix");
        BigRat p(pow_big(BigInt(2), 2 * h) * det, pow_big(BigInt(n), binom(n - 2, 2)));
        out.rational = p;
        out.log_value = p == 0 ? -std::numeric_limits<long double>::infinity() : log_rational(p);
        return out;
    }
    // log mode: verify positive definiteness per the spectrum lemma, then a
    // symmetric factorization with compensated accumulation
    Eigen::MatrixXd mgd = to_dense(mg);
    long double logdet;
    try {
        auto ev = sym_eigenvalues(mgd);
        if (ev.empty() || ev.back() < 1.0 - 1e-6)
            logdet = logdet_from_eigenvalues(ev);  // falls through on small n
        else
            logdet = logdet_spd(mgd);
    } catch (const std::domain_error&) {
        logdet = logdet_from_eigenvalues(sym_eigenvalues(mgd));
    }
    CompensatedSum s;
    s.add(2.0L * h * std::log(2.0L));
    s.add(logdet);
    s.add(-static_cast<long double>(binom(n - 2, 2)) * std::log(static_cast<long double>(n)));
    out.log_value = s.value();
    return out;
}

// E[X_n] = |G_{n,h}| * P(one family), by exchangeability under relabeling
struct ExpectedX {
    long double log_value = 0.0L;
    std::optional<BigRat> rational;
    BigInt family_count;
};

inline ExpectedX expected_x_exact(int n, int h, ProbMode mode = ProbMode::Auto) {
    if (5 * h >= n) throw std::invalid_argument("expected_x_exact: need 5h < n for relabeling");
    CycleFamily f{n, h, {}};
    for (int i = 0; i < h; ++i) {
        std::array<int, 5> c{};
        for (int j = 0; j < 5; ++j) c[j] = 5 * i + j + 1;
        f.cycles.push_back(c);
    }
    CocycleProb p = exact_prob_cocycle(n, f, mode);
    ExpectedX e;
    e.family_count = cycle_family_count(n, h);
    e.log_value = p.log_value + log_bigint(e.family_count);
    if (p.rational) e.rational = *p.rational * BigRat(e.family_count);
    return e;
}

// ---------------------------------------------------------------------------
// Monte Carlo moments and the Paley-Zygmund consistency data

struct MomentReport {
    int n = 0, h = 0;
    std::uint64_t trials = 0, master_seed = 0;
    bool empty = false;  // trials == 0
    long double exact_log_ex = 0.0L;
    double mean_x = 0, mean_x2 = 0, p_pos = 0;
    double se_x = 0, se_x2 = 0, se_p = 0;
    double pz_bound = 0, pz_se = 0;
    std::uint64_t lemma13_violations = 0;
    std::uint64_t x_pos_count = 0;

    double ci95_x_lo() const { return mean_x - 1.96 * se_x; }
    double ci95_x_hi() const { return mean_x + 1.96 * se_x; }
    double ci95_x2_hi() const { return mean_x2 + 1.96 * se_x2; }
    // combined stderr for the PZ sample-level consistency check
    double pz_combined_se() const { return std::sqrt(se_p * se_p + pz_se * pz_se); }
    bool pz_consistent() const {
        return p_pos >= pz_bound - 3.0 * pz_combined_se();
    }
};

inline MomentReport mc_moments(int n, int h, std::uint64_t trials, std::uint64_t master_seed) {
    ProjectionKernel kernel = build_kernel(n);
    struct Acc {
        long double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        std::uint64_t pos = 0, viol = 0;
    };
    Acc tot = parallel_trials<Acc>(
        trials,
        [&](Acc& a, std::uint64_t i) {
            Hypertree t = sample(kernel, SeedScheme{master_seed, i});
            hom::ValidCycles vc = hom::count_valid_cycles(t, h);
            long double x = static_cast<long double>(vc.x);
            a.s1 += x;
            a.s2 += x * x;
            a.s3 += x * x * x;
            a.s4 += x * x * x * x;
            if (vc.x > 0) {
                ++a.pos;
                if (hom::h1_dim(t, 2) < h) ++a.viol;
            }
        },
        [](Acc& t, const Acc& a) {
            t.s1 += a.s1; t.s2 += a.s2; t.s3 += a.s3; t.s4 += a.s4;
            t.pos += a.pos; t.viol += a.viol;
        });

    MomentReport r;
    r.n = n;
    r.h = h;
    r.trials = trials;
    r.master_seed = master_seed;
    r.exact_log_ex = expected_x_exact(n, h, n <= 8 ? ProbMode::Auto : ProbMode::Log).log_value;
    r.lemma13_violations = tot.viol;
    r.x_pos_count = tot.pos;
    if (trials == 0) { r.empty = true; return r; }
    const double N = static_cast<double>(trials);
    double m1 = static_cast<double>(tot.s1) / N;
    double m2 = static_cast<double>(tot.s2) / N;
    double m3 = static_cast<double>(tot.s3) / N;
    double m4 = static_cast<double>(tot.s4) / N;
    r.mean_x = m1;
    r.mean_x2 = m2;
    r.p_pos = static_cast<double>(tot.pos) / N;
    double var_x = std::max(0.0, m2 - m1 * m1);
    double var_x2 = std::max(0.0, m4 - m2 * m2);
    double cov = m3 - m1 * m2;
    r.se_x = std::sqrt(var_x / N);
    r.se_x2 = std::sqrt(var_x2 / N);
    r.se_p = std::sqrt(std::max(0.0, r.p_pos * (1 - r.p_pos)) / N);
    if (m2 > 0) {
        r.pz_bound = m1 * m1 / m2;
        // delta method on f(m1,m2) = m1^2/m2
        double d1 = 2 * m1 / m2, d2 = -m1 * m1 / (m2 * m2);
        double v = d1 * d1 * var_x / N + d2 * d2 * var_x2 / N + 2 * d1 * d2 * cov / N;
        r.pz_se = std::sqrt(std::max(0.0, v));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Lemma 10 spectral verification

struct SpectrumReport {
    int n = 0, h = 0;
    int dim = 0;                 // C(n-1,2) - 5h
    int block_top = 0;           // C(n-2,2) - 5h - 5nh, eigenvalues >= n
    int block_mid = 0;           // 5nh, eigenvalues >= n - 14
    int block_one = 0;           // n - 2, eigenvalues equal to 1
    bool ok_top = false, ok_mid = false, ok_one = false, ok_min = false, ok_logdet = false;
    int offending_index = -1;
    double min_eigenvalue = 0;
    long double logdet = 0, logdet_bound = 0;
    int near_one_count = 0;

    bool satisfied() const { return ok_top && ok_mid && ok_one && ok_min && ok_logdet; }
};

inline SpectrumReport spectrum_report(int n, const CycleFamily& family) {
    if (n < 16) throw std::invalid_argument("spectrum_report: needs n >= 16");
    const int h = family.h;
    IntMatrix mg = build_mg_int(n, family);
    Eigen::MatrixXd mgd = to_dense(mg);
    std::vector<double> ev = sym_eigenvalues(mgd);

    SpectrumReport r;
    r.n = n;
    r.h = h;
    r.dim = mg.rows;
    r.block_top = static_cast<int>(binom(n - 2, 2)) - 5 * h - 5 * n * h;
    r.block_mid = 5 * n * h;
    r.block_one = n - 2;
    const double tol = 1e-6;

    r.ok_top = true;
    for (int i = 0; i < r.block_top; ++i)
        if (ev[i] < n - tol) { r.ok_top = false; r.offending_index = i; break; }
    r.ok_mid = true;
    for (int i = r.block_top; i < r.block_top + r.block_mid && i < r.dim; ++i)
        if (ev[i] < n - 14 - tol) { r.ok_mid = false; r.offending_index = i; break; }
    for (double x : ev)
        if (std::abs(x - 1.0) <= tol) ++r.near_one_count;
    r.ok_one = r.near_one_count >= n - 2;
    r.min_eigenvalue = ev.back();
    r.ok_min = r.min_eigenvalue >= 1.0 - tol;

    r.logdet = logdet_from_eigenvalues(ev);
    r.logdet_bound = static_cast<long double>(r.block_top) * std::log(static_cast<long double>(n)) +
                     static_cast<long double>(r.block_mid) * std::log(static_cast<long double>(n - 14));
    r.ok_logdet = r.logdet >= r.logdet_bound;
    return r;
}

// ---------------------------------------------------------------------------
// overlap combinatorics of the second moment

struct OverlapCensus {
    int n = 0, h = 0;
    std::vector<std::uint64_t> counts;  // counts[k] = |G_n(G0, k)|
    std::vector<bool> within_bound;     // counts[k] <= n^{5h-k}(5h)^k/(10^h h!) C(5h,k)
    bool lemma11_ok = true;             // |F2 ∩ F2| = k implies |V0 ∩ V0| >= k
};

inline OverlapCensus overlap_census(int n, int h, const CycleFamily& g0) {
    if (n > 12) throw std::invalid_argument("overlap_census: exact scan limited to n <= 12");
    OverlapCensus oc;
    oc.n = n;
    oc.h = h;
    oc.counts.assign(5 * h + 1, 0);
    auto f2_0 = family_f2_slices(g0);
    std::set<std::uint32_t> f20;
    for (const auto& s : f2_0)
        for (auto t : s) f20.insert(t);
    std::uint64_t v0_mask = 0;
    for (const auto& c : g0.cycles)
        for (int v : c) v0_mask |= 1ull << (v - 1);

    for_each_cycle_family(n, h, [&](const CycleFamily& g1) {
        auto f2s = family_f2_slices(g1);
        int k = 0;
        std::uint64_t v1_mask = 0;
        for (const auto& s : f2s)
            for (auto t : s) k += f20.count(t);
        for (const auto& c : g1.cycles)
            for (int v : c) v1_mask |= 1ull << (v - 1);
        ++oc.counts[k];
        if (__builtin_popcountll(v0_mask & v1_mask) < k) oc.lemma11_ok = false;
    });

    oc.within_bound.assign(5 * h + 1, true);
    for (int k = 0; k <= 5 * h; ++k) {
        // n^{5h-k} (5h)^k / (10^h h!) * C(5h, k)
        BigRat bound(pow_big(BigInt(n), 5 * h - k) * pow_big(BigInt(5 * h), k) *
                         binom_big(5 * h, k),
                     pow_big(BigInt(10), h) * factorial_big(h));
        oc.within_bound[k] = BigRat(BigInt(oc.counts[k])) <= bound;
    }
    return oc;
}

struct PairProbCheck {
    int k = 0;  // |F2(G0) ∩ F2(G1)|
    double minor_value = 0;
    double bound = 0;  // (3/n)^{10h - k}
    double empirical = 0;
    double se = 0;
    bool minor_ok = false, empirical_ok = false;
};

inline PairProbCheck pair_prob_check(int n, const CycleFamily& g0, const CycleFamily& g1,
                                     std::uint64_t samples, std::uint64_t master_seed) {
    const int h = g0.h;
    std::set<std::uint32_t> f20, funion;
    for (const auto& s : family_f2_slices(g0))
        for (auto t : s) { f20.insert(t); funion.insert(t); }
    int k = 0;
    for (const auto& s : family_f2_slices(g1))
        for (auto t : s) {
            k += f20.count(t);
            funion.insert(t);
        }
    PairProbCheck r;
    r.k = k;
    r.bound = std::pow(3.0 / n, 10 * h - k);

    ProjectionKernel kernel = build_kernel(n);
    std::vector<std::uint32_t> faces(funion.begin(), funion.end());
    r.minor_value = inclusion_prob(kernel, faces);
    r.minor_ok = r.minor_value <= r.bound + 1e-12;

    CocycleGraph u0 = family_union(g0), u1 = family_union(g1);
    struct Acc { std::uint64_t joint = 0; };
    Acc tot = parallel_trials<Acc>(
        samples,
        [&](Acc& a, std::uint64_t i) {
            Hypertree t = sample(kernel, SeedScheme{master_seed, i});
            if (hom::is_cocycle(t.base, u0) && hom::is_cocycle(t.base, u1)) ++a.joint;
        },
        [](Acc& t, const Acc& a) { t.joint += a.joint; });
    if (samples > 0) {
        r.empirical = static_cast<double>(tot.joint) / static_cast<double>(samples);
        r.se = std::sqrt(std::max(0.0, r.empirical * (1 - r.empirical)) /
                         static_cast<double>(samples));
    }
    r.empirical_ok = r.empirical <= r.bound + 4.0 * r.se;
    return r;
}

}  // namespace htlab::mom
