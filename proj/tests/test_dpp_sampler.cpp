#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "htlab/kernel.hpp"
#include "htlab/oracle.hpp"
#include "htlab/rng.hpp"
#include "htlab/sampler.hpp"

using namespace htlab;

TEST_CASE("kernel invariants at n=6: diagonal, trace, projection") {
    ProjectionKernel k = build_kernel(6);
    REQUIRE(k.dense.has_value());
    const Eigen::MatrixXd& K = *k.dense;
    REQUIRE(K.rows() == 20);
    for (int i = 0; i < 20; ++i) CHECK(K(i, i) == Catch::Approx(0.5).margin(1e-10));
    CHECK(K.trace() == Catch::Approx(10.0).margin(1e-8));
    CHECK(((K * K) - K).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("kernel modes agree at n=8 and match the closed-form entries") {
    ProjectionKernel kf = build_kernel(8, {KernelMode::Float, 24});
    ProjectionKernel ke = build_kernel(8, {KernelMode::Exact, 24});
    REQUIRE(kf.dense.has_value());
    REQUIRE(ke.dense.has_value());
    CHECK((*kf.dense - *ke.dense).cwiseAbs().maxCoeff() <= 1e-9);

    // the exact rational kernel equals <ds,dt>/n exactly
    REQUIRE(ke.exact.has_value());
    int m = ke.m;
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) {
            BigRat expected(BigInt(boundary_inner_product(s, t)), BigInt(8));
            REQUIRE(ke.exact_entry(s, t) == expected);
        }
    CHECK_THROWS_AS(build_kernel(3), std::invalid_argument);
    CHECK_THROWS_AS(build_kernel(9, {KernelMode::Exact, 24}), std::invalid_argument);
}

TEST_CASE("inclusion probabilities: empty set, singletons, monotonicity, Hadamard") {
    for (int n : {6, 8, 12}) {
        ProjectionKernel k = build_kernel(n);
        CHECK(inclusion_prob(k, {}) == 1.0);
        CHECK(inclusion_prob(k, {0u}) == Catch::Approx(3.0 / n).margin(1e-10));

        RngStream rng(314 + n);
        for (int rep = 0; rep < 200; ++rep) {
            std::set<std::uint32_t> fs;
            int sz = 1 + static_cast<int>(rng.index(5));
            while (static_cast<int>(fs.size()) < sz)
                fs.insert(static_cast<std::uint32_t>(rng.index(k.m)));
            std::vector<std::uint32_t> faces(fs.begin(), fs.end());
            double p = inclusion_prob(k, faces);
            CHECK(p <= std::pow(3.0 / n, sz) + 1e-12);
            // monotone under adding one more face
            std::uint32_t extra;
            do { extra = static_cast<std::uint32_t>(rng.index(k.m)); } while (fs.count(extra));
            faces.push_back(extra);
            CHECK(inclusion_prob(k, faces) <= p + 1e-12);
        }
        CHECK_THROWS_AS(inclusion_prob(k, {1u, 1u}), std::invalid_argument);
    }
}

TEST_CASE("inclusion probabilities are exchangeable under vertex relabeling") {
    const int n = 8;
    ProjectionKernel k = build_kernel(n);
    RngStream rng(2718);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i + 1;
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.index(std::uint64_t(i) + 1)]);
        std::set<std::uint32_t> fs;
        while (fs.size() < 4) fs.insert(static_cast<std::uint32_t>(rng.index(k.m)));
        std::vector<std::uint32_t> faces(fs.begin(), fs.end()), mapped;
        for (auto f : faces) {
            Tri t = tri_unrank(f);
            int a = perm[t.a - 1], b = perm[t.b - 1], c = perm[t.c - 1];
            if (a > b) std::swap(a, b);
            if (b > c) std::swap(b, c);
            if (a > b) std::swap(a, b);
            mapped.push_back(tri_rank(a, b, c));
        }
        CHECK(inclusion_prob(k, faces) == Catch::Approx(inclusion_prob(k, mapped)).margin(1e-9));
    }
}

TEST_CASE("samples have exactly C(n-1,2) triangles and are seed-deterministic") {
    for (int n : {5, 6, 8, 12}) {
        ProjectionKernel k = build_kernel(n);
        Hypertree a = sample(k, SeedScheme{12345, 7});
        Hypertree b = sample(k, SeedScheme{12345, 7});
        Hypertree c = sample(k, SeedScheme{12345, 8});
        CHECK(a.base.tris.size() == std::size_t(binom(n - 1, 2)));
        CHECK(a.base.tris == b.base.tris);
        CHECK(a.certificate_prime == b.certificate_prime);
        CHECK(std::is_sorted(a.base.tris.begin(), a.base.tris.end()));
        (void)c;

        // certificate soundness
        CHECK(a.certificate_prime >= (1ull << 29));
        CHECK(a.certificate_prime < (1ull << 30));
        CHECK(is_prime_u32(a.certificate_prime));
        Int8Matrix sq = square_submatrix(a.base);
        CHECK(rank_mod_p(sq, a.certificate_prime) == sq.rows);
    }
}

TEST_CASE("empirical inclusion frequencies match minors at n=8") {
    const int n = 8;
    ProjectionKernel k = build_kernel(n);
    const std::uint64_t trials = 4000;
    std::vector<std::uint32_t> picked = {0, 5, 11, 17, 23, 29, 35, 41, 47, 55};
    std::vector<int> hits(picked.size(), 0);
    for (std::uint64_t i = 0; i < trials; ++i) {
        std::vector<std::uint32_t> t = sample_triangles(n, SeedScheme{999, i});
        for (std::size_t j = 0; j < picked.size(); ++j)
            if (std::binary_search(t.begin(), t.end(), picked[j])) ++hits[j];
    }
    for (std::size_t j = 0; j < picked.size(); ++j) {
        double p = inclusion_prob(k, {picked[j]});
        double se = std::sqrt(p * (1 - p) / trials);
        CHECK(std::abs(hits[j] / double(trials) - p) <= 4 * se);
    }
}

TEST_CASE("sampler law at n=5 via chi-square against the exact pmf") {
    oracle::HypertreePMF pmf = oracle::enumerate_hypertrees(5);
    const std::uint64_t trials = 30000;
    std::vector<std::vector<std::uint32_t>> samples;
    samples.reserve(trials);
    for (std::uint64_t i = 0; i < trials; ++i)
        samples.push_back(sample_triangles(5, SeedScheme{424242, i}));
    auto gof = oracle::goodness_of_fit(pmf, samples);
    INFO("chi2 = " << gof.chi2 << " dof = " << gof.dof << " p = " << gof.p_value);
    CHECK(gof.p_value > 0.001);
}
