#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "htlab/families.hpp"
#include "htlab/oracle.hpp"
#include "htlab/rng.hpp"

using namespace htlab;

TEST_CASE("combination unrank and successor agree") {
    // all C(6,3) = 20 combinations in colex order
    std::vector<std::vector<int>> direct;
    for (int c = 2; c < 6; ++c)
        for (int b = 1; b < c; ++b)
            for (int a = 0; a < b; ++a) direct.push_back({a, b, c});
    for (std::int64_t r = 0; r < 20; ++r)
        CHECK(oracle::detail::combination_unrank(r, 6, 3) == direct[r]);
    std::vector<int> it = direct[0];
    for (std::int64_t r = 1; r < 20; ++r) {
        REQUIRE(oracle::detail::combination_next(it, 6));
        CHECK(it == direct[r]);
    }
    CHECK_FALSE(oracle::detail::combination_next(it, 6));
}

TEST_CASE("hypertree enumeration satisfies the Kalai identity") {
    oracle::HypertreePMF p4 = oracle::enumerate_hypertrees(4);
    BigInt s4 = 0;
    for (const auto& e : p4.entries) s4 += BigInt(e.absdet) * e.absdet;
    CHECK(s4 == 4);  // 4^C(2,2)
    CHECK(p4.entries.size() == 4);

    oracle::HypertreePMF p5 = oracle::enumerate_hypertrees(5);
    BigInt s5 = 0;
    for (const auto& e : p5.entries) {
        CHECK(e.absdet >= 1);
        s5 += BigInt(e.absdet) * e.absdet;
    }
    CHECK(s5 == 125);  // 5^C(3,2)
    CHECK(p5.total_probability() == 1);

    CHECK_THROWS_AS(oracle::enumerate_hypertrees(7), std::invalid_argument);
}

TEST_CASE("n=6 enumeration: 6^6 with probabilities summing to one exactly") {
    oracle::HypertreePMF p6 = oracle::enumerate_hypertrees(6);
    BigInt s6 = 0;
    for (const auto& e : p6.entries) s6 += BigInt(e.absdet) * e.absdet;
    CHECK(s6 == 46656);
    CHECK(p6.total_probability() == 1);
}

TEST_CASE("pmf cache round-trips") {
    oracle::HypertreePMF p5 = oracle::enumerate_hypertrees(5);
    std::string path = "test_pmf_cache_n5.txt";
    oracle::save_pmf(p5, path);
    oracle::HypertreePMF loaded = oracle::load_pmf(path);
    REQUIRE(loaded.entries.size() == p5.entries.size());
    for (std::size_t i = 0; i < p5.entries.size(); ++i) {
        CHECK(loaded.entries[i].tris == p5.entries[i].tris);
        CHECK(loaded.entries[i].absdet == p5.entries[i].absdet);
        CHECK(loaded.entries[i].mask == p5.entries[i].mask);
    }
    std::remove(path.c_str());
}

TEST_CASE("goodness of fit: inverse-transform self-test and a biased negative control") {
    oracle::HypertreePMF pmf = oracle::enumerate_hypertrees(5);
    std::vector<double> cdf;
    double acc = 0;
    for (std::size_t i = 0; i < pmf.entries.size(); ++i) {
        acc += static_cast<double>(pmf.probability(i));
        cdf.push_back(acc);
    }
    RngStream rng(31);
    std::vector<std::vector<std::uint32_t>> samples;
    for (int i = 0; i < 20000; ++i) {
        double u = rng.u01();
        std::size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (idx >= pmf.entries.size()) idx = pmf.entries.size() - 1;
        samples.push_back(pmf.entries[idx].tris);
    }
    auto gof = oracle::goodness_of_fit(pmf, samples);
    CHECK(gof.p_value > 0.001);

    // biased double: always the first hypertree
    std::vector<std::vector<std::uint32_t>> biased(5000, pmf.entries[0].tris);
    auto bad = oracle::goodness_of_fit(pmf, biased);
    CHECK(bad.p_value < 1e-6);

    std::vector<std::vector<std::uint32_t>> outside = {{0, 1, 2, 3, 4, 5}};
    bool in_support = false;
    for (const auto& e : pmf.entries) in_support |= e.tris == outside[0];
    if (!in_support) CHECK_THROWS_AS(oracle::goodness_of_fit(pmf, outside), std::domain_error);
}

TEST_CASE("brute cocycle probability: empty graph, single edge, relabeling") {
    oracle::HypertreePMF p5 = oracle::enumerate_hypertrees(5);
    CHECK(oracle::brute_prob_cocycle(p5, CocycleGraph{5, {}}) == 1);
    CHECK(oracle::brute_prob_cocycle(p5, CocycleGraph{5, {edge_rank(1, 2)}}) == 0);
    CHECK(oracle::brute_prob_cocycle(p5, CocycleGraph{5, {edge_rank(3, 5)}}) == 0);

    oracle::HypertreePMF p6 = oracle::enumerate_hypertrees(6);
    CycleFamily f1{6, 1, {{1, 2, 3, 4, 5}}};
    CycleFamily f2{6, 1, {{2, 3, 4, 5, 6}}};
    BigRat a = oracle::brute_prob_cocycle(p6, family_union(f1));
    BigRat b = oracle::brute_prob_cocycle(p6, family_union(f2));
    CHECK(a == b);
    CHECK(a > 0);
}

TEST_CASE("automorphism counts of small abelian p-groups") {
    CHECK(oracle::brute_aut_count({1}, 2) == 1);        // Z/2
    CHECK(oracle::brute_aut_count({1, 1}, 2) == 6);     // (Z/2)^2 = GL(2,F2)
    CHECK(oracle::brute_aut_count({2}, 2) == 2);        // Z/4
    CHECK(oracle::brute_aut_count({1, 2}, 2) == 8);     // Z/2 x Z/4
    CHECK(oracle::brute_aut_count({1, 1, 1}, 2) == 168);  // GL(3,F2)
    CHECK(oracle::brute_aut_count({1}, 3) == 2);        // Z/3
    CHECK(oracle::brute_aut_count({1, 1}, 3) == 48);    // GL(2,F3)
    CHECK(oracle::brute_aut_count({2}, 3) == 6);        // Z/9
    CHECK(oracle::brute_aut_count({}, 2) == 1);         // trivial group
    CHECK_THROWS_AS(oracle::brute_aut_count({9}, 2), std::invalid_argument);
}
