#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <numeric>

#include "htlab/faces.hpp"
#include "htlab/intmat.hpp"
#include "htlab/modp.hpp"
#include "htlab/rng.hpp"
#include "htlab/smith.hpp"
#include "htlab/spectra.hpp"

using namespace htlab;

namespace {

// independent oracle: cofactor expansion
BigInt det_cofactor(const IntMatrix& m) {
    int n = m.rows;
    if (n == 0) return 1;
    if (n == 1) return m.at(0, 0);
    BigInt acc = 0;
    for (int j = 0; j < n; ++j) {
        if (m.at(0, j) == 0) continue;
        IntMatrix sub(n - 1, n - 1);
        for (int i = 1; i < n; ++i) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                sub.at(i - 1, cc++) = m.at(i, c);
            }
        }
        BigInt term = m.at(0, j) * det_cofactor(sub);
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

IntMatrix random_matrix(RngStream& rng, int n, int lo, int hi) {
    IntMatrix m(n, n);
    for (auto& x : m.v) x = lo + static_cast<int>(rng.index(hi - lo + 1));
    return m;
}

}  // namespace

TEST_CASE("rank_mod_p basics") {
    IntMatrix id(7, 7);
    for (int i = 0; i < 7; ++i) id.at(i, i) = 1;
    CHECK(rank_mod_p(id, 2) == 7);

    CHECK(rank_mod_p(boundary_matrix(5, 2), 2) == 6);

    IntMatrix d(2, 2);
    d.at(0, 0) = 2;
    d.at(1, 1) = 3;
    CHECK(rank_mod_p(d, 2) == 1);

    CHECK_THROWS_AS(rank_mod_p(id, 6), std::invalid_argument);
}

TEST_CASE("rank_mod_p never exceeds the rational rank") {
    RngStream rng(1234);
    std::uint64_t primes[] = {2, 3, 5, 1073741789};
    for (int rep = 0; rep < 100; ++rep) {
        int n = 2 + static_cast<int>(rng.index(4));
        IntMatrix m = random_matrix(rng, n, -4, 4);
        int rq = rank_exact(m);
        for (auto p : primes) {
            int rp = rank_mod_p(m, p);
            CHECK(rp <= rq);
        }
        // equality whenever the determinant of a full square witness is a unit mod p
        if (rq == n) {
            BigInt d = det_exact(m);
            for (auto p : primes)
                if (d % BigInt(p) != 0) CHECK(rank_mod_p(m, p) == n);
        }
    }
}

TEST_CASE("packed GF(2) path agrees with the word path") {
    RngStream rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        int rows = 1 + static_cast<int>(rng.index(40));
        int cols = 1 + static_cast<int>(rng.index(90));
        Int8Matrix m(rows, cols);
        for (auto& x : m.v) x = static_cast<int>(rng.index(2));
        std::vector<std::uint32_t> w2(m.v.size());
        for (std::size_t i = 0; i < m.v.size(); ++i) w2[i] = m.v[i] & 1;
        int r_words = rank_mod_p_words(w2, rows, cols, 2);
        int r_packed = rank_gf2(BitMatrix::from_int8(m));
        CHECK(r_words == r_packed);
    }
}

TEST_CASE("det_exact on the 5x5 cycle block") {
    // the explicit matrix from the single-5-cycle block computation
    // rows {1,5},{1,2},{2,3},{3,4},{4,5}; cols {1,2,5},{1,2,3},{2,3,4},{3,4,5},{1,4,5}
    IntMatrix m(5, 5);
    int entries[5][5] = {
        {-1, 0, 0, 0, -1},
        {+1, +1, 0, 0, 0},
        {0, +1, +1, 0, 0},
        {0, 0, +1, +1, 0},
        {0, 0, 0, +1, +1},
    };
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m.at(i, j) = entries[i][j];
    BigInt d = det_exact(m);
    CHECK(boost::multiprecision::abs(d) == 2);

    IntMatrix id(4, 4);
    for (int i = 0; i < 4; ++i) id.at(i, i) = 1;
    CHECK(det_exact(id) == 1);

    IntMatrix rect(2, 3);
    CHECK_THROWS_AS(det_exact(rect), std::invalid_argument);
}

TEST_CASE("det_exact matches cofactor expansion on random 6x6") {
    RngStream rng(5);
    for (int rep = 0; rep < 25; ++rep) {
        IntMatrix m = random_matrix(rng, 6, -3, 3);
        CHECK(det_exact(m) == det_cofactor(m));
    }
}

TEST_CASE("det_int64 agrees with the exact path and flags overflow") {
    RngStream rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 2 + static_cast<int>(rng.index(7));
        IntMatrix m = random_matrix(rng, n, -1, 1);
        std::vector<std::int64_t> w(std::size_t(n) * n);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<std::int64_t>(m.v[i]);
        std::int64_t out = -1;
        REQUIRE(det_int64(w, n, out));
        CHECK(BigInt(out) == det_exact(m));
    }
}

TEST_CASE("sylow_invariants on diagonal matrices") {
    IntMatrix m(3, 3);
    m.at(0, 0) = 2;
    m.at(1, 1) = 4;
    m.at(2, 2) = 3;
    CHECK(sylow_invariants(m, 2) == std::vector<int>{1, 2});
    CHECK(sylow_invariants(m, 3) == std::vector<int>{1});

    IntMatrix id(3, 3);
    for (int i = 0; i < 3; ++i) id.at(i, i) = 1;
    CHECK(sylow_invariants(id, 2).empty());
}

TEST_CASE("sylow_invariants matches the integer Smith form") {
    RngStream rng(2024);
    for (int rep = 0; rep < 30; ++rep) {
        int n = 3 + static_cast<int>(rng.index(3));
        IntMatrix m = random_matrix(rng, n, -5, 5);
        if (det_exact(m) == 0) continue;
        InvariantFactors inv = invariant_factors_from_diag(smith_form(m));
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            auto expected = inv.exponents(BigInt(p));
            CHECK(sylow_invariants(m, p) == expected);
        }
    }
}

TEST_CASE("sylow_invariants is stable under row/column permutation") {
    RngStream rng(31337);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 4;
        IntMatrix m = random_matrix(rng, n, -6, 6);
        if (det_exact(m) == 0) continue;
        auto base = sylow_invariants(m, 2);
        IntMatrix perm(n, n);
        std::vector<int> rp(n), cp(n);
        std::iota(rp.begin(), rp.end(), 0);
        std::iota(cp.begin(), cp.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            std::swap(rp[i], rp[rng.index(std::uint64_t(i) + 1)]);
            std::swap(cp[i], cp[rng.index(std::uint64_t(i) + 1)]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) perm.at(i, j) = m.at(rp[i], cp[j]);
        CHECK(sylow_invariants(perm, 2) == base);
    }
}

TEST_CASE("|det| equals the product over all Sylow exponent sums") {
    RngStream rng(777);
    for (int rep = 0; rep < 20; ++rep) {
        IntMatrix m = random_matrix(rng, 5, -4, 4);
        BigInt d = det_exact(m);
        if (d == 0) continue;
        BigInt reconstructed = 1;
        for (auto& [p, e] : factorize(d)) reconstructed *= pow_big(p, e);
        CHECK(reconstructed == boost::multiprecision::abs(d));
        // cross-check exponents against the p-adic route for dividing primes
        for (auto& [p, e] : factorize(d)) {
            auto exps = sylow_invariants(m, p);
            int total = 0;
            for (int x : exps) total += x;
            CHECK(total == e);
        }
    }
}

TEST_CASE("sym_eigenvalues basics and trace identity") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    auto ev = sym_eigenvalues(id);
    REQUIRE(ev.size() == 4);
    for (double x : ev) CHECK(x == Catch::Approx(1.0));

    RngStream rng(55);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 3 + static_cast<int>(rng.index(8));
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.u01() * 4 - 2;
        auto evs = sym_eigenvalues(a);
        double sum = std::accumulate(evs.begin(), evs.end(), 0.0);
        CHECK(sum == Catch::Approx(a.trace()).epsilon(1e-8));
        CHECK(std::is_sorted(evs.rbegin(), evs.rend()));
    }

    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(sym_eigenvalues(bad), std::invalid_argument);
}

TEST_CASE("spectrum of the reduced boundary Gram matrix at n=6") {
    Int8Matrix a = reduced_boundary(6);
    Eigen::MatrixXd ad(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) ad(i, j) = a.at(i, j);
    Eigen::MatrixXd g = ad * ad.transpose();
    auto ev = sym_eigenvalues(g);
    REQUIRE(ev.size() == 10);
    for (int i = 0; i < 6; ++i) CHECK(ev[i] == Catch::Approx(6.0).margin(1e-9));
    for (int i = 6; i < 10; ++i) CHECK(ev[i] == Catch::Approx(1.0).margin(1e-9));

    // logdet via LDL^T matches the eigenvalue route
    long double ld = logdet_spd(g);
    long double le = logdet_from_eigenvalues(ev);
    CHECK(static_cast<double>(ld) == Catch::Approx(static_cast<double>(le)).epsilon(1e-12));
    CHECK(static_cast<double>(ld) == Catch::Approx(6.0 * std::log(6.0)).epsilon(1e-12));
}
