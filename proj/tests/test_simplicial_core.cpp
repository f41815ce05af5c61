#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "htlab/faces.hpp"
#include "htlab/families.hpp"
#include "htlab/intmat.hpp"
#include "htlab/rng.hpp"

using namespace htlab;

TEST_CASE("colex ranks match the wire formulas and round-trip") {
    CHECK(edge_rank(1, 2) == 0);
    CHECK(edge_rank(1, 3) == 1);
    CHECK(edge_rank(2, 3) == 2);
    CHECK(tri_rank(1, 2, 3) == 0);
    CHECK(tri_rank(1, 2, 4) == 1);
    CHECK(tri_rank(2, 3, 4) == 3);
    CHECK(tri_rank(1, 2, 5) == 4);
    for (std::uint32_t r = 0; r < 300; ++r) {
        Edge e = edge_unrank(r);
        CHECK(e.a < e.b);
        CHECK(edge_rank(e) == r);
        Tri t = tri_unrank(r);
        CHECK((t.a < t.b && t.b < t.c));
        CHECK(tri_rank(t) == r);
    }
}

TEST_CASE("boundary_matrix shapes and the column of {1,2,3}") {
    Int8Matrix m = boundary_matrix(5, 2);
    CHECK(m.rows == 10);
    CHECK(m.cols == 10);
    std::uint32_t col = tri_rank(1, 2, 3);
    CHECK(m.at(edge_rank(2, 3), col) == 1);
    CHECK(m.at(edge_rank(1, 3), col) == -1);
    CHECK(m.at(edge_rank(1, 2), col) == 1);
    int nonzeros = 0;
    for (int i = 0; i < m.rows; ++i) nonzeros += m.at(i, col) != 0;
    CHECK(nonzeros == 3);
    CHECK_THROWS_AS(boundary_matrix(6, 3), std::invalid_argument);
    CHECK_THROWS_AS(boundary_matrix(6, 0), std::invalid_argument);
}

TEST_CASE("boundary of boundary vanishes for n <= 8") {
    for (int n = 4; n <= 8; ++n) {
        IntMatrix p = IntMatrix::from_int8(boundary_matrix(n, 1)) *
                      IntMatrix::from_int8(boundary_matrix(n, 2));
        for (const auto& x : p.v) REQUIRE(x == 0);
    }
}

TEST_CASE("reduced_boundary shape, rank, and edge rows") {
    Int8Matrix m = reduced_boundary(6);
    CHECK(m.rows == 10);
    CHECK(m.cols == 20);
    CHECK(rank_exact(IntMatrix::from_int8(m)) == 10);

    // rows of edge {1,2} at n=5: nonzero exactly at triangles containing {1,2}
    Int8Matrix m5 = reduced_boundary(5);
    std::uint32_t row = edge_rank(1, 2);
    for (int c = 3; c <= 5; ++c)
        for (int b = 2; b < c; ++b)
            for (int a = 1; a < b; ++a) {
                bool contains = (a == 1 && b == 2);
                CHECK((m5.at(row, tri_rank(a, b, c)) != 0) == contains);
            }
}

TEST_CASE("classify_faces on 5-cycles and the empty graph") {
    CycleFamily f{5, 1, {{1, 2, 3, 4, 5}}};
    FaceClassification fc = classify_family(f);
    CHECK(fc.F[0].size() == 0);
    CHECK(fc.F[1].size() == 5);
    CHECK(fc.F[2].size() == 5);
    CHECK(fc.F[3].size() == 0);
    REQUIRE(fc.f2_slices.size() == 1);
    CHECK(fc.f2_slices[0].size() == 5);

    CycleFamily f6{6, 1, {{1, 2, 3, 4, 5}}};
    FaceClassification fc6 = classify_family(f6);
    CHECK(fc6.F[0].size() == 5);
    CHECK(fc6.F[1].size() == 10);
    CHECK(fc6.F[2].size() == 5);
    CHECK(fc6.F[3].size() == 0);

    FaceClassification fce = classify_faces(CocycleGraph{7, {}});
    CHECK(fce.F[0].size() == 35);
}

TEST_CASE("classification is a partition with independently recomputed k") {
    RngStream rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 5 + static_cast<int>(rng.index(5));
        CocycleGraph g{n, {}};
        for (std::uint32_t e = 0; e < binom(n, 2); ++e)
            if (rng.u01() < 0.3) g.edges.push_back(e);
        FaceClassification fc = classify_faces(g);
        std::size_t total = 0;
        std::int64_t weighted = 0;
        for (int k = 0; k < 4; ++k) {
            total += fc.F[k].size();
            weighted += std::int64_t(k) * fc.F[k].size();
            for (auto t : fc.F[k]) {
                Tri tri = tri_unrank(t);
                int kk = g.contains(edge_rank(tri.b, tri.c)) +
                         g.contains(edge_rank(tri.a, tri.c)) +
                         g.contains(edge_rank(tri.a, tri.b));
                REQUIRE(kk == k);
            }
        }
        CHECK(total == std::size_t(binom(n, 3)));
        CHECK(weighted == std::int64_t(n - 2) * g.edges.size());
    }
}

TEST_CASE("cycle family enumeration counts match the closed form") {
    CHECK(cycle_family_count(10, 1) == 3024);
    CHECK(cycle_family_count(5, 1) == 12);
    CHECK(cycle_family_count(9, 2) == 0);
    CHECK(all_cycle_families(5, 1).size() == 12);
    CHECK(all_cycle_families(10, 1).size() == 3024);
    CHECK(all_cycle_families(9, 2).empty());
    for (int n = 0; n <= 12; ++n) {
        for (int h = 0; h <= 2; ++h) {
            if (n > 11 && h == 2) continue;  // covered below
            std::size_t count = 0;
            for_each_cycle_family(n, h, [&](const CycleFamily&) { ++count; });
            CHECK(BigInt(count) == cycle_family_count(n, h));
        }
    }
    std::size_t count = 0;
    for_each_cycle_family(12, 2, [&](const CycleFamily&) { ++count; });
    CHECK(BigInt(count) == cycle_family_count(12, 2));
}

TEST_CASE("enumerated families are canonical and pairwise distinct") {
    std::set<std::vector<int>> seen;
    for_each_cycle_family(8, 1, [&](const CycleFamily& f) {
        REQUIRE(f.cycles.size() == 1);
        const auto& c = f.cycles[0];
        for (int j = 1; j < 5; ++j) CHECK(c[j] > c[0]);
        CHECK(c[1] < c[4]);
        std::vector<int> key(c.begin(), c.end());
        CHECK(seen.insert(key).second);
    });
    CHECK(BigInt(seen.size()) == cycle_family_count(8, 1));
}

TEST_CASE("family_components splits the union edge-disjointly") {
    CycleFamily f{12, 2, {{1, 3, 5, 7, 9}, {2, 4, 6, 8, 10}}};
    auto [comps, uni] = family_components(f);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].edges.size() == 5);
    CHECK(comps[1].edges.size() == 5);
    CHECK(uni.edges.size() == 10);
    std::set<std::uint32_t> all(uni.edges.begin(), uni.edges.end());
    for (const auto& c : comps)
        for (auto e : c.edges) CHECK(all.count(e) == 1);

    // F2 of the union is the disjoint union of the per-cycle F2's
    FaceClassification fu = classify_faces(uni);
    std::set<std::uint32_t> f2u(fu.F[2].begin(), fu.F[2].end());
    std::set<std::uint32_t> f2parts;
    for (const auto& c : comps) {
        FaceClassification fi = classify_faces(c);
        for (auto t : fi.F[2]) f2parts.insert(t);
    }
    CHECK(f2u == f2parts);
    CHECK(f2u.size() == 10);
    CHECK(fu.F[3].empty());

    // h=1 family: the union equals the single component
    CycleFamily f1{7, 1, {{2, 3, 4, 5, 6}}};
    auto [c1, u1] = family_components(f1);
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].edges == u1.edges);
}

TEST_CASE("cycle family unions always have F3 empty and |F2| = 5h") {
    RngStream rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 10 + static_cast<int>(rng.index(6));
        int h = 1 + static_cast<int>(rng.index(2));
        if (5 * h > n) continue;
        // random family via random distinct vertices
        std::vector<int> verts(n);
        for (int i = 0; i < n; ++i) verts[i] = i + 1;
        for (int i = n - 1; i > 0; --i)
            std::swap(verts[i], verts[rng.index(std::uint64_t(i) + 1)]);
        CycleFamily f{n, h, {}};
        for (int i = 0; i < h; ++i) {
            std::array<int, 5> c{};
            for (int j = 0; j < 5; ++j) c[j] = verts[5 * i + j];
            f.cycles.push_back(c);
        }
        FaceClassification fc = classify_family(f);
        CHECK(fc.F[3].empty());
        CHECK(fc.F[2].size() == std::size_t(5 * h));
        std::size_t slice_total = 0;
        for (const auto& s : fc.f2_slices) slice_total += s.size();
        CHECK(slice_total == std::size_t(5 * h));
    }
}
