#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tri3/canonical.hpp"
#include "tri3/homology.hpp"
#include "tri3/triangulation.hpp"

using namespace tri3;

TEST_CASE("boundary 4-simplex basics") {
    Triangulation3 t = boundary_4_simplex();
    CHECK(validate(t).ok());
    FVector f = f_vector(t);
    CHECK(f.f0 == 5);
    CHECK(f.f1 == 10);
    CHECK(f.f2 == 10);
    CHECK(f.f3 == 5);
    CHECK(f.euler() == 0);
    HomologyProfile h = homology(t);
    CHECK(h.is_sphere_like());
    CHECK(h.to_string() == "(Z, 0, 0, Z)");
}

TEST_CASE("validation failures carry witnesses") {
    // single tetrahedron: has boundary
    Triangulation3 t;
    t.vertex_count = 4;
    t.tets.push_back({0, 1, 2, 3});
    ValidationReport rep = validate(t);
    CHECK(!rep.ok());
    bool found = false;
    for (auto& f : rep.failures)
        if (f.kind == Violation::TriangleNotInTwoTets && f.witness == Simplex{0, 1, 2}) found = true;
    CHECK(found);

    // two disjoint copies of the boundary 4-simplex: disconnected
    Triangulation3 a = boundary_4_simplex();
    Triangulation3 two = a;
    two.vertex_count = 10;
    for (const Tet& tet : a.tets) two.tets.push_back({tet[0] + 5, tet[1] + 5, tet[2] + 5, tet[3] + 5});
    two.normalize();
    rep = validate(two);
    CHECK(!rep.ok());
    found = false;
    for (auto& f : rep.failures)
        if (f.kind == Violation::Disconnected) found = true;
    CHECK(found);
}

TEST_CASE("join of cycles") {
    Triangulation3 t = join_of_cycles(3, 3);
    CHECK(validate(t).ok());
    FVector f = f_vector(t);
    CHECK(f.f0 == 6);
    CHECK(f.f1 == 15);
    CHECK(f.f2 == 18);
    CHECK(f.f3 == 9);
    CHECK(homology(t).is_sphere_like());

    Triangulation3 t34 = join_of_cycles(3, 4);
    CHECK(validate(t34).ok());
    CHECK(t34.vertex_count == 7);
    CHECK((int)t34.tets.size() == 12);
    CHECK(homology(t34).is_sphere_like());

    CHECK_THROWS(join_of_cycles(2, 3));
}

TEST_CASE("links and stars") {
    Triangulation3 t = boundary_4_simplex();
    // link of a vertex is the boundary of a tetrahedron
    auto link0 = vertex_link_triangles(t, 0);
    CHECK(link0.size() == 4);
    // link of an edge is the 3-cycle on the remaining vertices, no triangle
    auto ls = link_simplices(t, {0, 1});
    int tri_count = 0, edge_count = 0, vert_count = 0;
    for (auto& s : ls) {
        if (s.size() == 1) vert_count++;
        if (s.size() == 2) edge_count++;
        if (s.size() == 3) tri_count++;
    }
    CHECK(vert_count == 3);
    CHECK(edge_count == 3);
    CHECK(tri_count == 0);
    auto cyc = edge_link_cycle(t, {0, 1});
    REQUIRE(cyc.has_value());
    CHECK(cyc->size() == 3);

    // star of a cross-factor edge of join(3,3) has 4 tetrahedra
    Triangulation3 j = join_of_cycles(3, 3);
    auto st = star_simplices(j, {0, 3});
    int tets_in_star = 0;
    for (auto& s : st)
        if (s.size() == 4) tets_in_star++;
    CHECK(tets_in_star == 4);
}

TEST_CASE("barycentric subdivision") {
    Triangulation3 t = boundary_4_simplex();
    Triangulation3 b = barycentric_subdivision(t);
    CHECK(b.vertex_count == 30);
    CHECK((int)b.tets.size() == 120);
    CHECK(validate(b).ok());
    CHECK(homology(b).is_sphere_like());

    Triangulation3 j = join_of_cycles(3, 3);
    Triangulation3 bj = barycentric_subdivision(j);
    CHECK((long long)bj.tets.size() == 24 * 9);
    CHECK(validate(bj).ok());
    CHECK(homology(bj) == homology(j));
}

TEST_CASE("canonical form is a relabeling invariant") {
    std::mt19937_64 rng(12345);
    for (Triangulation3 t : {boundary_4_simplex(), join_of_cycles(3, 3), join_of_cycles(3, 4)}) {
        CanonicalForm cf = canonical_form(t);
        for (int trial = 0; trial < 50; trial++) {
            std::vector<int> perm(t.vertex_count);
            for (int i = 0; i < t.vertex_count; i++) perm[i] = i;
            std::shuffle(perm.begin(), perm.end(), rng);
            Triangulation3 r = relabel(t, perm);
            CHECK(canonical_form(r).signature == cf.signature);
        }
    }
    CHECK(canonical_form(boundary_4_simplex()).signature != canonical_form(join_of_cycles(3, 3)).signature);
    CHECK(is_isomorphic(barycentric_subdivision(boundary_4_simplex()), barycentric_subdivision(boundary_4_simplex())));
}

TEST_CASE("euler characteristic vanishes on fixtures") {
    for (Triangulation3 t : {boundary_4_simplex(), join_of_cycles(3, 3), join_of_cycles(4, 5)})
        CHECK(f_vector(t).euler() == 0);
}
