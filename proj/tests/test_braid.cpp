#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tri3/braid.hpp"
#include "tri3/canonical.hpp"
#include "tri3/homology.hpp"

using namespace tri3;

TEST_CASE("standard braid words") {
    BraidWord b = standard_braid(1);
    REQUIRE(b.crossing_count() == 2);
    CHECK(b.letters[0] == std::make_pair(1, 1));
    CHECK(b.letters[1] == std::make_pair(2, -1));
    CHECK(standard_braid(3).crossing_count() == 6);
    for (auto& [i, e] : standard_braid(4).letters) CHECK((i == 1 || i == 2));
    CHECK_THROWS(standard_braid(0));
}

TEST_CASE("P at k = 0 has the 28 intrinsic vertices") {
    BraidWord empty;
    PbResult pb = build_Pb(empty);
    CHECK(pb.complex.n_vertices == 28);
    CHECK(validate_simple(pb.complex).ok());
    CHECK(validate_regular(pb.complex).ok());
    // dual to a triangulation of the 3-sphere
    Triangulation3 t = dual_triangulation(pb.complex);
    CHECK(validate(t).ok());
    CHECK((int)t.tets.size() == 28);
    CHECK(homology(t).is_sphere_like());
    // the plat of the empty word closes up with no crossings
    CHECK(pb.diagram.empty());
    CHECK(pb.writhe == 0);
    CHECK(pb.vertices_on_k1 == 16);  // caps 4, cups 6, middle 6
    // K2 is an embedded 8-edge cycle
    CHECK(pb.k2.edges.size() == 8);
}

TEST_CASE("P_b at m = 1 matches the paper counts") {
    PbResult pb = build_Pb(standard_braid(1));
    int k = 2;
    CHECK(pb.complex.n_vertices == 24 * k + 28);
    CHECK(validate_simple(pb.complex).ok());
    CHECK(validate_regular(pb.complex).ok());
    // crossing word, bottom to top, is b b^-1: (2,+1),(1,-1),(1,+1),(2,-1)
    REQUIRE(pb.diagram.size() == 4);
    CHECK(pb.diagram[0].index == 2);
    CHECK(pb.diagram[0].sign == 1);
    CHECK(pb.diagram[1].index == 1);
    CHECK(pb.diagram[1].sign == -1);
    CHECK(pb.diagram[2].index == 1);
    CHECK(pb.diagram[2].sign == 1);
    CHECK(pb.diagram[3].index == 2);
    CHECK(pb.diagram[3].sign == -1);
    CHECK(pb.writhe == 0);
    // K1 is an embedded cycle through intrinsic vertices
    CHECK(pb.k1.edges.size() == pb.k1.vertices.size());
    CHECK(pb.vertices_on_k1 == (long long)pb.k1.vertices.size());
}

TEST_CASE("drilling K1 gives the solid torus complex Z_b") {
    for (int k : {0, 2}) {
        BraidWord b;
        if (k == 2) b = standard_braid(1);
        PbResult pb = build_Pb(b);
        DrillResult dr = drill_K1(pb);
        CHECK(validate_simple(dr.exterior).ok());
        CHECK(dr.exterior.has_boundary());
        // vertex count: each K1 vertex gives rise to two, Lemma bound is strict
        CHECK(dr.exterior.n_vertices == pb.complex.n_vertices + pb.vertices_on_k1);
        CHECK(dr.exterior.n_vertices < 48 * k + 56);
        BoundarySurfaceInfo bi = boundary_surface_info(dr.exterior);
        CHECK(bi.components == 1);
        CHECK(bi.euler() == 0);
        // K2 persists with ten edges, four of them on the tube wall
        CHECK(dr.k2.edges.size() == 10);
        CHECK(dr.k2_pattern_edges == 4);
    }
}

TEST_CASE("boundary-cell subdivision Z_b -> Z'_b") {
    for (int k : {0, 2}) {
        BraidWord b;
        if (k == 2) b = standard_braid(1);
        PbResult pb = build_Pb(b);
        DrillResult dr = drill_K1(pb);
        BlisterResult bl = subdivide_boundary_cells(dr.exterior, dr.k2);
        CHECK(validate_simple(bl.complex).ok());
        // one new vertex per (boundary cell, boundary vertex) incidence:
        // torus vertices are trivalent on the torus
        long long torus_verts = 0;
        for (char v : dr.exterior.vertex_boundary) torus_verts += v;
        CHECK(bl.complex.n_vertices == dr.exterior.n_vertices + 3 * torus_verts);
        CHECK(bl.complex.n_vertices < 192 * k + 224);
        // the boundary itself is untouched
        BoundarySurfaceInfo b0 = boundary_surface_info(dr.exterior);
        BoundarySurfaceInfo b1 = boundary_surface_info(bl.complex);
        CHECK(b0.verts == b1.verts);
        CHECK(b0.edges == b1.edges);
        CHECK(b0.faces == b1.faces);
        // K2 persists, within the fourfold bound
        CHECK(bl.k2_edges <= 4 * 11);
        CHECK(bl.k2_edges >= (long long)dr.k2.edges.size());
        // every compact 3-cell meets the boundary in a connected set: the
        // cells meeting it two-dimensionally are exactly the lens cells,
        // each meeting it in a single 2-cell
        std::vector<std::vector<int>> cof(bl.complex.faces.size());
        for (int X = 0; X < (int)bl.complex.cells.size(); X++)
            for (int f : bl.complex.cells[X].faces) cof[f].push_back(X);
        std::map<int, int> boundary_cells_faces;
        for (int f = 0; f < (int)bl.complex.faces.size(); f++)
            if (bl.complex.face_boundary[f]) {
                REQUIRE(cof[f].size() == 1);
                boundary_cells_faces[cof[f][0]]++;
            }
        for (auto& [X, n] : boundary_cells_faces) CHECK(n == 1);
    }
}

TEST_CASE("meridian system: three 0-framed parallels and three rings") {
    for (int m : {0, 1}) {
        BraidWord b;
        int k = 0;
        if (m >= 1) {
            b = standard_braid(m);
            k = b.crossing_count();
        }
        PbResult pb = build_Pb(b);
        DrillResult dr = drill_K1(pb);
        MeridianSystem ms = find_meridians(dr.exterior, dr, pb);
        CHECK(ms.meridians.size() == 3);
        CHECK(ms.longitudes.size() == 3);
        CHECK(ms.longitude_crossings == 9);
        CHECK(ms.meridian_crossings <= 22 * k + 16);
        // pairwise disjoint curves
        std::set<P3> seen;
        for (auto& c : ms.meridians)
            for (size_t i = 0; i + 1 < c.points.size(); i++) CHECK(seen.insert(c.points[i]).second);
    }
}
