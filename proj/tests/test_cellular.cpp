#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tri3/canonical.hpp"
#include "tri3/cellcomplex.hpp"
#include "tri3/homology.hpp"

using namespace tri3;

TEST_CASE("dual of the boundary 4-simplex") {
    Triangulation3 t = boundary_4_simplex();
    SimpleCellComplex c = dual_complex(t);
    CHECK(c.n_vertices == 5);
    CHECK((int)c.edges.size() == 10);
    CHECK((int)c.faces.size() == 10);
    CHECK((int)c.cells.size() == 5);
    CHECK(validate_simple(c).ok());
    CHECK(validate_regular(c).ok());
    // dual of dual recovers the face structure
    Triangulation3 back = dual_triangulation(c);
    CHECK(is_isomorphic(back, t));
}

TEST_CASE("dual complexes are regular for all fixtures") {
    for (Triangulation3 t : {boundary_4_simplex(), join_of_cycles(3, 3), join_of_cycles(3, 4)}) {
        SimpleCellComplex c = dual_complex(t);
        CHECK(validate_simple(c).ok());
        CHECK(validate_regular(c).ok());
        CHECK(is_isomorphic(dual_triangulation(c), t));
        CHECK(c.n_vertices == (int)t.tets.size());
    }
}

TEST_CASE("TQ is the barycentric subdivision") {
    Triangulation3 t = boundary_4_simplex();
    SimpleCellComplex c = dual_complex(t);
    TQResult tq = triangulate_TQ(c);
    CHECK((int)tq.tri.tets.size() == 120);
    CHECK((long long)tq.tri.tets.size() == c.flag_count());
    CHECK(validate(tq.tri).ok());
    CHECK(is_isomorphic(tq.tri, barycentric_subdivision(t)));
    CHECK(homology(tq.tri).is_sphere_like());

    SimpleCellComplex cj = dual_complex(join_of_cycles(3, 3));
    TQResult tqj = triangulate_TQ(cj);
    CHECK(validate(tqj.tri).ok());
    CHECK((long long)tqj.tri.tets.size() == cj.flag_count());
    CHECK(is_isomorphic(tqj.tri, barycentric_subdivision(join_of_cycles(3, 3))));
}

namespace {

// walk around vertex w of the boundary sphere of cell X in dual(t):
// crossing the three edges at w, arcs through the three faces
DiscSpec corner_walk(const SimpleCellComplex& c, int cell, int w) {
    DiscSpec spec;
    spec.cell = cell;
    std::set<int> cfaces(c.cells[cell].faces.begin(), c.cells[cell].faces.end());
    // edges at w on faces of the cell
    std::vector<int> es;
    for (int e = 0; e < (int)c.edges.size(); e++) {
        if (c.edges[e].v0 != w && c.edges[e].v1 != w) continue;
        // on the cell's boundary?
        for (int f : c.cells[cell].faces)
            if (std::count(c.faces[f].edges.begin(), c.faces[f].edges.end(), e)) {
                es.push_back(e);
                break;
            }
    }
    REQUIRE(es.size() == 3);
    // order the three edges so consecutive ones share a face of the cell at w
    auto face_joining = [&](int e1, int e2) {
        for (int f : c.cells[cell].faces) {
            const auto& fe = c.faces[f].edges;
            if (std::count(fe.begin(), fe.end(), e1) && std::count(fe.begin(), fe.end(), e2)) return f;
        }
        return -1;
    };
    std::vector<int> order{es[0]};
    std::vector<int> afaces;
    std::set<int> used{es[0]};
    for (int step = 0; step < 2; step++) {
        for (int e : es) {
            if (used.count(e)) continue;
            int f = face_joining(order.back(), e);
            if (f >= 0) {
                afaces.push_back(f);
                order.push_back(e);
                used.insert(e);
                break;
            }
        }
    }
    REQUIRE(order.size() == 3);
    int fclose = face_joining(order.back(), order.front());
    REQUIRE(fclose >= 0);
    afaces.push_back(fclose);
    spec.crossing_edges = order;
    spec.arc_faces = afaces;
    return spec;
}

}  // namespace

TEST_CASE("insert then delete a corner stratum on the dual 4-simplex") {
    SimpleCellComplex c = dual_complex(boundary_4_simplex());
    // walk around vertex 0 of cell 0's boundary
    int w = c.faces[c.cells[0].faces[0]].verts[0];
    DiscSpec spec = corner_walk(c, 0, w);
    StratumInsertResult ins = insert_stratum(c, spec);
    CHECK(ins.k == 3);
    CHECK((int)ins.expansions.steps.size() == 4 * 3 + 2);
    CHECK(validate_simple(ins.enlarged).ok());
    CHECK(validate_regular(ins.enlarged).ok());

    // the expansion sequence replays from TQ(c) to TQ(enlarged)
    TQResult tq0 = triangulate_TQ(c);
    Triangulation3 end = replay(tq0.tri, ins.expansions);
    TQResult tq1 = triangulate_TQ(ins.enlarged);
    CHECK(is_isomorphic(end, tq1.tri));

    // now delete it again: 14 contractions, replaying to TQ(c)
    StratumDeleteResult del = delete_stratum(ins.enlarged, ins.new_face);
    CHECK(del.k == 3);
    CHECK((int)del.contractions.steps.size() == 14);
    Triangulation3 back = replay(tq1.tri, del.contractions);
    CHECK(is_isomorphic(back, tq0.tri));
    CHECK(is_isomorphic(dual_triangulation(del.reduced), boundary_4_simplex()));
}

TEST_CASE("deleting a dual 2-cell of the 4-simplex dual (k=3, 14 moves)") {
    SimpleCellComplex c = dual_complex(boundary_4_simplex());
    StratumDeleteResult del = delete_stratum(c, 0);
    CHECK(del.k == 3);
    CHECK((int)del.contractions.steps.size() == 14);
    TQResult tq = triangulate_TQ(c);
    Triangulation3 end = replay(tq.tri, del.contractions);
    CHECK(is_isomorphic(end, triangulate_TQ(del.reduced).tri));
    // the merged spine is still regular but its dual is no longer simplicial
    CHECK(validate_regular(del.reduced).ok());
    CHECK_THROWS(dual_triangulation(del.reduced));
}

TEST_CASE("deleting a dual 2-cell of the join fixture (k=4, 18 moves)") {
    Triangulation3 t = join_of_cycles(3, 3);
    SimpleCellComplex c = dual_complex(t);
    // pick the dual face of a cross-factor edge: star has 4 tetrahedra, k = 4
    int face = -1;
    for (int f = 0; f < (int)c.faces.size(); f++)
        if (c.faces[f].verts.size() == 4) {
            face = f;
            break;
        }
    REQUIRE(face >= 0);
    StratumDeleteResult del = delete_stratum(c, face);
    CHECK(del.k == 4);
    CHECK((int)del.contractions.steps.size() == 18);
    Triangulation3 end = replay(triangulate_TQ(c).tri, del.contractions);
    CHECK(is_isomorphic(end, triangulate_TQ(del.reduced).tri));
}

TEST_CASE("malformed disc specs are rejected") {
    SimpleCellComplex c = dual_complex(boundary_4_simplex());
    DiscSpec bad;
    bad.cell = 0;
    bad.crossing_edges = {c.cells[0].faces[0], c.cells[0].faces[0]};
    bad.arc_faces = {c.cells[0].faces[0], c.cells[0].faces[1]};
    CHECK_THROWS(insert_stratum(c, bad));
    bad.cell = 99;
    CHECK_THROWS(insert_stratum(c, bad));
    CHECK_THROWS(delete_stratum(c, 999));
}

TEST_CASE("homology is preserved under TQ for the join fixture") {
    SimpleCellComplex c = dual_complex(join_of_cycles(3, 3));
    TQResult tq = triangulate_TQ(c);
    CHECK(homology(tq.tri).is_sphere_like());
}
