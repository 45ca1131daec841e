#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tri3/canonical.hpp"
#include "tri3/cellcomplex.hpp"
#include "tri3/grid.hpp"
#include "tri3/homology.hpp"

using namespace tri3;

namespace {

void add_rect(FacetSet& fs, int axis, int level, int a1, int lo1, int hi1, int a2, int lo2, int hi2) {
    for (int u = lo1; u < hi1; u++)
        for (int v = lo2; v < hi2; v++) {
            Facet f;
            f.axis = axis;
            f.p[axis] = level;
            f.p[a1] = u;
            f.p[a2] = v;
            fs.insert(f);
        }
}

// box [0,6]^3 with an interior table at z=2, an upper wall x=2 and a lower
// wall y=2; spacing 2 keeps the radius-1 drilling tube clear of tangencies
GridInput box_fixture() {
    GridInput in;
    FacetSet& fs = in.facets;
    // box faces
    add_rect(fs, 0, 0, 1, 0, 6, 2, 0, 6);
    add_rect(fs, 0, 6, 1, 0, 6, 2, 0, 6);
    add_rect(fs, 1, 0, 0, 0, 6, 2, 0, 6);
    add_rect(fs, 1, 6, 0, 0, 6, 2, 0, 6);
    add_rect(fs, 2, 0, 0, 0, 6, 1, 0, 6);
    add_rect(fs, 2, 6, 0, 0, 6, 1, 0, 6);
    // table z=2
    add_rect(fs, 2, 2, 0, 0, 6, 1, 0, 6);
    // wall x=2 for z in [2,6]
    add_rect(fs, 0, 2, 1, 0, 6, 2, 2, 6);
    // wall y=2 for z in [0,2]
    add_rect(fs, 1, 2, 0, 0, 6, 2, 0, 2);
    in.lo = {-3, -3, -3};
    in.hi = {9, 9, 9};
    return in;
}

}  // namespace

TEST_CASE("box fixture extracts to the expected cell counts") {
    SimpleCellComplex c = extract_grid_complex(box_fixture());
    CHECK(c.n_vertices == 5);
    CHECK((int)c.edges.size() == 10);
    CHECK((int)c.faces.size() == 10);
    CHECK((int)c.cells.size() == 5);
    CHECK(validate_simple(c).ok());
    CHECK(validate_regular(c).ok());
    CHECK(!c.has_boundary());
    // its dual is the boundary 4-simplex
    Triangulation3 dual = dual_triangulation(c);
    CHECK(validate(dual).ok());
    CHECK(is_isomorphic(dual, boundary_4_simplex()));
    // and its barycentric subdivision is a 3-sphere triangulation
    TQResult tq = triangulate_TQ(c);
    CHECK(validate(tq.tri).ok());
    CHECK(homology(tq.tri).is_sphere_like());
    CHECK((long long)tq.tri.tets.size() == c.flag_count());
}

TEST_CASE("drilling an unknotted coordinate square out of the box fixture") {
    SimpleCellComplex c = extract_grid_complex(box_fixture());
    REQUIRE(c.geometry);
    // the cycle: boundary of the table rectangle at z=1 (an unknotted square)
    const GridGeometry& g = *c.geometry;
    // order the four rim edges into a cycle by walking
    EdgeCycle k1;
    {
        // rim edges: those whose segments stay on the z=1 plane at the box walls
        std::set<int> rim;
        for (int e = 0; e < (int)c.edges.size(); e++) {
            bool ok = true;
            for (const Seg& s : g.edge_segs[e]) {
                if (s.p.z != 2 || s.axis == 2) ok = false;
                bool on_wall = true;
                // exclude the interior crossing lines x=1 / y=1
                if (s.axis == 0 && !(s.p.y == 0 || s.p.y == 6)) ok = false;
                if (s.axis == 1 && !(s.p.x == 0 || s.p.x == 6)) ok = false;
                (void)on_wall;
            }
            if (ok) rim.insert(e);
        }
        REQUIRE(rim.size() == 4);
        int cur = *rim.begin();
        int v = c.edges[cur].v0;
        for (int i = 0; i < 4; i++) {
            k1.edges.push_back(cur);
            k1.vertices.push_back(v);
            int w = c.edges[cur].v0 == v ? c.edges[cur].v1 : c.edges[cur].v0;
            for (int e : rim)
                if (e != cur && (c.edges[e].v0 == w || c.edges[e].v1 == w)) {
                    cur = e;
                    break;
                }
            v = w;
        }
    }
    // The square bounds a 2-cell, so the outer complement ball sees the whole
    // cycle: its tube strip closes into an annulus and the exterior is not a
    // simple decomposition. The drill must detect this and refuse.
    CHECK_THROWS_WITH_AS(truncate_along_cycle(c, k1),
                         doctest::Contains("not a single circuit"), std::invalid_argument);
}

TEST_CASE("truncate rejects malformed cycles") {
    SimpleCellComplex c = extract_grid_complex(box_fixture());
    EdgeCycle bad;
    bad.edges = {0, 0};
    bad.vertices = {c.edges[0].v0, c.edges[0].v1};
    CHECK_THROWS(truncate_along_cycle(c, bad));
    SimpleCellComplex no_geo = c;
    no_geo.geometry.reset();
    EdgeCycle k;
    k.edges = {0};
    k.vertices = {c.edges[0].v0};
    CHECK_THROWS(truncate_along_cycle(no_geo, k));
}
