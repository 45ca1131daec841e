#pragma once

#include <map>
#include <optional>
#include <set>

#include "tri3/cellcomplex.hpp"

namespace tri3 {

struct P3 {
    int x = 0, y = 0, z = 0;
    auto operator<=>(const P3&) const = default;
    int operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    int& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }
};

inline P3 unit(int axis) {
    P3 p;
    p[axis] = 1;
    return p;
}
inline P3 operator+(P3 a, P3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline P3 operator-(P3 a, P3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// closed unit square normal to `axis` with minimal corner p (p[axis] is the plane level)
struct Facet {
    int axis = 0;
    P3 p;
    auto operator<=>(const Facet&) const = default;
};

// closed unit segment from p to p+unit(axis)
struct Seg {
    int axis = 0;
    P3 p;
    auto operator<=>(const Seg&) const = default;
};

using FacetSet = std::set<Facet>;

// A coordinate plane closed up through the point at infinity: the plane
// {coord[axis] == level} minus the open slab of the given box extent. Facets
// of the plane inside the iteration box must also appear in the facet set.
struct InfinitePlane {
    int axis = 1;
    int level = 0;
    P3 hole_lo, hole_hi;  // the box W; plane facets strictly inside are absent
};

struct GridInput {
    FacetSet facets;
    FacetSet boundary;        // marked manifold-boundary facets (drilled torus walls)
    std::set<P3> excluded;    // cubes outside the manifold (the drilled solid)
    std::optional<InfinitePlane> inf;
    P3 lo, hi;                // iteration box corners (cubes [lo, hi])
};

struct GridGeometry {
    GridInput input;
    std::vector<P3> vertex_point;
    std::vector<std::vector<Seg>> edge_segs;  // ordered from endpoint v0 to v1
    std::vector<FacetSet> face_facets;
    std::vector<std::set<P3>> cell_cubes;
    std::vector<char> cell_unbounded;
    int inf_face = -1;
    std::map<P3, int> vertex_of_point;
    std::map<Seg, int> edge_of_seg;
    std::map<Facet, int> face_of_facet;
    std::map<P3, int> cell_of_cube;
};

// Builds the simple cellular decomposition induced by a union of axis-aligned
// unit facets: 0-cells at K4 points, 1-cells along triple lines, 2-cells the
// strata, 3-cells the complement components. Throws when the union is not a
// fake surface or a stratum fails to close up properly.
SimpleCellComplex extract_grid_complex(const GridInput& in);

struct TruncateResult {
    SimpleCellComplex exterior;
    // cells preserved outside the closed star of the cycle: old id -> new id
    std::map<int, int> vertex_map, edge_map, face_map, cell_map;
    std::set<P3> drilled_cubes;
};

// Combinatorial drilling: removes the open regular neighborhood of a simple
// edge cycle (the 2x2 cube tube around its lattice path) and installs the tube
// wall as marked boundary. Requires grid geometry on the complex.
TruncateResult truncate_along_cycle(const SimpleCellComplex& c, const EdgeCycle& k1);

// Boundary surface counts of a complex with marked boundary.
struct BoundarySurfaceInfo {
    long long verts = 0, edges = 0, faces = 0;
    int components = 0;
    long long euler() const { return verts - edges + faces; }
};
BoundarySurfaceInfo boundary_surface_info(const SimpleCellComplex& c);

}  // namespace tri3
