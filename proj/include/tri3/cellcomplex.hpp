#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tri3/moves.hpp"
#include "tri3/triangulation.hpp"

namespace tri3 {

struct GridGeometry;  // grid.hpp

struct CellEdge {
    int v0 = -1, v1 = -1;
};

// A 2-cell with its boundary circuit: edges[i] joins verts[i] to verts[i+1 mod r].
struct CellFace {
    std::vector<int> verts;
    std::vector<int> edges;
};

struct Cell3 {
    std::vector<int> faces;
};

// A simple cellular decomposition of a closed 3-manifold (or of a compact one
// with marked boundary, e.g. the knot-exterior solid torus). The 2-skeleton is
// a fake surface: interior 1-cells carry exactly three 2-cell corners and
// every 0-cell has the complete graph K4 as link.
struct SimpleCellComplex {
    int n_vertices = 0;
    std::vector<CellEdge> edges;
    std::vector<CellFace> faces;
    std::vector<Cell3> cells;
    // cyclic order of the incident 2-cells around each 1-cell (a combinatorial
    // embedding; abstract incidence alone underdetermines drilling)
    std::vector<std::vector<int>> edge_order;
    std::vector<char> vertex_boundary, edge_boundary, face_boundary;
    std::shared_ptr<GridGeometry> geometry;

    bool has_boundary() const;
    long long flag_count() const;  // incidence chains v < e < f < X
    void init_flags();             // size the boundary-flag vectors (all interior)
};

struct CellIssue {
    std::string what;
};

struct CellValidationReport {
    std::vector<CellIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// Fake-surface / simple-decomposition structure checks.
CellValidationReport validate_simple(const SimpleCellComplex& c);
// Regularity: each interior 2-cell separates two different 3-cells, two
// 3-cells meet in at most one 2-cell, two 2-cells meet in at most one 1-cell.
CellValidationReport validate_regular(const SimpleCellComplex& c);

// The dual cellular decomposition of a closed triangulation: i-cells of the
// dual correspond to (3-i)-simplices.
SimpleCellComplex dual_complex(const Triangulation3& t);

struct TQResult {
    Triangulation3 tri;
    // TQ vertex of each cell, by dimension
    std::vector<int> of_vertex, of_edge, of_face, of_cell;
};

// Barycentric subdivision of the decomposition: one vertex per cell,
// tetrahedra are the incidence flags.
TQResult triangulate_TQ(const SimpleCellComplex& c);

struct StratumDeleteResult {
    SimpleCellComplex reduced;
    MoveSequence contractions;  // on triangulate_TQ(input); exactly 4k+2 moves
    int k = 0;                  // intrinsic vertices in the closure of the stratum
};

StratumDeleteResult delete_stratum(const SimpleCellComplex& c, int face_id);

// Gluing data for a new disc stratum inside one 3-cell: a closed walk on the
// cell's boundary sphere crossing the listed edges, with arc i running through
// face arc_faces[i] from crossing i to crossing i+1.
struct DiscSpec {
    int cell = -1;
    std::vector<int> crossing_edges;
    std::vector<int> arc_faces;
};

struct StratumInsertResult {
    SimpleCellComplex enlarged;
    MoveSequence expansions;  // on triangulate_TQ(input); exactly 4k+2 moves
    int new_face = -1;
    int k = 0;
};

StratumInsertResult insert_stratum(const SimpleCellComplex& c, const DiscSpec& spec);

struct EdgeCycle {
    std::vector<int> edges;     // cyclic
    std::vector<int> vertices;  // vertices[i] is shared by edges[i-1 mod n] and edges[i]
};

// One tetrahedron per 0-cell, spanned by its four incident 3-cells.
Triangulation3 dual_triangulation(const SimpleCellComplex& c);

}  // namespace tri3
