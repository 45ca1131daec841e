#pragma once

#include <optional>
#include <vector>

#include "tri3/cellcomplex.hpp"
#include "tri3/grid.hpp"

namespace tri3 {

// A word in the 4-strand braid group: letters (generator index in {1,2,3},
// sign in {+1,-1}), listed from the middle of the plat outward.
struct BraidWord {
    std::vector<std::pair<int, int>> letters;
    int crossing_count() const { return (int)letters.size(); }
};

BraidWord standard_braid(int m);  // (sigma_1 sigma_2^-1)^m

// All construction coordinates are scaled by 12, so the paper's halves and
// thirds become even integers and the radius-1 drilling tube clears every
// non-incident wall by at least two units.
constexpr int kScale = 12;

struct DiagramCrossing {
    long long sweep_y;  // ordering key, bottom to top
    int index;          // generator index
    int sign;           // crossing sign of the braid letter realized here
    int writhe_sign;    // with both strand orientations
};

struct PbResult {
    SimpleCellComplex complex;
    EdgeCycle k1, k2;
    std::vector<P3> k1_path;  // closed lattice polyline
    std::vector<DiagramCrossing> diagram;
    int writhe = 0;
    long long vertices_on_k1 = 0;
};

// Construction of the wall system P_b and the plat closure K1 of b b^-1,
// together with the auxiliary unknot K2 through the middle walls.
PbResult build_Pb(const BraidWord& b);

struct DrillResult {
    SimpleCellComplex exterior;  // Z_b, solid-torus complement of K1
    EdgeCycle k2;                // the representative of K2 in the exterior
    long long k2_pattern_edges = 0;  // edges of k2 on the boundary torus
    std::set<P3> tube;
};

DrillResult drill_K1(const PbResult& pb);

// A curve drawn on the boundary torus, as a closed lattice polyline on the
// tube wall together with its crossings of the boundary pattern.
struct TorusCurve {
    std::vector<P3> points;  // closed polyline, points[0] repeated at the end
    struct Crossing {
        int at_point;  // index into points
        int edge;      // boundary 1-cell crossed
        int pos;       // lattice position along that 1-cell's segment chain
    };
    std::vector<Crossing> crossings;
};

struct MeridianSystem {
    std::vector<TorusCurve> meridians;    // three 0-framed parallels of K1
    std::vector<TorusCurve> longitudes;   // three tube cross-section rings
    long long meridian_crossings = 0;     // #(Lambda intersect Z_b^1)
    long long longitude_crossings = 0;    // 9 = three rings x three sheets
};

// Lemma-style meridian system: three disjoint parallels of the drilled cycle
// with vanishing linking number, plus three cross-section rings.
MeridianSystem find_meridians(const SimpleCellComplex& zb, const DrillResult& dr, const PbResult& pb);

struct BlisterResult {
    SimpleCellComplex complex;  // Z'_b
    // old cell ids -> new ids (boundary cells keep their structure)
    std::vector<int> vertex_map, edge_map, face_map, cell_map;
    EdgeCycle k2;
    long long k2_edges = 0;
};

// Construction 2.7 subdivision: a pushed-in copy of every boundary 2-cell,
// so each compact 3-cell meets the boundary torus in a connected set.
BlisterResult subdivide_boundary_cells(const SimpleCellComplex& zb, const EdgeCycle& k2);

struct FamilyStats {
    int m = 0, k = 0;
    long long pb_vertices = 0;           // == 24k + 28
    long long zb_vertices = 0;           // < 48k + 56
    long long zpb_vertices = 0;          // < 192k + 224
    long long meridian_crossings = 0;    // <= 22k + 16
    long long c_vertices_nominal = 0;    // before perturbation, < 428k + 516
    long long c_vertices = 0;            // after perturbation, nominal + 18
    long long tm_tets = 0;               // <= 856m + 534
    long long k2_edges_zb = 0;
    long long k2_edges_zpb = 0;
    long long lm_edges = 0;              // <= 88
    int writhe = 0;
    long long vertices_on_k1 = 0;
};

struct FamilyResult {
    Triangulation3 tm;
    FamilyStats stats;
    SimpleCellComplex c_complex;  // the glued simple decomposition C'
    // intermediate stages, kept when emit_stages is set
    std::optional<PbResult> pb;
    std::optional<DrillResult> zb;
    std::optional<BlisterResult> zpb;
};

FamilyResult assemble_family(int m, bool emit_stages = false);

}  // namespace tri3
