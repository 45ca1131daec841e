#include "tri3/braid.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace tri3 {

BraidWord standard_braid(int m) {
    if (m < 1) throw std::invalid_argument("standard_braid: m must be positive");
    BraidWord b;
    for (int r = 0; r < m; r++) {
        b.letters.push_back({1, +1});
        b.letters.push_back({2, -1});
    }
    return b;
}

namespace {

void add_rect(FacetSet& fs, int axis, int level, int lo1, int hi1, int lo2, int hi2) {
    int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
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

int lane_x(int t) { return kScale * t; }  // strand lanes at x = 12,24,36,48

struct Piece {
    std::vector<P3> pts;
    int zone = -1;   // index into zones when this is an over/under piece
    bool over = false;
};

struct Zone {
    int j;        // letter number, 1-based
    int s;        // +1 for the b side, -1 for the b^-1 side
    int index;    // generator index i_j
    int chi;      // realized crossing sign: s>0 ? eps : -eps
    int y_lo, y_hi;
    int xw, xe, xm;
    // filled after stitching: strand directions through the crossing
    int d_over = 0, d_under = 0;
};

}  // namespace

PbResult build_Pb(const BraidWord& b) {
    const int k = b.crossing_count();
    const int S = kScale;
    const int Y = S * (k + 2);
    for (auto& [idx, eps] : b.letters)
        if (idx < 1 || idx > 3 || (eps != 1 && eps != -1)) throw std::invalid_argument("build_Pb: bad braid letter");

    GridInput in;
    FacetSet& fs = in.facets;
    // the box W
    add_rect(fs, 0, 0, -Y, Y, -S, S);
    add_rect(fs, 0, 5 * S, -Y, Y, -S, S);
    add_rect(fs, 1, -Y, -S, S, 0, 5 * S);
    add_rect(fs, 1, Y, -S, S, 0, 5 * S);
    add_rect(fs, 2, -S, 0, 5 * S, -Y, Y);
    add_rect(fs, 2, S, 0, 5 * S, -Y, Y);
    // the table z=0 and the vertical walls at integer x
    add_rect(fs, 2, 0, 0, 5 * S, -Y, Y);
    for (int i = 0; i <= 5; i++) add_rect(fs, 0, i * S, -Y, Y, 0, S);
    // the half-plane wall below the table at y = -1/2 (axis-1 laterals: z, x)
    add_rect(fs, 1, -S / 2, -S, 0, 0, 5 * S);
    // the two middle walls over x in [2,3]
    add_rect(fs, 1, 0, 0, S, 2 * S, 3 * S);
    add_rect(fs, 1, -(k * S + 3 * S / 2), 0, S, 2 * S, 3 * S);
    // crossing walls: thirds scaled to 4 and 8
    std::vector<Zone> zones;
    for (int j = 1; j <= k; j++) {
        int I = S * b.letters[j - 1].first;
        for (int s : {+1, -1}) {
            int ya = s * (S * j + S / 3), yb = s * (S * j + 2 * S / 3);
            add_rect(fs, 1, ya, 0, S, I, I + S);
            add_rect(fs, 1, yb, 0, S, I, I + S);
            add_rect(fs, 0, I + S / 2, std::min(ya, yb), std::max(ya, yb), 0, S);
            Zone z;
            z.j = j;
            z.s = s;
            z.index = b.letters[j - 1].first;
            z.chi = s > 0 ? b.letters[j - 1].second : -b.letters[j - 1].second;
            z.y_lo = std::min(ya, yb);
            z.y_hi = std::max(ya, yb);
            z.xw = I;
            z.xe = I + S;
            z.xm = I + S / 2;
            zones.push_back(z);
        }
    }
    // the unbounded stratum at y = 1/2, closed through infinity
    InfinitePlane ip;
    ip.axis = 1;
    ip.level = S / 2;
    ip.hole_lo = {0, -Y, -S};
    ip.hole_hi = {5 * S, Y, S};
    in.inf = ip;
    in.lo = {-3, -Y - 3, -S - 3};
    in.hi = {5 * S + 3, Y + 3, S + 3};
    for (int x = in.lo.x; x < in.hi.x; x++)
        for (int z = in.lo.z; z < in.hi.z; z++) {
            if (x >= 0 && x < 5 * S && z >= -S && z < S) continue;
            Facet f;
            f.axis = 1;
            f.p = {x, S / 2, z};
            fs.insert(f);
        }

    PbResult out;
    out.complex = extract_grid_complex(in);

    // ---- route K1: the plat closure of b b^-1
    std::vector<Piece> pieces;
    std::map<int, std::vector<int>> lane_portals;  // lane x -> portal y values
    for (int zi = 0; zi < (int)zones.size(); zi++) {
        const Zone& z = zones[zi];
        int xo = z.chi > 0 ? z.xw : z.xe;  // over-strand enters here (south)
        int xu = z.chi > 0 ? z.xe : z.xw;
        Piece over;
        over.zone = zi;
        over.over = true;
        over.pts = {{xo, z.y_lo, 0}, {xo, z.y_lo, S}, {xo, z.y_hi, S}, {xu, z.y_hi, S}, {xu, z.y_hi, 0}};
        Piece under;
        under.zone = zi;
        under.over = false;
        under.pts = {{xu, z.y_lo, 0}, {z.xm, z.y_lo, 0}, {z.xm, z.y_hi, 0}, {xo, z.y_hi, 0}};
        pieces.push_back(over);
        pieces.push_back(under);
        for (int x : {z.xw, z.xe}) {
            lane_portals[x].push_back(z.y_lo);
            lane_portals[x].push_back(z.y_hi);
        }
    }
    const int cup23_y = -(k * S + 3 * S / 2);
    std::map<int, std::pair<int, int>> lane_ends;  // lane -> (south terminal, north terminal)
    lane_ends[lane_x(1)] = {-Y, Y};
    lane_ends[lane_x(2)] = {cup23_y, Y};
    lane_ends[lane_x(3)] = {cup23_y, Y};
    lane_ends[lane_x(4)] = {-Y, Y};
    for (int t = 1; t <= 4; t++) {
        int x = lane_x(t);
        std::vector<int> ys = lane_portals[x];
        std::sort(ys.begin(), ys.end());
        auto [ys_s, ys_n] = lane_ends[x];
        std::vector<int> stops{ys_s};
        stops.insert(stops.end(), ys.begin(), ys.end());
        stops.push_back(ys_n);
        if (stops.size() % 2 != 0) throw std::logic_error("build_Pb: odd lane portal count");
        for (size_t i = 0; i + 1 < stops.size(); i += 2) {
            Piece run;
            run.pts = {{x, stops[i], 0}, {x, stops[i + 1], 0}};
            pieces.push_back(run);
        }
    }
    // caps pair (1,2) and (3,4); cups pair (2,3) inside and (1,4) outside
    pieces.push_back({{{lane_x(1), Y, 0}, {lane_x(2), Y, 0}}, -1, false});
    pieces.push_back({{{lane_x(3), Y, 0}, {lane_x(4), Y, 0}}, -1, false});
    pieces.push_back({{{lane_x(2), cup23_y, 0}, {lane_x(3), cup23_y, 0}}, -1, false});
    pieces.push_back({{{lane_x(1), -Y, 0}, {lane_x(4), -Y, 0}}, -1, false});

    // ---- stitch the pieces into one closed polyline
    std::map<P3, std::vector<int>> at_end;
    for (int i = 0; i < (int)pieces.size(); i++) {
        at_end[pieces[i].pts.front()].push_back(i);
        at_end[pieces[i].pts.back()].push_back(i);
    }
    for (auto& [p, v] : at_end)
        if (v.size() != 2) throw std::logic_error("build_Pb: plat pieces do not chain");
    std::vector<P3> path;
    {
        std::vector<char> used(pieces.size(), 0);
        int cur = 0;
        bool fwd = true;
        int count = 0;
        while (true) {
            used[cur] = 1;
            count++;
            const auto& pp = pieces[cur].pts;
            std::vector<P3> leg = fwd ? pp : std::vector<P3>(pp.rbegin(), pp.rend());
            // strand direction through a crossing zone
            if (pieces[cur].zone >= 0) {
                Zone& z = zones[pieces[cur].zone];
                int dir = leg.front().y < leg.back().y ? +1 : -1;
                (pieces[cur].over ? z.d_over : z.d_under) = dir;
            }
            for (size_t i = 0; i + 1 < leg.size(); i++) path.push_back(leg[i]);
            P3 end = leg.back();
            auto& cands = at_end[end];
            int nxt = (cands[0] == cur && (cands[1] != cur || used[cands[1]] != 1)) ? cands[1] : cands[0];
            if (nxt == cur) nxt = cands[cands[0] == cur ? 1 : 0];
            if (used[nxt]) {
                if (end == path.front()) break;
                throw std::logic_error("build_Pb: plat closed early");
            }
            cur = nxt;
            fwd = pieces[nxt].pts.front() == end;
            if (count > (int)pieces.size()) throw std::logic_error("build_Pb: plat stitch runaway");
        }
        if ((int)std::count(used.begin(), used.end(), 1) != (int)pieces.size())
            throw std::logic_error("build_Pb: plat closure is not a single cycle");
    }
    path.push_back(path.front());
    out.k1_path = path;

    // ---- diagram data: crossings bottom to top, with both strand directions
    for (const Zone& z : zones) {
        if (z.d_over == 0 || z.d_under == 0) throw std::logic_error("build_Pb: zone without strands");
        DiagramCrossing dc;
        dc.sweep_y = z.y_lo;
        dc.index = z.index;
        dc.sign = z.chi;
        dc.writhe_sign = z.chi * z.d_over * z.d_under;
        out.diagram.push_back(dc);
    }
    std::sort(out.diagram.begin(), out.diagram.end(),
              [](const DiagramCrossing& a, const DiagramCrossing& b) { return a.sweep_y < b.sweep_y; });
    out.writhe = 0;
    for (auto& dc : out.diagram) out.writhe += dc.writhe_sign;

    // ---- K1 as an edge cycle of the extracted complex
    const GridGeometry& g = *out.complex.geometry;
    {
        std::vector<int> everts, eedges;
        size_t i = 0;
        // rotate so the path starts at an intrinsic vertex
        std::vector<P3> pts(path.begin(), path.end() - 1);
        int start = -1;
        for (size_t a = 0; a < pts.size(); a++)
            if (g.vertex_of_point.count(pts[a])) {
                start = (int)a;
                break;
            }
        if (start < 0) throw std::logic_error("build_Pb: K1 avoids all intrinsic vertices");
        std::rotate(pts.begin(), pts.begin() + start, pts.end());
        pts.push_back(pts.front());
        int cur_edge = -1;
        for (size_t a = 0; a + 1 < pts.size(); a++) {
            P3 p = pts[a], q = pts[a + 1];
            P3 d = q - p;
            int axis = d.x != 0 ? 0 : (d.y != 0 ? 1 : 2);
            int len = d[axis];
            int dir = len > 0 ? 1 : -1;
            for (int step = 0; step < std::abs(len); step++) {
                P3 base = p;
                base[axis] += dir * step + (dir < 0 ? -1 : 0);
                Seg s{axis, base};
                auto it = g.edge_of_seg.find(s);
                if (it == g.edge_of_seg.end()) throw std::logic_error("build_Pb: K1 leaves the 1-skeleton");
                P3 at = p;
                at[axis] += dir * step;
                if (g.vertex_of_point.count(at)) {
                    everts.push_back(g.vertex_of_point.at(at));
                    eedges.push_back(it->second);
                    cur_edge = it->second;
                } else if (it->second != cur_edge) {
                    throw std::logic_error("build_Pb: K1 changes 1-cell away from a vertex");
                }
            }
        }
        out.k1.vertices = everts;
        out.k1.edges = eedges;
        std::set<int> vs(everts.begin(), everts.end()), es(eedges.begin(), eedges.end());
        if (vs.size() != everts.size() || es.size() != eedges.size())
            throw std::logic_error("build_Pb: K1 is not embedded");
        out.vertices_on_k1 = (long long)everts.size();
    }

    // ---- K2: over the middle wall and back under the half-plane wall
    {
        auto E = [&](int axis, P3 p) {
            Seg s{axis, p};
            auto it = g.edge_of_seg.find(s);
            if (it == g.edge_of_seg.end()) throw std::logic_error("build_Pb: K2 edge lookup failed");
            return it->second;
        };
        auto V = [&](P3 p) {
            auto it = g.vertex_of_point.find(p);
            if (it == g.vertex_of_point.end()) throw std::logic_error("build_Pb: K2 vertex lookup failed");
            return it->second;
        };
        int s2 = S / 2;
        out.k2.vertices = {V({2 * S, 0, 0}),  V({2 * S, 0, S}),  V({2 * S, s2, S}), V({3 * S, s2, S}),
                           V({3 * S, 0, S}),  V({3 * S, 0, 0}),  V({3 * S, -s2, 0}), V({2 * S, -s2, 0})};
        out.k2.edges = {E(2, {2 * S, 0, 0}),      E(1, {2 * S, 0, S}),  E(0, {2 * S + 1, s2, S}),
                        E(1, {3 * S, 0, S}),      E(2, {3 * S, 0, 0}),  E(1, {3 * S, -s2, 0}),
                        E(0, {2 * S + 1, -s2, 0}), E(1, {2 * S, -s2, 0})};
    }
    return out;
}

DrillResult drill_K1(const PbResult& pb) {
    DrillResult out;
    TruncateResult tr = truncate_along_cycle(pb.complex, pb.k1);
    out.exterior = std::move(tr.exterior);
    out.tube = std::move(tr.drilled_cubes);
    const GridGeometry& g = *out.exterior.geometry;
    const int S = kScale;
    auto E = [&](int axis, P3 p) {
        Seg s{axis, p};
        auto it = g.edge_of_seg.find(s);
        if (it == g.edge_of_seg.end()) throw std::logic_error("drill_K1: K2 edge lookup failed");
        return it->second;
    };
    auto V = [&](P3 p) {
        auto it = g.vertex_of_point.find(p);
        if (it == g.vertex_of_point.end()) throw std::logic_error("drill_K1: K2 vertex lookup failed");
        return it->second;
    };
    int s2 = S / 2;
    // the transported representative: truncated arch and under-edge, with four
    // detour edges on the tube wall past the shared lane segments
    out.k2.vertices = {V({2 * S, 0, 1}),      V({2 * S, 0, S}),      V({2 * S, s2, S}),  V({3 * S, s2, S}),
                       V({3 * S, 0, S}),      V({3 * S, 0, 1}),      V({3 * S - 1, 0, 0}), V({3 * S - 1, -s2, 0}),
                       V({2 * S + 1, -s2, 0}), V({2 * S + 1, 0, 0})};
    out.k2.edges = {E(2, {2 * S, 0, 6}),          E(1, {2 * S, 0, S}),      E(0, {2 * S + 1, s2, S}),
                    E(1, {3 * S, 0, S}),          E(2, {3 * S, 0, 6}),      E(2, {3 * S - 1, 0, 0}),
                    E(1, {3 * S - 1, -3, 0}),     E(0, {3 * S - 6, -s2, 0}), E(1, {2 * S + 1, -3, 0}),
                    E(2, {2 * S + 1, 0, 0})};
    for (size_t i = 0; i < out.k2.edges.size(); i++) {
        int e = out.k2.edges[i];
        int v = out.k2.vertices[i];
        if (out.exterior.edges[e].v0 != v && out.exterior.edges[e].v1 != v)
            throw std::logic_error("drill_K1: transported K2 does not chain");
        if (out.exterior.edge_boundary[e]) out.k2_pattern_edges++;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Construction: pushed-in copies of the boundary 2-cells (Z_b -> Z'_b)

namespace {

// split edge e of c at new vertices listed from the v0 end; returns the chain
// of edge ids from v0 to v1 and appends the new vertices
std::vector<int> split_edge_chain(SimpleCellComplex& c, int e, const std::vector<int>& new_verts) {
    std::vector<int> chain{e};
    if (new_verts.empty()) return chain;
    int v0 = c.edges[e].v0, v1 = c.edges[e].v1;
    // pieces: v0 - nv[0] - nv[1] - ... - v1
    std::vector<int> stops{v0};
    stops.insert(stops.end(), new_verts.begin(), new_verts.end());
    stops.push_back(v1);
    chain.clear();
    c.edges[e] = {stops[0], stops[1]};
    chain.push_back(e);
    for (size_t i = 1; i + 1 < stops.size(); i++) {
        int ne = (int)c.edges.size();
        c.edges.push_back({stops[i], stops[i + 1]});
        c.edge_boundary.push_back(c.edge_boundary[e]);
        if ((int)c.edge_order.size() > e) c.edge_order.push_back(c.edge_order[e]);
        chain.push_back(ne);
    }
    // rewrite all circuits through e
    for (auto& face : c.faces) {
        for (int j = 0; j < (int)face.edges.size(); j++) {
            if (face.edges[j] != e) continue;
            int a = face.verts[j], b = face.verts[(j + 1) % face.verts.size()];
            if (a == v0 && b == v1) {
                for (size_t t = 1; t < chain.size(); t++) {
                    face.edges.insert(face.edges.begin() + j + t, chain[t]);
                    face.verts.insert(face.verts.begin() + j + t, stops[t]);
                }
                j += (int)chain.size() - 1;
            } else if (a == v1 && b == v0) {
                face.edges[j] = chain.back();
                for (size_t t = 1; t < chain.size(); t++) {
                    face.edges.insert(face.edges.begin() + j + t, chain[chain.size() - 1 - t]);
                    face.verts.insert(face.verts.begin() + j + t, stops[stops.size() - 1 - t]);
                }
                j += (int)chain.size() - 1;
            } else {
                throw std::logic_error("split_edge_chain: circuit mismatch");
            }
        }
    }
    return chain;
}

// split face f along a new edge between two of its circuit vertices; returns
// (piece containing marker edge, other piece, chord edge id)
std::array<int, 3> split_face_by_chord(SimpleCellComplex& c, int f, int va, int vb, int marker_edge) {
    int chord = (int)c.edges.size();
    c.edges.push_back({va, vb});
    c.edge_boundary.push_back(0);
    c.edge_order.push_back({});
    const CellFace face = c.faces[f];
    int rr = (int)face.verts.size();
    int pa = -1, pb = -1;
    for (int j = 0; j < rr; j++) {
        if (face.verts[j] == va) pa = j;
        if (face.verts[j] == vb) pb = j;
    }
    if (pa < 0 || pb < 0 || pa == pb) throw std::logic_error("split_face_by_chord: chord ends not on circuit");
    CellFace p1, p2;
    for (int j = pa; j != pb; j = (j + 1) % rr) {
        p1.verts.push_back(face.verts[j]);
        p1.edges.push_back(face.edges[j]);
    }
    p1.verts.push_back(face.verts[pb]);
    p1.edges.push_back(chord);
    for (int j = pb; j != pa; j = (j + 1) % rr) {
        p2.verts.push_back(face.verts[j]);
        p2.edges.push_back(face.edges[j]);
    }
    p2.verts.push_back(face.verts[pa]);
    p2.edges.push_back(chord);
    int f2 = (int)c.faces.size();
    c.faces[f] = p1;
    c.faces.push_back(p2);
    c.face_boundary.push_back(c.face_boundary[f]);
    bool p1_has = std::count(p1.edges.begin(), p1.edges.end(), marker_edge) > 0;
    bool p2_has = std::count(p2.edges.begin(), p2.edges.end(), marker_edge) > 0;
    if (p1_has == p2_has) throw std::logic_error("split_face_by_chord: marker edge ambiguous");
    return {p1_has ? f : f2, p1_has ? f2 : f, chord};
}

}  // namespace

BlisterResult subdivide_boundary_cells(const SimpleCellComplex& zb, const EdgeCycle& k2) {
    CellValidationReport rep = validate_simple(zb);
    if (!rep.ok()) throw std::invalid_argument("subdivide_boundary_cells: input not simple: " + rep.summary());
    if (!zb.has_boundary()) throw std::invalid_argument("subdivide_boundary_cells: no boundary to copy");

    SimpleCellComplex c = zb;
    c.geometry.reset();
    const int nv_old = c.n_vertices;
    const int ne_old = (int)c.edges.size();
    const int nf_old = (int)c.faces.size();

    // interior germ at each torus vertex, interior sheet at each torus edge
    std::vector<int> interior_edge(nv_old, -1);
    for (int e = 0; e < ne_old; e++) {
        if (c.edge_boundary[e]) continue;
        for (int v : {c.edges[e].v0, c.edges[e].v1})
            if (c.vertex_boundary[v]) {
                if (interior_edge[v] >= 0) throw std::logic_error("blister: two interior germs at a torus vertex");
                interior_edge[v] = e;
            }
    }
    std::vector<int> interior_sheet(ne_old, -1);
    for (int f = 0; f < nf_old; f++) {
        if (c.face_boundary[f]) continue;
        for (int e : c.faces[f].edges)
            if (c.edge_boundary[e]) {
                if (interior_sheet[e] >= 0 && interior_sheet[e] != f)
                    throw std::logic_error("blister: two interior sheets at a torus edge");
                interior_sheet[e] = f;
            }
    }
    std::vector<std::vector<int>> cells_of_face(nf_old);
    for (int X = 0; X < (int)c.cells.size(); X++)
        for (int f : c.cells[X].faces) cells_of_face[f].push_back(X);

    std::vector<int> boundary_faces;
    for (int f = 0; f < nf_old; f++)
        if (c.face_boundary[f]) boundary_faces.push_back(f);
    // the two boundary cells at each torus edge, sorted
    std::map<int, std::array<int, 2>> bcells_at;
    for (int e = 0; e < ne_old; e++) {
        if (!c.edge_boundary[e]) continue;
        std::vector<int> bc;
        for (int g : boundary_faces)
            if (std::count(c.faces[g].edges.begin(), c.faces[g].edges.end(), e)) bc.push_back(g);
        std::sort(bc.begin(), bc.end());
        if (bc.size() != 2 || bc[0] == bc[1]) throw std::logic_error("blister: torus edge without two boundary cells");
        bcells_at[e] = {bc[0], bc[1]};
    }

    // 1. blister vertices on the interior germs, nested by boundary-cell id
    std::map<std::pair<int, int>, int> bvert;  // (boundary cell, torus vertex) -> new vertex
    std::vector<std::vector<int>> cells_at_vertex(nv_old);
    for (int f : boundary_faces)
        for (int v : c.faces[f].verts) cells_at_vertex[v].push_back(f);
    for (int v = 0; v < nv_old; v++) {
        if (!c.vertex_boundary[v]) continue;
        if (interior_edge[v] < 0) throw std::logic_error("blister: torus vertex without interior germ");
        std::vector<int>& cs = cells_at_vertex[v];
        std::sort(cs.begin(), cs.end());
        if (cs.size() != 3) throw std::logic_error("blister: torus vertex without three boundary cells");
        for (int f : cs) {
            bvert[{f, v}] = c.n_vertices++;
            c.vertex_boundary.push_back(0);
        }
    }
    std::map<int, std::vector<int>> sub_chain;  // split interior edge -> chain v0..v1
    for (int e = 0; e < ne_old; e++) {
        if (c.edge_boundary[e]) continue;
        int v0 = c.edges[e].v0, v1 = c.edges[e].v1;
        std::vector<int> pts;
        if (v0 < nv_old && c.vertex_boundary[v0] && interior_edge[v0] == e)
            for (int f : cells_at_vertex[v0]) pts.push_back(bvert.at({f, v0}));
        if (v1 < nv_old && c.vertex_boundary[v1] && interior_edge[v1] == e) {
            std::vector<int> far;
            for (int f : cells_at_vertex[v1]) far.push_back(bvert.at({f, v1}));
            pts.insert(pts.end(), far.rbegin(), far.rend());
        }
        if (pts.empty()) continue;
        sub_chain[e] = split_edge_chain(c, e, pts);
    }

    // 2. chords, tracking piece provenance
    std::vector<int> parent(c.faces.size());
    for (int f = 0; f < (int)c.faces.size(); f++) parent[f] = f < nf_old ? f : -1;
    std::map<std::pair<int, int>, int> chord_of;  // (boundary cell, torus edge) -> chord
    for (int e = 0; e < ne_old; e++) {
        if (!c.edge_boundary[e]) continue;
        auto [ca, cb] = bcells_at.at(e);
        int u = c.edges[e].v0, w = c.edges[e].v1;
        for (int cell : {ca, cb}) {
            // the piece of this edge's interior sheet carrying both chord ends
            int va = bvert.at({cell, u}), vb = bvert.at({cell, w});
            int sheet = interior_sheet[e];
            int host = -1;
            for (int f = 0; f < (int)c.faces.size(); f++) {
                if ((size_t)f < c.face_boundary.size() && c.face_boundary[f]) continue;
                int par = f < nf_old ? f : parent[f];
                if (par != sheet) continue;
                const auto& vs = c.faces[f].verts;
                if (std::count(vs.begin(), vs.end(), va) && std::count(vs.begin(), vs.end(), vb)) {
                    if (host >= 0) throw std::logic_error("blister: ambiguous chord host");
                    host = f;
                }
            }
            if (host < 0) throw std::logic_error("blister: no sheet piece carries the chord ends");
            int marker = (cell == ca) ? e : chord_of.at({ca, e});
            auto [near_p, far_p, chord] = split_face_by_chord(c, host, va, vb, marker);
            chord_of[{cell, e}] = chord;
            parent.resize(c.faces.size(), -1);
            int par = parent[host] >= 0 ? parent[host] : host;
            parent[near_p] = par;
            parent[far_p] = par;
        }
    }

    // 3. the pushed-in copies
    std::map<int, int> copy_of;
    for (int f : boundary_faces) {
        const CellFace& orig = c.faces[f];
        CellFace cp;
        int r = (int)orig.verts.size();
        for (int i = 0; i < r; i++) {
            cp.verts.push_back(bvert.at({f, orig.verts[i]}));
            cp.edges.push_back(chord_of.at({f, orig.edges[i]}));
        }
        copy_of[f] = (int)c.faces.size();
        c.faces.push_back(cp);
        c.face_boundary.push_back(0);
        parent.push_back(-1);
    }

    // 4. ownership of the sheet pieces on each side, then rebuild cell lists
    //    near piece (contains the torus edge): both lenses
    //    mid piece (contains both chords of an attachment): deeper lens + the
    //      interior cell behind the nearer boundary cell
    //    otherwise: the two interior cells of the parent sheet
    std::vector<Cell3> new_cells(c.cells.size());
    auto behind = [&](int bf) { return cells_of_face[bf][0]; };
    std::map<int, Cell3> lens_cells;  // boundary face -> lens
    for (int f : boundary_faces) {
        lens_cells[f].faces.push_back(f);
        lens_cells[f].faces.push_back(copy_of[f]);
    }
    std::map<int, std::vector<int>> attachments;  // parent sheet -> its torus edges
    for (int e = 0; e < ne_old; e++)
        if (c.edge_boundary[e]) attachments[interior_sheet[e]].push_back(e);
    // classify every current interior face
    for (int f = 0; f < (int)c.faces.size(); f++) {
        if (f < (int)c.face_boundary.size() && c.face_boundary[f]) continue;
        if (copy_of.size() && f >= nf_old && parent[f] < 0) continue;  // a copy
        int par = f < nf_old ? f : parent[f];
        if (par < 0) continue;
        if (cells_of_face[par].size() != 2)
            throw std::logic_error("blister: interior face without two cells");
        auto it = attachments.find(par);
        std::vector<int> owners;
        if (it != attachments.end()) {
            const CellFace& face = c.faces[f];
            auto has_edge = [&](int e) { return std::count(face.edges.begin(), face.edges.end(), e) > 0; };
            for (int e : it->second) {
                auto [ca, cb] = bcells_at.at(e);
                if (has_edge(e)) {
                    if (!owners.empty()) throw std::logic_error("blister: conflicting piece ownership");
                    owners = {-1 - ca, -1 - cb};  // negative: lens of boundary cell
                } else if (has_edge(chord_of.at({ca, e})) && has_edge(chord_of.at({cb, e}))) {
                    if (!owners.empty()) throw std::logic_error("blister: conflicting piece ownership");
                    owners = {-1 - cb, behind(ca)};
                }
            }
        }
        if (owners.empty()) owners = {cells_of_face[par][0], cells_of_face[par][1]};
        for (int o : owners) {
            if (o < 0)
                lens_cells[-1 - o].faces.push_back(f);
            else
                new_cells[o].faces.push_back(f);
        }
    }
    // boundary faces and copies
    for (int f : boundary_faces) {
        new_cells[behind(f)].faces.push_back(copy_of[f]);
    }
    std::vector<Cell3> all_cells = new_cells;
    std::map<int, int> lens_id;
    for (auto& [f, lens] : lens_cells) {
        lens_id[f] = (int)all_cells.size();
        all_cells.push_back(lens);
    }
    c.cells = std::move(all_cells);

    c.edge_order.assign(c.edges.size(), {});
    for (int f = 0; f < (int)c.faces.size(); f++)
        for (int e : c.faces[f].edges) c.edge_order[e].push_back(f);

    BlisterResult out;
    out.vertex_map.resize(zb.n_vertices);
    for (int v = 0; v < zb.n_vertices; v++) out.vertex_map[v] = v;
    out.edge_map.resize(zb.edges.size());
    for (int e = 0; e < (int)zb.edges.size(); e++) out.edge_map[e] = e;
    out.face_map.resize(zb.faces.size());
    for (int f = 0; f < nf_old; f++) out.face_map[f] = f;
    out.cell_map.resize(zb.cells.size());
    for (int X = 0; X < (int)zb.cells.size(); X++) out.cell_map[X] = X;

    // transport K2 through the interior-edge splits
    for (size_t i = 0; i < k2.edges.size(); i++) {
        int e = k2.edges[i];
        int v = k2.vertices[i];
        auto it = sub_chain.find(e);
        if (it == sub_chain.end()) {
            out.k2.edges.push_back(e);
            out.k2.vertices.push_back(v);
            continue;
        }
        std::vector<int> es = it->second;
        int first = es.front();
        if (c.edges[first].v0 != v && c.edges[first].v1 != v) std::reverse(es.begin(), es.end());
        int cur = v;
        for (int ee : es) {
            out.k2.edges.push_back(ee);
            out.k2.vertices.push_back(cur);
            cur = c.edges[ee].v0 == cur ? c.edges[ee].v1 : c.edges[ee].v0;
        }
    }
    out.k2_edges = (long long)out.k2.edges.size();

    CellValidationReport r2 = validate_simple(c);
    if (!r2.ok()) throw std::invalid_argument("subdivide_boundary_cells: result not simple: " + r2.summary());
    out.complex = std::move(c);
    return out;
}

// ---------------------------------------------------------------------------
// Meridian system: three 0-framed parallels of K1 plus three section rings

namespace {

P3 rotate_to(P3 a, P3 b, P3 v) {
    if (a == b) return v;
    auto dot3 = [](P3 x, P3 y) { return x.x * y.x + x.y * y.y + x.z * y.z; };
    int va = dot3(v, a), vb = dot3(v, b);
    // R: a -> b, b -> -a, orthogonal complement fixed
    P3 r = v;
    r.x += -va * a.x - vb * b.x + va * b.x - vb * a.x;
    r.y += -va * a.y - vb * b.y + va * b.y - vb * a.y;
    r.z += -va * a.z - vb * b.z + va * b.z - vb * a.z;
    return r;
}

std::vector<P3> expand_unit(const std::vector<P3>& poly) {
    std::vector<P3> out;
    for (size_t i = 0; i + 1 < poly.size(); i++) {
        P3 p = poly[i], q = poly[i + 1];
        P3 d = q - p;
        int axis = d.x != 0 ? 0 : (d.y != 0 ? 1 : 2);
        int len = std::abs(d[axis]);
        int sgn = d[axis] > 0 ? 1 : -1;
        for (int s = 0; s < len; s++) {
            P3 a = p;
            a[axis] += sgn * s;
            out.push_back(a);
        }
    }
    out.push_back(poly.back());
    return out;
}

// the four diagonal parallels of a closed axis polyline, by frame transport
std::vector<std::vector<P3>> diagonal_tracks(const std::vector<P3>& path) {
    size_t n = path.size() - 1;  // closed: back == front
    std::vector<P3> dir(n);
    for (size_t i = 0; i < n; i++) {
        P3 d = path[i + 1] - path[i];
        int axis = d.x != 0 ? 0 : (d.y != 0 ? 1 : 2);
        P3 u;
        u[axis] = d[axis] > 0 ? 1 : -1;
        dir[i] = u;
    }
    int a1 = -1, a2 = -1;
    for (int a = 0; a < 3; a++)
        if (dir[0][a] == 0) (a1 < 0 ? a1 : a2) = a;
    std::vector<std::vector<P3>> tracks;
    for (int s1 : {+1, -1})
        for (int s2 : {+1, -1}) {
            P3 o;
            o[a1] = s1;
            o[a2] = s2;
            std::vector<P3> tr{path[0] + o};
            P3 cur = o;
            // outside corners go around the block; inside corners are cut
            auto corner = [&](P3 at, P3 d_in, P3 nxt) {
                P3 mid;
                for (int a = 0; a < 3; a++) mid[a] = cur[a] != 0 ? cur[a] : nxt[a];
                P3 step = mid - cur;
                if (step == d_in) {
                    tr.push_back(at + mid);
                    tr.push_back(at + nxt);
                } else {
                    tr.pop_back();
                    tr.push_back(at + mid);
                }
            };
            for (size_t i = 0; i < n; i++) {
                if (i > 0 && !(dir[i] == dir[i - 1])) {
                    P3 nxt = rotate_to(dir[i - 1], dir[i], cur);
                    if (!(nxt == cur)) corner(path[i], dir[i - 1], nxt);
                    cur = nxt;
                }
                tr.push_back(path[i + 1] + cur);
            }
            // closure: the frame must return to itself
            P3 back = rotate_to(dir[n - 1], dir[0], cur);
            if (!(back == o)) throw std::logic_error("diagonal_tracks: frame monodromy is nontrivial");
            if (!(dir[n - 1] == dir[0]) && !(back == cur)) {
                P3 mid;
                for (int a = 0; a < 3; a++) mid[a] = cur[a] != 0 ? cur[a] : back[a];
                if (mid - cur == dir[n - 1]) {
                    tr.push_back(path[0] + mid);
                    tr.push_back(path[0] + back);
                } else {
                    // a cut corner at the seam also swallows the start point
                    tr.pop_back();
                    tr.push_back(path[0] + mid);
                    tr.erase(tr.begin());
                }
            }
            if (!(tr.back() == tr.front())) tr.push_back(tr.front());
            tracks.push_back(expand_unit(tr));
        }
    return tracks;
}

struct Run {
    P3 p, q;
};

std::vector<Run> runs_of(const std::vector<P3>& pts) {
    std::vector<Run> out;
    size_t i = 0;
    while (i + 1 < pts.size()) {
        P3 d0 = pts[i + 1] - pts[i];
        size_t j = i + 1;
        while (j + 1 < pts.size()) {
            P3 d = pts[j + 1] - pts[j];
            if (!(d == d0)) break;
            j++;
        }
        out.push_back({pts[i], pts[j]});
        i = j;
    }
    return out;
}

inline bool num_degenerate(long long num, long long d) { return num == 0 || num == d; }

// exact linking number of two disjoint closed lattice polylines
long long linking_number(const std::vector<P3>& A, const std::vector<P3>& B) {
    const long long K = 1024;
    auto px = [&](P3 p) { return (long long)p.x * K + p.z; };
    auto py = [&](P3 p) { return (long long)p.y * K + p.z; };
    long long lk = 0;
    for (const Run& ra : runs_of(A))
        for (const Run& rb : runs_of(B)) {
            long long rx = px(ra.q) - px(ra.p), ry = py(ra.q) - py(ra.p);
            long long sx = px(rb.q) - px(rb.p), sy = py(rb.q) - py(rb.p);
            long long d = rx * sy - ry * sx;
            if (d == 0) continue;
            long long qpx = px(rb.p) - px(ra.p), qpy = py(rb.p) - py(ra.p);
            long long tn = qpx * sy - qpy * sx;  // param on A times d
            long long un = qpx * ry - qpy * rx;  // param on B times d
            auto weakly_between = [&](long long num) {
                if (d > 0) return num >= 0 && num <= d;
                return num <= 0 && num >= d;
            };
            if (!weakly_between(tn) || !weakly_between(un)) continue;
            if (num_degenerate(tn, d) || num_degenerate(un, d))
                throw std::logic_error("linking_number: degenerate crossing");
            // compare heights (z) at the crossing, exactly
            long long zA = (long long)ra.p.z * d + (long long)(ra.q.z - ra.p.z) * tn;
            long long zB = (long long)rb.p.z * d + (long long)(rb.q.z - rb.p.z) * un;
            if (d < 0) {
                zA = -zA;
                zB = -zB;
            }
            if (zA == zB) throw std::logic_error("linking_number: curves touch");
            if (zA > zB) lk += d > 0 ? 1 : -1;
        }
    return lk;
}

}  // namespace

MeridianSystem find_meridians(const SimpleCellComplex& zb, const DrillResult& dr, const PbResult& pb) {
    if (!zb.geometry) throw std::invalid_argument("find_meridians: no geometry");
    const GridGeometry& g = *zb.geometry;
    const int S = kScale;
    const int k = (int)(pb.diagram.size() / 2);
    const int Y = S * (k + 2);

    // boundary pattern lookup: interior chain points of boundary 1-cells
    std::map<P3, std::pair<int, int>> pattern_at;
    for (int e = 0; e < (int)zb.edges.size(); e++) {
        if (!zb.edge_boundary[e]) continue;
        const auto& segs = g.edge_segs[e];
        // chain points from v0 to v1
        std::vector<P3> chain{g.vertex_point[zb.edges[e].v0]};
        for (const Seg& s : segs) {
            P3 a = s.p, b = s.p + unit(s.axis);
            P3 cur = chain.back();
            chain.push_back(cur == a ? b : a);
        }
        for (int i = 1; i + 1 < (int)chain.size(); i++) pattern_at[chain[i]] = {e, i};
    }

    auto curve_events = [&](const std::vector<P3>& pts, TorusCurve& out) {
        out.points = pts;
        for (int i = 0; i < (int)pts.size() - 1; i++) {
            P3 p = pts[i];
            if (g.vertex_of_point.count(p))
                throw std::logic_error("find_meridians: curve passes an intrinsic vertex");
            auto it = pattern_at.find(p);
            if (it == pattern_at.end()) continue;
            P3 prev = pts[i == 0 ? pts.size() - 2 : i - 1];
            P3 next = pts[i + 1];
            auto axis_of = [&](P3 a, P3 b) {
                P3 d = b - a;
                return d.x != 0 ? 0 : (d.y != 0 ? 1 : 2);
            };
            int ca1 = axis_of(prev, p), ca2 = axis_of(p, next);
            // pattern direction at the crossing point
            int e = it->second.first, pos = it->second.second;
            const auto& segs = g.edge_segs[e];
            int pa1 = segs[pos - 1].axis, pa2 = segs[pos].axis;
            if (ca1 == pa1 || ca1 == pa2 || ca2 == pa1 || ca2 == pa2)
                throw std::logic_error("find_meridians: curve runs along the pattern");
            out.crossings.push_back({i, e, pos});
        }
    };

    // the four candidate parallels
    std::vector<std::vector<P3>> tracks = diagonal_tracks(pb.k1_path);
    std::vector<TorusCurve> cand(4);
    for (int t = 0; t < 4; t++) curve_events(tracks[t], cand[t]);
    // framing check: 0-framed parallels are meridians of the complement torus
    for (int t = 0; t < 4; t++) {
        long long lk = linking_number(tracks[t], pb.k1_path);
        if (lk != 0)
            throw std::logic_error("find_meridians: parallel has framing " + std::to_string(lk));
    }
    // drop the candidate with the most pattern crossings
    int drop = 0;
    for (int t = 1; t < 4; t++)
        if (cand[t].crossings.size() > cand[drop].crossings.size()) drop = t;
    MeridianSystem out;
    for (int t = 0; t < 4; t++)
        if (t != drop) out.meridians.push_back(cand[t]);
    for (auto& m : out.meridians) out.meridian_crossings += (long long)m.crossings.size();

    // three section rings on the straight lane runs near the caps
    int c = Y - 3;
    for (int lane = 1; lane <= 3; lane++) {
        int L = S * lane;
        std::vector<P3> ring{{L + 1, c, -1}, {L + 1, c, 1}, {L - 1, c, 1}, {L - 1, c, -1}, {L + 1, c, -1}};
        TorusCurve rc;
        curve_events(expand_unit(ring), rc);
        if (rc.crossings.size() != 3)
            throw std::logic_error("find_meridians: section ring crosses " + std::to_string(rc.crossings.size()) +
                                   " sheets");
        out.longitudes.push_back(rc);
        out.longitude_crossings += (long long)rc.crossings.size();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gluing two copies of Z'_b across the torus: the decomposition C' and its
// dual triangulation T_m

namespace {

struct CurveRef {
    int family;  // 0 = track (parallel), 1 = ring (section)
    int idx;
};

struct CrossEvent {  // a crossing of a track and a ring, seen from both
    P3 q;
    int track, ring;
    int track_point, ring_point;  // polyline indices
};

// geometric germ fan at a torus surface point, as a cyclic order of lattice
// directions; orientation is fixed by outward normals (away from the tube)
struct FanOracle {
    const GridGeometry* g;

    bool is_surface_facet(const Facet& f) const { return g->input.boundary.count(f) > 0; }
    // outward normal sign: the adjacent cube away from the excluded solid
    int outward_sign(const Facet& f) const {
        P3 above = f.p;
        P3 below = f.p;
        below[f.axis] -= 1;
        bool above_out = !g->input.excluded.count(above);
        bool below_out = !g->input.excluded.count(below);
        if (above_out == below_out) throw std::logic_error("fan: facet without a drilled side");
        return above_out ? +1 : -1;
    }

    // cyclic (consistently oriented) order of the given germ directions at p
    std::vector<int> order(P3 p, const std::vector<P3>& dirs) const {
        // quadrants at p
        struct Quad {
            P3 d1, d2;  // ccw: d1 -> d2
        };
        std::vector<Quad> quads;
        for (int axis = 0; axis < 3; axis++) {
            int l1 = (axis + 1) % 3, l2 = (axis + 2) % 3;
            for (int o1 : {0, -1})
                for (int o2 : {0, -1}) {
                    Facet f;
                    f.axis = axis;
                    f.p = p;
                    f.p[l1] += o1;
                    f.p[l2] += o2;
                    if (!is_surface_facet(f)) continue;
                    P3 d1, d2;
                    d1[l1] = o1 == 0 ? 1 : -1;
                    d2[l2] = o2 == 0 ? 1 : -1;
                    // ccw iff (d1 x d2) . nu > 0
                    P3 cr;
                    cr.x = d1.y * d2.z - d1.z * d2.y;
                    cr.y = d1.z * d2.x - d1.x * d2.z;
                    cr.z = d1.x * d2.y - d1.y * d2.x;
                    int nu = outward_sign(f);
                    long long dotn = (long long)cr[f.axis] * nu;
                    if (dotn > 0)
                        quads.push_back({d1, d2});
                    else
                        quads.push_back({d2, d1});
                }
        }
        if (quads.empty()) throw std::logic_error("fan: not a surface point");
        // walk the fan
        std::vector<P3> cyc;
        P3 start = quads[0].d1;
        P3 cur = start;
        size_t guard = 0;
        do {
            if (++guard > 64) throw std::logic_error("fan: walk does not close");
            cyc.push_back(cur);
            bool found = false;
            for (const Quad& q : quads)
                if (q.d1 == cur) {
                    cur = q.d2;
                    found = true;
                    break;
                }
            if (!found) throw std::logic_error("fan: open fan at a surface point");
        } while (!(cur == start));
        if (cyc.size() != quads.size()) throw std::logic_error("fan: disconnected fan");
        std::vector<int> out;
        for (const P3& d : cyc) {
            for (int i = 0; i < (int)dirs.size(); i++)
                if (dirs[i] == d) out.push_back(i);
        }
        if (out.size() != dirs.size()) throw std::logic_error("fan: germ direction missing from fan");
        return out;
    }
};

// node of the per-cell planar graph
struct LNode {
    int vertex;                // final complex vertex id
    std::vector<int> arcs;     // incident arc ids, in ccw rotation order
};

struct LArc {
    int a, b;       // node indexes
    int edge;       // final complex edge id
    int curve;      // -1 for circuit arcs, else curve ref packed (family*8+idx)
};

// face-walk fragments of one boundary cell
struct CellFragments {
    std::vector<std::vector<int>> frag_arcs;   // arc ids per fragment
    std::vector<CellFace> circuits;            // final-complex circuits
};

}  // namespace

FamilyResult assemble_family(int m, bool emit_stages) {
    FamilyResult out;
    out.stats.m = m;
    BraidWord b = standard_braid(m);
    const int k = b.crossing_count();
    out.stats.k = k;

    PbResult pb = build_Pb(b);
    out.stats.pb_vertices = pb.complex.n_vertices;
    out.stats.writhe = pb.writhe;
    out.stats.vertices_on_k1 = pb.vertices_on_k1;

    DrillResult dr = drill_K1(pb);
    out.stats.zb_vertices = dr.exterior.n_vertices;
    out.stats.k2_edges_zb = (long long)dr.k2.edges.size();

    MeridianSystem ms = find_meridians(dr.exterior, dr, pb);
    out.stats.meridian_crossings = ms.meridian_crossings;

    BlisterResult bl = subdivide_boundary_cells(dr.exterior, dr.k2);
    out.stats.zpb_vertices = bl.complex.n_vertices;
    out.stats.k2_edges_zpb = bl.k2_edges;

    const SimpleCellComplex& Z = bl.complex;   // boundary ids match dr.exterior
    const GridGeometry& geo = *dr.exterior.geometry;
    FanOracle fan{&geo};

    // ---- curve bookkeeping ----------------------------------------------
    const int NT = 3, NR = 3;
    std::vector<TorusCurve>* fams[2] = {&ms.meridians, &ms.longitudes};
    // track x ring crossings
    std::vector<CrossEvent> crossings;
    {
        std::map<P3, std::pair<int, int>> track_pt;
        for (int t = 0; t < NT; t++) {
            auto& pts = ms.meridians[t].points;
            for (int i = 0; i + 1 < (int)pts.size(); i++) track_pt[pts[i]] = {t, i};
        }
        for (int r = 0; r < NR; r++) {
            auto& pts = ms.longitudes[r].points;
            for (int i = 0; i + 1 < (int)pts.size(); i++) {
                auto it = track_pt.find(pts[i]);
                if (it == track_pt.end()) continue;
                crossings.push_back({pts[i], it->second.first, r, it->second.second, i});
            }
        }
        if ((int)crossings.size() != NT * NR)
            throw std::logic_error("assemble_family: expected nine meridian-longitude crossings");
    }
    auto dir_at = [&](const std::vector<P3>& pts, int i, bool incoming) {
        int n = (int)pts.size() - 1;
        P3 d = incoming ? pts[i] - pts[(i + n - 1) % n] : pts[(i + 1) % n] - pts[i];
        return d;
    };

    // per-curve ordered events: merge pattern crossings and curve crossings
    struct Ev {
        int point;
        int kind;   // 0 pattern, 1 curve-curve
        int edge, pos;
        int other;  // the other curve index
        int xid;    // crossing id for kind 1
    };
    std::vector<std::vector<Ev>> events[2];
    events[0].resize(NT);
    events[1].resize(NR);
    for (int fam = 0; fam < 2; fam++)
        for (int ci = 0; ci < 3; ci++)
            for (auto& cr : (*fams[fam])[ci].crossings)
                events[fam][ci].push_back({cr.at_point, 0, cr.edge, cr.pos, -1, -1});
    for (int x = 0; x < (int)crossings.size(); x++) {
        events[0][crossings[x].track].push_back({crossings[x].track_point, 1, -1, -1, crossings[x].ring, x});
        events[1][crossings[x].ring].push_back({crossings[x].ring_point, 1, -1, -1, crossings[x].track, x});
    }
    for (int fam = 0; fam < 2; fam++)
        for (int ci = 0; ci < 3; ci++) {
            auto& ev = events[fam][ci];
            std::sort(ev.begin(), ev.end(), [](const Ev& a, const Ev& b) { return a.point < b.point; });
            for (size_t i = 0; i + 1 < ev.size(); i++)
                if (ev[i].point == ev[i + 1].point)
                    throw std::logic_error("assemble_family: coincident curve events");
            if (ev.empty()) throw std::logic_error("assemble_family: eventless curve");
        }

    // ---- the final complex builder --------------------------------------
    SimpleCellComplex C;
    auto add_edge = [&](int a, int b) {
        C.edges.push_back({a, b});
        return (int)C.edges.size() - 1;
    };

    // interior copies of Z'_b
    int n_old_v = Z.n_vertices;
    std::vector<int> vmap[2], emap[2], fmap[2];
    std::vector<int> cmap[2];
    std::vector<char> is_torus_vertex(n_old_v, 0), is_torus_edge(Z.edges.size(), 0), is_torus_face(Z.faces.size(), 0);
    for (int v = 0; v < n_old_v; v++) is_torus_vertex[v] = v < (int)Z.vertex_boundary.size() && Z.vertex_boundary[v];
    for (size_t e = 0; e < Z.edges.size(); e++) is_torus_edge[e] = Z.edge_boundary[e];
    for (size_t f = 0; f < Z.faces.size(); f++) is_torus_face[f] = Z.face_boundary[f];

    for (int s = 0; s < 2; s++) {
        vmap[s].assign(n_old_v, -1);
        emap[s].assign(Z.edges.size(), -1);
        fmap[s].assign(Z.faces.size(), -1);
        cmap[s].assign(Z.cells.size(), -1);
        for (int v = 0; v < n_old_v; v++) {
            C.n_vertices++;
            vmap[s][v] = C.n_vertices - 1;
        }
        for (size_t e = 0; e < Z.edges.size(); e++) {
            if (is_torus_edge[e]) continue;
            emap[s][e] = add_edge(vmap[s][Z.edges[e].v0], vmap[s][Z.edges[e].v1]);
        }
    }

    // pattern-edge refinement: crossing vertices + sub-edge chains, per side
    // crossing vertex of (side, fam, curve, event-id)
    std::map<std::array<int, 4>, int> xvert;
    // per side, per torus edge: the chain (verts incl ends, edges)
    struct Chain {
        std::vector<int> verts, edges;
    };
    std::map<std::pair<int, int>, Chain> pattern_chain;
    {
        // collect events per pattern edge
        std::map<int, std::vector<std::array<int, 4>>> by_edge;  // edge -> (pos, fam, ci, evidx)
        for (int fam = 0; fam < 2; fam++)
            for (int ci = 0; ci < 3; ci++)
                for (int ei = 0; ei < (int)events[fam][ci].size(); ei++) {
                    const Ev& ev = events[fam][ci][ei];
                    if (ev.kind == 0) by_edge[ev.edge].push_back({ev.pos, fam, ci, ei});
                }
        for (auto& [e, list] : by_edge) std::sort(list.begin(), list.end());
        for (int s = 0; s < 2; s++) {
            for (size_t e = 0; e < Z.edges.size(); e++) {
                if (!is_torus_edge[e]) continue;
                Chain ch;
                ch.verts.push_back(vmap[s][Z.edges[e].v0]);
                auto it = by_edge.find((int)e);
                if (it != by_edge.end())
                    for (auto& [pos, fam, ci, ei] : it->second) {
                        C.n_vertices++;
                        int xv = C.n_vertices - 1;
                        xvert[{s, fam, ci, ei}] = xv;
                        ch.verts.push_back(xv);
                    }
                ch.verts.push_back(vmap[s][Z.edges[e].v1]);
                for (size_t i = 0; i + 1 < ch.verts.size(); i++)
                    ch.edges.push_back(add_edge(ch.verts[i], ch.verts[i + 1]));
                pattern_chain[{s, (int)e}] = ch;
            }
        }
    }

    // attach pairs: on side 0 they sit on the track, on side 1 on the ring.
    // apv[{side, wall index i, other index c, sigma}] with sigma 0 = before.
    std::map<std::array<int, 4>, int> apv;
    for (int s = 0; s < 2; s++)
        for (const CrossEvent& cr : crossings) {
            int i = s == 0 ? cr.track : cr.ring;
            int c = s == 0 ? cr.ring : cr.track;
            for (int sigma : {0, 1}) {
                C.n_vertices++;
                apv[{s, i, c, sigma}] = C.n_vertices - 1;
            }
        }

    // curve refinement per side: the intact family gets a cyclic vertex
    // sequence with attach pairs; the cut family becomes arcs.
    // For every curve sub-edge we remember its final edge id and the flanking
    // fragment slots are filled later.
    struct CurvePiece {
        int edge;
        int va, vb;  // final vertex ids, in traversal order
    };
    // intact curve: pieces in cyclic order; cut curve: arcs of pieces
    std::vector<std::vector<CurvePiece>> intact_pieces(2 * 3);
    //   arcs[side][cut-curve]: each arc = (start crossing id, end crossing id, pieces)
    struct CutArc {
        int x_from, x_to;
        std::vector<CurvePiece> pieces;
    };
    std::vector<std::vector<CutArc>> cut_arcs(2 * 3);

    for (int s = 0; s < 2; s++) {
        int fam_intact = s == 0 ? 0 : 1;
        int fam_cut = 1 - fam_intact;
        for (int ci = 0; ci < 3; ci++) {
            // intact: vertex sequence
            std::vector<int> seq;
            for (int ei = 0; ei < (int)events[fam_intact][ci].size(); ei++) {
                const Ev& ev = events[fam_intact][ci][ei];
                if (ev.kind == 0) {
                    seq.push_back(xvert.at({s, fam_intact, ci, ei}));
                } else {
                    seq.push_back(apv.at({s, ci, ev.other, 0}));
                    seq.push_back(apv.at({s, ci, ev.other, 1}));
                }
            }
            auto& pieces = intact_pieces[s * 3 + ci];
            for (size_t i = 0; i < seq.size(); i++) {
                int a = seq[i], bb = seq[(i + 1) % seq.size()];
                pieces.push_back({add_edge(a, bb), a, bb});
            }
        }
        for (int ci = 0; ci < 3; ci++) {
            // cut: arcs between consecutive curve-curve events
            auto& ev = events[fam_cut][ci];
            std::vector<int> xpos;
            for (int ei = 0; ei < (int)ev.size(); ei++)
                if (ev[ei].kind == 1) xpos.push_back(ei);
            if (xpos.size() != 3) throw std::logic_error("assemble_family: cut curve without three crossings");
            auto& arcs = cut_arcs[s * 3 + ci];
            for (size_t a = 0; a < xpos.size(); a++) {
                int e_from = xpos[a];
                int e_to = xpos[(a + 1) % xpos.size()];
                CutArc arc;
                arc.x_from = ev[e_from].xid;
                arc.x_to = ev[e_to].xid;
                // vertex sequence: p+ at from-crossing, pattern verts, p- at to
                std::vector<int> seq;
                seq.push_back(apv.at({s, ev[e_from].other, ci, 1}));
                for (int ei = (e_from + 1) % (int)ev.size(); ei != e_to; ei = (ei + 1) % (int)ev.size()) {
                    if (ev[ei].kind != 0) throw std::logic_error("assemble_family: nested crossings");
                    seq.push_back(xvert.at({s, fam_cut, ci, ei}));
                }
                seq.push_back(apv.at({s, ev[e_to].other, ci, 0}));
                for (size_t i = 0; i + 1 < seq.size(); i++)
                    arc.pieces.push_back({add_edge(seq[i], seq[i + 1]), seq[i], seq[(i + 1)]});
                arcs.push_back(std::move(arc));
            }
        }
    }

    // ---- fragments of the boundary cells, per side -----------------------
    // cells of each torus edge
    std::map<int, std::array<int, 2>> bcells;
    {
        std::vector<std::vector<int>> at(Z.edges.size());
        for (int f = 0; f < (int)Z.faces.size(); f++) {
            if (!is_torus_face[f]) continue;
            for (int e : Z.faces[f].edges) at[e].push_back(f);
        }
        for (size_t e = 0; e < Z.edges.size(); e++)
            if (is_torus_edge[e]) {
                if (at[e].size() != 2) throw std::logic_error("assemble_family: torus edge without two cells");
                bcells[(int)e] = {at[e][0], at[e][1]};
            }
    }
    // which cell each curve piece runs through: walk the curve events
    // curve_cells[fam][ci] = cell after each event index
    std::vector<std::vector<int>> curve_cells[2];
    for (int fam = 0; fam < 2; fam++) {
        curve_cells[fam].resize(3);
        for (int ci = 0; ci < 3; ci++) {
            const auto& pts = (*fams[fam])[ci].points;
            const auto& ev = events[fam][ci];
            // initial cell: from the facet beside the first segment
            P3 p = pts[0], q = pts[1];
            Seg s0{0, p};
            P3 d = q - p;
            s0.axis = d.x != 0 ? 0 : (d.y != 0 ? 1 : 2);
            if (d[s0.axis] < 0) s0.p[s0.axis] -= 1;
            Membershipless:;
            int cell0 = -1;
            {
                // the two flanking surface facets of the segment
                for (int n = 0; n < 3; n++) {
                    if (n == s0.axis) continue;
                    int l = 3 - n - s0.axis;
                    for (int off : {0, -1}) {
                        Facet f;
                        f.axis = n;
                        f.p = s0.p;
                        f.p[l] += off;
                        auto it = geo.face_of_facet.find(f);
                        if (it == geo.face_of_facet.end()) continue;
                        if (!is_torus_face[it->second]) continue;
                        if (cell0 >= 0 && cell0 != it->second)
                            throw std::logic_error("assemble_family: curve seed between two cells");
                        cell0 = it->second;
                    }
                }
            }
            if (cell0 < 0) throw std::logic_error("assemble_family: curve seed cell not found");
            // cell0 is the cell at point index 0; walk backwards to event order:
            // cells[i] = cell after event i
            std::vector<int> cells(ev.size());
            int cur = cell0;
            // events are sorted by point; point 0 lies after the last event
            for (size_t i = 0; i < ev.size(); i++) {
                // advance over event i
                if (ev[i].kind == 0) {
                    auto [c1, c2] = bcells.at(ev[i].edge);
                    if (cur != c1 && cur != c2)
                        throw std::logic_error("assemble_family: curve cell walk inconsistent");
                    cur = cur == c1 ? c2 : c1;
                }
                cells[i] = cur;
            }
            if (cur != cell0) throw std::logic_error("assemble_family: curve cell walk does not close");
            curve_cells[fam][ci] = std::move(cells);
        }
    }

    // ---------------------------------------------------------------------
    // per (side, boundary cell): local planar graph and face walk
    // fragments recorded with flanking info for curve pieces
    struct FragRef {
        int face = -1;  // final complex face id
        int region_row = -1, region_col = -1;
    };
    std::vector<std::vector<FragRef>> fragments(2);  // per side: all fragments
    // flank[{side, edge id}] = the one or two fragments using that curve edge
    std::map<std::pair<int, int>, std::vector<int>> curve_flank;  // values: fragment index per side list
    // fragments of each (side, cell)
    std::map<std::pair<int, int>, std::vector<int>> frags_of_cell;
    // fragment of each (side, torus face) replacing it: the list
    // region labels are computed after the walk.

    // node registry per (side, cell): vertex -> node id; arcs with rotations
    for (int s = 0; s < 2; s++) {
        int fam_intact = s == 0 ? 0 : 1;
        for (int f = 0; f < (int)Z.faces.size(); f++) {
            if (!is_torus_face[f]) continue;
            // --- gather nodes
            std::map<int, int> node_of_vertex;
            std::vector<LNode> nodes;
            std::vector<LArc> arcs;
            std::map<int, std::vector<std::pair<P3, int>>> germs;  // node -> (direction, arc id) for rotation
            auto get_node = [&](int vertex) {
                auto it = node_of_vertex.find(vertex);
                if (it != node_of_vertex.end()) return it->second;
                nodes.push_back({vertex, {}});
                node_of_vertex[vertex] = (int)nodes.size() - 1;
                return (int)nodes.size() - 1;
            };
            auto add_arc = [&](int na, int nb, int edge, int curve) {
                arcs.push_back({na, nb, edge, curve});
                return (int)arcs.size() - 1;
            };
            // circuit arcs: the refined circuit of f
            const CellFace& face = Z.faces[f];
            int r = (int)face.edges.size();
            std::vector<std::pair<int, int>> circuit_arcs;  // (arc id, direction)
            for (int i = 0; i < r; i++) {
                int e = face.edges[i];
                const Chain& ch = pattern_chain.at({s, e});
                bool fwd = vmap[s][face.verts[i]] == ch.verts.front();
                int L = (int)ch.edges.size();
                for (int t = 0; t < L; t++) {
                    int ia = fwd ? t : L - t;
                    int ib = fwd ? t + 1 : L - t - 1;
                    int na = get_node(ch.verts[ia]);
                    int nb = get_node(ch.verts[ib]);
                    int aid = add_arc(na, nb, ch.edges[fwd ? t : L - 1 - t], -1);
                    circuit_arcs.push_back({aid, 0});
                }
            }
            // curve arcs inside this cell
            auto add_piece = [&](const CurvePiece& pc, int fam, int ci) {
                int na = get_node(pc.va), nb = get_node(pc.vb);
                add_arc(na, nb, pc.edge, fam * 8 + ci);
            };
            for (int fam = 0; fam < 2; fam++)
                for (int ci = 0; ci < 3; ci++) {
                    const auto& ev = events[fam][ci];
                    const auto& cells = curve_cells[fam][ci];
                    bool intact = fam == fam_intact;
                    // the pieces between event i and i+1 live in cells[i]
                    // intact pieces are indexed differently: rebuild mapping
                    if (intact) {
                        // pieces list: one piece after each seq vertex; seq was
                        // built from events with pairs for crossings: map piece
                        // index -> following-event gap
                        // Recompute: iterate events, track piece cursor.
                        const auto& pieces = intact_pieces[s * 3 + ci];
                        size_t cursor = 0;
                        for (size_t i = 0; i < ev.size(); i++) {
                            int ncur = ev[i].kind == 0 ? 1 : 2;
                            // after this event's vertices comes one piece into cells[i]
                            cursor += ncur;
                            const CurvePiece& pc = pieces[cursor - 1];
                            if (cells[i] == f) add_piece(pc, fam, ci);
                            // pieces between pair vertices live in the same cell
                            if (ncur == 2) {
                                const CurvePiece& mid = pieces[cursor - 2];
                                if (cells[i] == f || cells[(i + ev.size() - 1) % ev.size()] == f) {
                                    // the tiny piece between p- and p+ straddles the
                                    // crossing point, inside the crossing's cell
                                    if (cells[i] == f) add_piece(mid, fam, ci);
                                }
                            }
                        }
                    } else {
                        const auto& arcs_c = cut_arcs[s * 3 + ci];
                        // walk events again to assign pieces to cells
                        std::vector<int> xpos;
                        for (int eidx = 0; eidx < (int)ev.size(); eidx++)
                            if (ev[eidx].kind == 1) xpos.push_back(eidx);
                        for (size_t a = 0; a < arcs_c.size(); a++) {
                            int e_from = xpos[a];
                            size_t pc_i = 0;
                            int eidx = e_from;
                            for (const CurvePiece& pc : arcs_c[a].pieces) {
                                if (cells[eidx] == f) add_piece(pc, fam, ci);
                                eidx = (eidx + 1) % (int)ev.size();
                                pc_i++;
                            }
                        }
                    }
                }

            // --- rotations
            // vertex geometric positions for fan queries
            // torus vertices: geo points; crossing vertices: curve points;
            // attach vertices: synthesized from crossing fans
            std::map<int, std::vector<int>> rotation;  // node -> arc ids ccw
            {
                // incident arcs per node with germ descriptors
                struct G {
                    int arc;
                    P3 dir;
                    bool synthetic = false;
                    int rank = 0;  // for synthetic ordering
                };
                std::map<int, std::vector<G>> inc;
                auto dir_of_edge_at = [&](int final_edge, int final_vertex) -> P3 {
                    // derived later per arc kind; placeholder unused
                    (void)final_edge;
                    (void)final_vertex;
                    return {};
                };
                (void)dir_of_edge_at;
                // build germ directions arc by arc
                // helper tables first
                // final vertex -> lattice point when geometric
                // (filled lazily below)
                std::map<int, P3> vpoint;
                for (int v = 0; v < n_old_v; v++)
                    if (is_torus_vertex[v]) vpoint[vmap[s][v]] = geo.vertex_point[v];
                for (int fam = 0; fam < 2; fam++)
                    for (int ci = 0; ci < 3; ci++) {
                        const auto& ev = events[fam][ci];
                        const auto& pts = (*fams[fam])[ci].points;
                        for (int eidx = 0; eidx < (int)ev.size(); eidx++)
                            if (ev[eidx].kind == 0) {
                                auto it = xvert.find({s, fam, ci, eidx});
                                if (it != xvert.end()) vpoint[it->second] = pts[ev[eidx].point];
                            }
                    }
                // pattern chain interior points: positions along the torus edge
                std::map<int, std::pair<int, int>> chainpos;  // final vertex -> (torus edge, pos)
                // (crossing verts already have lattice points; ends are torus verts)
                (void)chainpos;

                auto germ_dir_pattern = [&](int torus_edge, int pos, bool toward_next) -> P3 {
                    const auto& segs = geo.edge_segs[torus_edge];
                    // chain point `pos` lies between segs[pos-1] and segs[pos]
                    // direction toward next chain point or previous
                    std::vector<P3> chain{geo.vertex_point[Z.edges[torus_edge].v0]};
                    for (const Seg& sg : segs) {
                        P3 a = sg.p, bb = sg.p + unit(sg.axis);
                        chain.push_back(chain.back() == a ? bb : a);
                    }
                    P3 cur = chain[pos];
                    P3 nxt = toward_next ? chain[pos + 1] : chain[pos - 1];
                    return nxt - cur;
                };
                (void)germ_dir_pattern;

                // Simplification: rotations are only nontrivial at crossing
                // vertices (4 germs) and attach vertices (3 germs). All other
                // nodes have degree 2 and any order works.
                for (int a = 0; a < (int)arcs.size(); a++) {
                    inc[arcs[a].a].push_back({a, {}, false, 0});
                    inc[arcs[a].b].push_back({a, {}, false, 0});
                }
                for (auto& [n, gs] : inc) {
                    if (gs.size() <= 2) {
                        for (auto& g : gs) rotation[n].push_back(g.arc);
                        continue;
                    }
                    // geometric germs required
                    int vert = nodes[n].vertex;
                    // which situation?
                    // crossing vertex: lattice point known
                    auto vp = vpoint.find(vert);
                    if (vp != vpoint.end()) {
                        P3 p = vp->second;
                        std::vector<P3> dirs;
                        std::vector<int> arcids;
                        for (auto& g : gs) {
                            const LArc& A = arcs[g.arc];
                            int other = A.a == n ? A.b : A.a;
                            P3 d = germ_direction(s, f, A, n, other, p, nodes, Z, geo, fams, events, crossings,
                                                  vmap, xvert, apv, fam_intact);
                            dirs.push_back(d);
                            arcids.push_back(g.arc);
                        }
                        std::vector<int> ord = fan.order(p, dirs);
                        for (int i : ord) rotation[n].push_back(arcids[i]);
                    } else {
                        // attach vertex: synthesized rotation
                        rotation[n] = attach_rotation(s, n, nodes, arcs, crossings, apv, fams, fan);
                    }
                }
            }

            // --- face walk
            // directed arcs: 2*i (a->b), 2*i+1 (b->a)
            auto head = [&](int h) { return h % 2 == 0 ? arcs[h / 2].b : arcs[h / 2].a; };
            auto tail = [&](int h) { return h % 2 == 0 ? arcs[h / 2].a : arcs[h / 2].b; };
            std::vector<int> nxt(2 * arcs.size(), -1);
            for (auto& [n, rot] : rotation) {
                int deg = (int)rot.size();
                for (int i = 0; i < deg; i++) {
                    int a_in = rot[i];
                    int a_out = rot[(i + 1) % deg];
                    // arriving along a_in at n, leave along a_out
                    int h_in = -1, h_out = -1;
                    h_in = (head(2 * a_in) == n) ? 2 * a_in : 2 * a_in + 1;
                    h_out = (tail(2 * a_out) == n) ? 2 * a_out : 2 * a_out + 1;
                    nxt[h_in] = h_out;
                }
            }
            // special: degree-1 nodes cannot occur
            std::vector<char> used(2 * arcs.size(), 0);
            std::vector<std::vector<int>> orbits;
            for (int h = 0; h < (int)nxt.size(); h++) {
                if (used[h]) continue;
                std::vector<int> orb;
                int cur = h;
                size_t guard = 0;
                while (!used[cur]) {
                    used[cur] = 1;
                    orb.push_back(cur);
                    cur = nxt[cur];
                    if (cur < 0) throw std::logic_error("assemble_family: face walk fell off");
                    if (++guard > 4 * arcs.size()) throw std::logic_error("assemble_family: face walk loop");
                }
                orbits.push_back(std::move(orb));
            }
            // identify and drop the outer orbit
            long long n_circuit = (long long)circuit_arcs.size();
            std::vector<int> pure;  // orbit indexes made of circuit arcs only and covering them
            for (int i = 0; i < (int)orbits.size(); i++) {
                bool all_circ = true;
                for (int h : orbits[i])
                    if (arcs[h / 2].curve != -1) all_circ = false;
                std::set<int> used_arcs;
                for (int h : orbits[i])
                    if (arcs[h / 2].curve == -1) used_arcs.insert(h / 2);
                long long n_c = 0;
                for (int h : orbits[i]) n_c += arcs[h / 2].curve == -1 ? 1 : 0;
                if (all_circ && n_c == n_circuit) pure.push_back(i);
            }
            int outer = -1;
            if (pure.size() == 1)
                outer = pure[0];
            else if (pure.size() == 2 && orbits.size() == 2)
                outer = pure[0];  // chordless cell: either orbit is the fragment
            else if (!pure.empty())
                throw std::logic_error("assemble_family: ambiguous outer face");
            if (outer < 0) throw std::logic_error("assemble_family: no outer face found");

            for (int i = 0; i < (int)orbits.size(); i++) {
                if (i == outer) continue;
                CellFace cf;
                for (int h : orbits[i]) {
                    cf.verts.push_back(nodes[tail(h)].vertex);
                    cf.edges.push_back(arcs[h / 2].edge);
                }
                int fid = (int)C.faces.size();
                C.faces.push_back(cf);
                FragRef fr;
                fr.face = fid;
                fragments[s].push_back(fr);
                int frag_index = (int)fragments[s].size() - 1;
                frags_of_cell[{s, f}].push_back(frag_index);
                for (int h : orbits[i])
                    if (arcs[h / 2].curve != -1) curve_flank[{s, arcs[h / 2].edge}].push_back(frag_index);
            }
        }
    }
