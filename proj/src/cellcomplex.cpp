#include "tri3/cellcomplex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "tri3/canonical.hpp"

namespace tri3 {

bool SimpleCellComplex::has_boundary() const {
    for (char b : face_boundary)
        if (b) return true;
    return false;
}

void SimpleCellComplex::init_flags() {
    vertex_boundary.assign(n_vertices, 0);
    edge_boundary.assign(edges.size(), 0);
    face_boundary.assign(faces.size(), 0);
}

long long SimpleCellComplex::flag_count() const {
    std::set<std::array<int, 4>> flags;
    for (int X = 0; X < (int)cells.size(); X++)
        for (int f : cells[X].faces) {
            const CellFace& face = faces[f];
            int r = (int)face.edges.size();
            for (int i = 0; i < r; i++) {
                int e = face.edges[i];
                flags.insert({face.verts[i], e, f, X});
                flags.insert({face.verts[(i + 1) % r], e, f, X});
            }
        }
    return (long long)flags.size();
}

std::string CellValidationReport::summary() const {
    if (issues.empty()) return "ok";
    std::string s;
    for (size_t i = 0; i < issues.size() && i < 8; i++) s += (i ? "; " : "") + issues[i].what;
    if (issues.size() > 8) s += "; ...";
    return s;
}

namespace {

using Germ = std::pair<int, int>;  // (edge, end)

struct VertexLocal {
    std::vector<Germ> germs;
    // corners as unordered germ-index pairs, one per 2-cell corner occurrence
    std::vector<std::array<int, 2>> corners;
    std::vector<int> corner_faces;
};

int germ_index(const std::vector<Germ>& germs, Germ g) {
    for (int i = 0; i < (int)germs.size(); i++)
        if (germs[i] == g) return i;
    return -1;
}

std::vector<VertexLocal> vertex_locals(const SimpleCellComplex& c, CellValidationReport* rep) {
    std::vector<VertexLocal> out(c.n_vertices);
    for (int e = 0; e < (int)c.edges.size(); e++) {
        out[c.edges[e].v0].germs.push_back({e, 0});
        out[c.edges[e].v1].germs.push_back({e, 1});
    }
    for (int f = 0; f < (int)c.faces.size(); f++) {
        const CellFace& face = c.faces[f];
        int r = (int)face.edges.size();
        for (int i = 0; i < r; i++) {
            int v = face.verts[i];
            int e_prev = face.edges[(i + r - 1) % r];
            int e_next = face.edges[i];
            // pick the germ ends pointing at v
            auto end_at = [&](int e) {
                if (c.edges[e].v0 == v && c.edges[e].v1 == v) return -1;  // loop, reported elsewhere
                if (c.edges[e].v0 == v) return 0;
                if (c.edges[e].v1 == v) return 1;
                return -2;
            };
            int a = end_at(e_prev), b = end_at(e_next);
            if (a < 0 || b < 0) {
                if (rep) rep->issues.push_back({"face " + std::to_string(f) + " circuit does not match edge endpoints at vertex " + std::to_string(v)});
                continue;
            }
            int gi = germ_index(out[v].germs, {e_prev, a});
            int gj = germ_index(out[v].germs, {e_next, b});
            out[v].corners.push_back({std::min(gi, gj), std::max(gi, gj)});
            out[v].corner_faces.push_back(f);
        }
    }
    return out;
}

}  // namespace

CellValidationReport validate_simple(const SimpleCellComplex& c) {
    CellValidationReport rep;
    auto issue = [&](const std::string& s) { rep.issues.push_back({s}); };

    if ((int)c.vertex_boundary.size() != c.n_vertices || c.edge_boundary.size() != c.edges.size() ||
        c.face_boundary.size() != c.faces.size()) {
        issue("boundary flag vectors not sized");
        return rep;
    }
    for (int e = 0; e < (int)c.edges.size(); e++) {
        if (c.edges[e].v0 < 0 || c.edges[e].v0 >= c.n_vertices || c.edges[e].v1 < 0 || c.edges[e].v1 >= c.n_vertices)
            issue("edge " + std::to_string(e) + " endpoint out of range");
        else if (c.edges[e].v0 == c.edges[e].v1)
            issue("edge " + std::to_string(e) + " is a loop");
    }
    if (!rep.ok()) return rep;

    std::vector<int> edge_corner_count(c.edges.size(), 0);
    std::vector<int> edge_boundary_corners(c.edges.size(), 0);
    std::vector<int> face_slots(c.faces.size(), 0);

    for (int f = 0; f < (int)c.faces.size(); f++) {
        const CellFace& face = c.faces[f];
        if (face.edges.empty() || face.edges.size() != face.verts.size()) {
            issue("face " + std::to_string(f) + " has a malformed circuit");
            continue;
        }
        int r = (int)face.edges.size();
        for (int i = 0; i < r; i++) {
            int e = face.edges[i];
            if (e < 0 || e >= (int)c.edges.size()) {
                issue("face " + std::to_string(f) + " uses a bad edge id");
                continue;
            }
            int u = face.verts[i], w = face.verts[(i + 1) % r];
            if (!((c.edges[e].v0 == u && c.edges[e].v1 == w) || (c.edges[e].v0 == w && c.edges[e].v1 == u)))
                issue("face " + std::to_string(f) + " circuit edge " + std::to_string(e) + " does not join its vertices");
            edge_corner_count[e]++;
            if (c.face_boundary[f]) edge_boundary_corners[e]++;
        }
        // closure of the open 2-stratum must be a disc: embedded boundary circuit
        std::set<int> vs(face.verts.begin(), face.verts.end());
        std::set<int> es(face.edges.begin(), face.edges.end());
        if (vs.size() != face.verts.size() || es.size() != face.edges.size())
            issue("face " + std::to_string(f) + " boundary circuit is not embedded");
    }
    if (!rep.ok()) return rep;

    for (int e = 0; e < (int)c.edges.size(); e++) {
        if (edge_corner_count[e] != 3)
            issue("edge " + std::to_string(e) + " has " + std::to_string(edge_corner_count[e]) +
                  " 2-cell corners (want 3)");
        if (c.edge_boundary[e] && edge_boundary_corners[e] != 2)
            issue("boundary edge " + std::to_string(e) + " has " + std::to_string(edge_boundary_corners[e]) +
                  " boundary corners (want 2)");
        if (!c.edge_boundary[e] && edge_boundary_corners[e] != 0)
            issue("interior edge " + std::to_string(e) + " touches boundary faces");
        if (e < (int)c.edge_order.size() && !c.edge_order[e].empty()) {
            std::vector<int> a;
            for (int f = 0; f < (int)c.faces.size(); f++)
                for (int ee : c.faces[f].edges)
                    if (ee == e) a.push_back(f);
            std::vector<int> b = c.edge_order[e];
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b) issue("edge " + std::to_string(e) + " cyclic order does not list its corners");
        }
    }

    // K4 vertex links: exactly 4 germs and each germ pair spanned by one corner
    std::vector<VertexLocal> locals = vertex_locals(c, &rep);
    if (!rep.ok()) return rep;
    for (int v = 0; v < c.n_vertices; v++) {
        const VertexLocal& L = locals[v];
        if (L.germs.size() != 4) {
            issue("vertex " + std::to_string(v) + " has " + std::to_string(L.germs.size()) + " edge germs (want 4)");
            continue;
        }
        if (L.corners.size() != 6) {
            issue("vertex " + std::to_string(v) + " has " + std::to_string(L.corners.size()) +
                  " 2-cell corners (want 6)");
            continue;
        }
        std::set<std::array<int, 2>> pairs(L.corners.begin(), L.corners.end());
        if (pairs.size() != 6) issue("vertex " + std::to_string(v) + " link is not the complete graph K4");
    }

    // face <-> 3-cell incidence slots
    for (int X = 0; X < (int)c.cells.size(); X++) {
        if (c.cells[X].faces.empty()) issue("3-cell " + std::to_string(X) + " has no faces");
        for (int f : c.cells[X].faces) {
            if (f < 0 || f >= (int)c.faces.size())
                issue("3-cell " + std::to_string(X) + " uses a bad face id");
            else
                face_slots[f]++;
        }
    }
    if (!rep.ok()) return rep;
    for (int f = 0; f < (int)c.faces.size(); f++) {
        int want = c.face_boundary[f] ? 1 : 2;
        if (face_slots[f] != want)
            issue("face " + std::to_string(f) + " lies in " + std::to_string(face_slots[f]) +
                  " 3-cell boundaries (want " + std::to_string(want) + ")");
    }

    // each 3-cell boundary must be a 2-sphere
    for (int X = 0; X < (int)c.cells.size(); X++) {
        std::map<int, int> edge_occ;
        std::set<int> vs;
        long long F = 0;
        for (int f : c.cells[X].faces) {
            F++;
            for (int e : c.faces[f].edges) edge_occ[e]++;
            for (int v : c.faces[f].verts) vs.insert(v);
        }
        bool closed = true;
        for (auto& [e, n] : edge_occ)
            if (n != 2) closed = false;
        if (!closed) {
            issue("3-cell " + std::to_string(X) + " boundary is not a closed surface");
            continue;
        }
        // connectivity of the boundary surface across shared edges
        std::map<int, std::vector<int>> faces_at_edge;
        for (int f : c.cells[X].faces)
            for (int e : c.faces[f].edges) faces_at_edge[e].push_back(f);
        std::set<int> seen;
        std::vector<int> stack{c.cells[X].faces.front()};
        seen.insert(stack.back());
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (int e : c.faces[f].edges)
                for (int g : faces_at_edge[e])
                    if (!seen.count(g)) {
                        seen.insert(g);
                        stack.push_back(g);
                    }
        }
        std::set<int> distinct(c.cells[X].faces.begin(), c.cells[X].faces.end());
        if (seen.size() != distinct.size()) {
            issue("3-cell " + std::to_string(X) + " boundary is disconnected");
            continue;
        }
        long long chi = (long long)vs.size() - (long long)edge_occ.size() + F;
        if (chi != 2) issue("3-cell " + std::to_string(X) + " boundary has Euler characteristic " + std::to_string(chi));
    }
    return rep;
}

CellValidationReport validate_regular(const SimpleCellComplex& c) {
    CellValidationReport rep;
    auto issue = [&](const std::string& s) { rep.issues.push_back({s}); };

    std::vector<std::vector<int>> cells_of_face(c.faces.size());
    for (int X = 0; X < (int)c.cells.size(); X++)
        for (int f : c.cells[X].faces) cells_of_face[f].push_back(X);

    std::map<std::array<int, 2>, int> cell_pair_faces;
    for (int f = 0; f < (int)c.faces.size(); f++) {
        if (c.face_boundary.size() == c.faces.size() && c.face_boundary[f]) continue;
        if (cells_of_face[f].size() != 2) {
            issue("face " + std::to_string(f) + " does not bound two 3-cells");
            continue;
        }
        int a = cells_of_face[f][0], b = cells_of_face[f][1];
        if (a == b) {
            issue("face " + std::to_string(f) + " bounds the same 3-cell on both sides");
            continue;
        }
        cell_pair_faces[{std::min(a, b), std::max(a, b)}]++;
    }
    for (auto& [pr, n] : cell_pair_faces)
        if (n > 1)
            issue("3-cells " + std::to_string(pr[0]) + "," + std::to_string(pr[1]) + " meet in " + std::to_string(n) +
                  " 2-cells");

    std::map<std::array<int, 2>, int> face_pair_edges;
    for (int e = 0; e < (int)c.edges.size(); e++) {
        std::vector<int> fs;
        for (int f = 0; f < (int)c.faces.size(); f++)
            for (int ee : c.faces[f].edges)
                if (ee == e) fs.push_back(f);
        std::sort(fs.begin(), fs.end());
        for (size_t i = 0; i + 1 < fs.size(); i++)
            if (fs[i] == fs[i + 1]) issue("face " + std::to_string(fs[i]) + " meets edge " + std::to_string(e) + " twice");
        for (size_t i = 0; i < fs.size(); i++)
            for (size_t j = i + 1; j < fs.size(); j++)
                if (fs[i] != fs[j]) face_pair_edges[{fs[i], fs[j]}]++;
    }
    for (auto& [pr, n] : face_pair_edges)
        if (n > 1)
            issue("2-cells " + std::to_string(pr[0]) + "," + std::to_string(pr[1]) + " meet in " + std::to_string(n) +
                  " 1-cells");
    return rep;
}

SimpleCellComplex dual_complex(const Triangulation3& t) {
    require_valid(t, "dual_complex");
    Skeleton sk = Skeleton::build(t);
    SimpleCellComplex c;
    // dual 0-cells = tetrahedra
    c.n_vertices = (int)t.tets.size();
    std::map<Triangle, int> tri_id;
    for (int i = 0; i < (int)sk.triangles.size(); i++) tri_id[sk.triangles[i]] = i;
    // dual 1-cells = triangles, joining their two tetrahedra
    for (const Triangle& f : sk.triangles) {
        const auto& ts = sk.tets_of_triangle.at(f);
        c.edges.push_back({ts[0], ts[1]});
    }
    // dual 2-cells = edges of t, circuit = fan of tetrahedra and triangles around the edge
    std::map<EdgePair, int> edge_id;
    for (int i = 0; i < (int)sk.edges.size(); i++) edge_id[sk.edges[i]] = i;
    c.faces.resize(sk.edges.size());
    for (int ei = 0; ei < (int)sk.edges.size(); ei++) {
        EdgePair e = sk.edges[ei];
        auto cyc = edge_link_cycle(t, e);
        if (!cyc) throw std::invalid_argument("dual_complex: edge link not a circle");
        const std::vector<int>& w = *cyc;
        int r = (int)w.size();
        CellFace& face = c.faces[ei];
        for (int i = 0; i < r; i++) {
            // dual vertex: tet {e, w_i, w_{i+1}}
            Tet tet{e[0], e[1], w[i], w[(i + 1) % r]};
            std::sort(tet.begin(), tet.end());
            int ti = (int)(std::lower_bound(t.tets.begin(), t.tets.end(), tet) - t.tets.begin());
            face.verts.push_back(ti);
            // dual edge between tets i and i+1: triangle {e, w_{i+1}}
            Triangle tri{e[0], e[1], w[(i + 1) % r]};
            std::sort(tri.begin(), tri.end());
            face.edges.push_back(tri_id.at(tri));
        }
    }
    // dual 3-cells = vertices of t, bounded by the dual faces of their edges
    c.cells.resize(t.vertex_count);
    for (int ei = 0; ei < (int)sk.edges.size(); ei++) {
        c.cells[sk.edges[ei][0]].faces.push_back(ei);
        c.cells[sk.edges[ei][1]].faces.push_back(ei);
    }
    // cyclic order around a dual edge (triangle of t): its three dual faces
    c.edge_order.resize(c.edges.size());
    for (int i = 0; i < (int)sk.triangles.size(); i++) {
        const Triangle& f = sk.triangles[i];
        c.edge_order[i] = {edge_id.at({f[0], f[1]}), edge_id.at({f[0], f[2]}), edge_id.at({f[1], f[2]})};
    }
    c.init_flags();
    return c;
}

TQResult triangulate_TQ(const SimpleCellComplex& c) {
    CellValidationReport rs = validate_simple(c);
    if (!rs.ok()) throw std::invalid_argument("triangulate_TQ: not a simple decomposition: " + rs.summary());
    CellValidationReport rr = validate_regular(c);
    if (!rr.ok()) throw std::invalid_argument("triangulate_TQ: regularity failure: " + rr.summary());
    if (c.has_boundary()) throw std::invalid_argument("triangulate_TQ: complex has boundary");

    TQResult out;
    int n = 0;
    out.of_vertex.resize(c.n_vertices);
    for (int v = 0; v < c.n_vertices; v++) out.of_vertex[v] = n++;
    out.of_edge.resize(c.edges.size());
    for (size_t e = 0; e < c.edges.size(); e++) out.of_edge[e] = n++;
    out.of_face.resize(c.faces.size());
    for (size_t f = 0; f < c.faces.size(); f++) out.of_face[f] = n++;
    out.of_cell.resize(c.cells.size());
    for (size_t X = 0; X < c.cells.size(); X++) out.of_cell[X] = n++;
    out.tri.vertex_count = n;

    std::set<Tet> tets;
    for (int X = 0; X < (int)c.cells.size(); X++)
        for (int f : c.cells[X].faces) {
            const CellFace& face = c.faces[f];
            int r = (int)face.edges.size();
            for (int i = 0; i < r; i++) {
                int e = face.edges[i];
                for (int v : {face.verts[i], face.verts[(i + 1) % r]}) {
                    Tet tet{out.of_vertex[v], out.of_edge[e], out.of_face[f], out.of_cell[X]};
                    std::sort(tet.begin(), tet.end());
                    if (!tets.insert(tet).second)
                        throw std::logic_error("triangulate_TQ: repeated incidence flag");
                }
            }
        }
    out.tri.tets.assign(tets.begin(), tets.end());
    out.tri.normalize();
    return out;
}

Triangulation3 dual_triangulation(const SimpleCellComplex& c) {
    std::vector<std::set<int>> cells_at_vertex(c.n_vertices);
    std::vector<std::set<int>> faces_at_vertex(c.n_vertices);
    for (int f = 0; f < (int)c.faces.size(); f++)
        for (int v : c.faces[f].verts) faces_at_vertex[v].insert(f);
    std::vector<std::vector<int>> cells_of_face(c.faces.size());
    for (int X = 0; X < (int)c.cells.size(); X++)
        for (int f : c.cells[X].faces) cells_of_face[f].push_back(X);
    for (int v = 0; v < c.n_vertices; v++)
        for (int f : faces_at_vertex[v])
            for (int X : cells_of_face[f]) cells_at_vertex[v].insert(X);
    Triangulation3 t;
    t.vertex_count = (int)c.cells.size();
    for (int v = 0; v < c.n_vertices; v++) {
        if (cells_at_vertex[v].size() != 4)
            throw std::invalid_argument("dual_triangulation: vertex " + std::to_string(v) + " touches " +
                                        std::to_string(cells_at_vertex[v].size()) + " 3-cells (want 4)");
        Tet tet;
        int w = 0;
        for (int X : cells_at_vertex[v]) tet[w++] = X;
        std::sort(tet.begin(), tet.end());
        t.tets.push_back(tet);
    }
    t.normalize();
    for (size_t i = 0; i + 1 < t.tets.size(); i++)
        if (t.tets[i] == t.tets[i + 1])
            throw std::invalid_argument("dual_triangulation: two 0-cells have the same four 3-cells");
    return t;
}

// ---------------------------------------------------------------------------
// stratum deletion / insertion

namespace {

struct CellNode {  // a cell of the complex, used to address TQ vertices
    int dim;
    int id;
    bool operator<(const CellNode& o) const { return dim != o.dim ? dim < o.dim : id < o.id; }
};

int tq_vertex(const TQResult& tq, CellNode n) {
    switch (n.dim) {
        case 0: return tq.of_vertex[n.id];
        case 1: return tq.of_edge[n.id];
        case 2: return tq.of_face[n.id];
        default: return tq.of_cell[n.id];
    }
}

// Emits the contraction sequence for the given abstract merge pairs, executing
// them on the barycentric triangulation to record concrete vertex labels.
MoveSequence emit_contractions(const TQResult& tq, const std::vector<std::pair<CellNode, CellNode>>& pairs) {
    Triangulation3 cur = tq.tri;
    std::map<CellNode, int> where;  // node -> current vertex index
    for (auto& [p, q] : pairs) {
        where.emplace(p, tq_vertex(tq, p));
        where.emplace(q, tq_vertex(tq, q));
    }
    MoveSequence seq;
    seq.start_signature = canonical_form(cur).signature;
    for (auto& [p, q] : pairs) {
        int i = where.at(p), j = where.at(q);
        if (i == j) throw std::logic_error("delete_stratum: contraction pair already merged");
        ContractionMove m{std::min(i, j), std::max(i, j)};
        ContractResult cr = contract(cur, m);
        seq.steps.push_back({true, m, {}});
        for (auto& [n, idx] : where) idx = cr.vertex_map[idx];
        cur = std::move(cr.result);
    }
    seq.end_signature = canonical_form(cur).signature;
    return seq;
}

}  // namespace

StratumDeleteResult delete_stratum(const SimpleCellComplex& c, int face_id) {
    CellValidationReport rs = validate_simple(c);
    if (!rs.ok()) throw std::invalid_argument("delete_stratum: input not simple: " + rs.summary());
    CellValidationReport rr = validate_regular(c);
    if (!rr.ok()) throw std::invalid_argument("delete_stratum: input not regular: " + rr.summary());
    if (face_id < 0 || face_id >= (int)c.faces.size()) throw std::invalid_argument("delete_stratum: bad face");
    if (c.has_boundary()) throw std::invalid_argument("delete_stratum: complex has boundary");

    const CellFace circuit = c.faces[face_id];
    const int k = (int)circuit.edges.size();

    std::vector<std::vector<int>> cells_of_face(c.faces.size());
    for (int X = 0; X < (int)c.cells.size(); X++)
        for (int f : c.cells[X].faces) cells_of_face[f].push_back(X);
    if (cells_of_face[face_id].size() != 2 || cells_of_face[face_id][0] == cells_of_face[face_id][1])
        throw std::invalid_argument("delete_stratum: stratum does not separate two different 3-cells");
    int X1 = cells_of_face[face_id][0], X2 = cells_of_face[face_id][1];

    // the two other faces at each circuit edge
    std::vector<std::array<int, 2>> side_faces(k);
    for (int i = 0; i < k; i++) {
        int e = circuit.edges[i];
        std::vector<int> fs;
        for (int f = 0; f < (int)c.faces.size(); f++)
            for (int ee : c.faces[f].edges)
                if (ee == e && f != face_id) fs.push_back(f);
        if (fs.size() != 2 || fs[0] == fs[1])
            throw std::invalid_argument("delete_stratum: circuit edge lacks two distinct other faces");
        side_faces[i] = {fs[0], fs[1]};
    }
    // the two other edges at each circuit vertex
    std::vector<std::array<int, 2>> side_edges(k);
    {
        std::set<int> circ_edges(circuit.edges.begin(), circuit.edges.end());
        for (int i = 0; i < k; i++) {
            int v = circuit.verts[i];
            std::vector<int> es;
            for (int e = 0; e < (int)c.edges.size(); e++) {
                if (circ_edges.count(e)) continue;
                if (c.edges[e].v0 == v || c.edges[e].v1 == v) es.push_back(e);
            }
            if (es.size() != 2 || es[0] == es[1])
                throw std::invalid_argument("delete_stratum: circuit vertex lacks two distinct other edges");
            int far0 = c.edges[es[0]].v0 == v ? c.edges[es[0]].v1 : c.edges[es[0]].v0;
            int far1 = c.edges[es[1]].v0 == v ? c.edges[es[1]].v1 : c.edges[es[1]].v0;
            if (far0 == far1 && far0 == v) throw std::invalid_argument("delete_stratum: degenerate vertex merge");
            side_edges[i] = {es[0], es[1]};
        }
    }

    // ----- record the contraction sequence (cell pair, then edge pairs in
    // circuit order, then vertex pairs; the Lemma's proof order)
    TQResult tq = triangulate_TQ(c);
    std::vector<std::pair<CellNode, CellNode>> pairs;
    pairs.push_back({{2, face_id}, {3, X1}});
    pairs.push_back({{2, face_id}, {3, X2}});
    for (int i = 0; i < k; i++) {
        pairs.push_back({{1, circuit.edges[i]}, {2, side_faces[i][0]}});
        pairs.push_back({{1, circuit.edges[i]}, {2, side_faces[i][1]}});
    }
    for (int i = 0; i < k; i++) {
        pairs.push_back({{0, circuit.verts[i]}, {1, side_edges[i][0]}});
        pairs.push_back({{0, circuit.verts[i]}, {1, side_edges[i][1]}});
    }

    // ----- build the reduced complex
    SimpleCellComplex r = c;
    r.geometry.reset();
    // merge the two 3-cells
    {
        std::vector<int> merged;
        for (int f : r.cells[X1].faces)
            if (f != face_id) merged.push_back(f);
        for (int f : r.cells[X2].faces)
            if (f != face_id) merged.push_back(f);
        r.cells[X1].faces = merged;
        r.cells[X2].faces.clear();  // dropped at reindex
    }
    // dissolve circuit edges: merge the two flanking faces
    std::vector<int> face_alias(r.faces.size());
    for (size_t f = 0; f < r.faces.size(); f++) face_alias[f] = (int)f;
    auto resolve_face = [&](int f) {
        while (face_alias[f] != f) f = face_alias[f];
        return f;
    };
    auto rotate_to_edge = [&](CellFace& face, int e) {
        int r2 = (int)face.edges.size();
        int at = -1;
        for (int i = 0; i < r2; i++)
            if (face.edges[i] == e) at = i;
        if (at < 0) throw std::logic_error("delete_stratum: edge vanished from face circuit");
        std::rotate(face.edges.begin(), face.edges.begin() + at, face.edges.end());
        std::rotate(face.verts.begin(), face.verts.begin() + at, face.verts.end());
    };
    for (int i = 0; i < k; i++) {
        int e = circuit.edges[i];
        int fa = resolve_face(side_faces[i][0]);
        int fb = resolve_face(side_faces[i][1]);
        if (fa == fb) throw std::invalid_argument("delete_stratum: edge dissolution would pinch a face");
        CellFace A = r.faces[fa];
        CellFace B = r.faces[fb];
        rotate_to_edge(A, e);  // A: e first: verts[0] --e--> verts[1]
        rotate_to_edge(B, e);
        // orient B so its traversal of e runs opposite to A's
        if (B.verts[0] == A.verts[0]) {
            std::reverse(B.verts.begin(), B.verts.end());
            std::reverse(B.edges.begin(), B.edges.end());
            std::rotate(B.edges.begin(), B.edges.begin() + 1, B.edges.end());
            rotate_to_edge(B, e);
        }
        if (B.verts[0] != A.verts[1 % A.verts.size()])
            throw std::logic_error("delete_stratum: cannot align merged circuits");
        // merged circuit: A without its first edge, then B without its first edge
        CellFace M;
        int ra = (int)A.edges.size(), rb = (int)B.edges.size();
        for (int j = 1; j < ra; j++) {
            M.verts.push_back(A.verts[j]);
            M.edges.push_back(A.edges[j]);
        }
        for (int j = 1; j < rb; j++) {
            M.verts.push_back(B.verts[j]);
            M.edges.push_back(B.edges[j]);
        }
        r.faces[fa] = M;
        r.faces[fb] = {};
        face_alias[fb] = fa;
    }
    // dissolve circuit vertices: merge their two remaining edges
    std::vector<int> edge_alias(r.edges.size());
    for (size_t e = 0; e < r.edges.size(); e++) edge_alias[e] = (int)e;
    auto resolve_edge = [&](int e) {
        while (edge_alias[e] != e) e = edge_alias[e];
        return e;
    };
    for (int i = 0; i < k; i++) {
        int v = circuit.verts[i];
        int ea = resolve_edge(side_edges[i][0]);
        int eb = resolve_edge(side_edges[i][1]);
        if (ea == eb) throw std::invalid_argument("delete_stratum: vertex dissolution would close a loop");
        int fa0 = r.edges[ea].v0 == v ? r.edges[ea].v1 : r.edges[ea].v0;
        int fb0 = r.edges[eb].v0 == v ? r.edges[eb].v1 : r.edges[eb].v0;
        if (fa0 == fb0 && fa0 == v) throw std::invalid_argument("delete_stratum: loop after merge");
        r.edges[ea] = {fa0, fb0};
        if (fa0 == fb0) throw std::invalid_argument("delete_stratum: vertex merge would create a loop edge");
        edge_alias[eb] = ea;
        // splice every circuit through v: (.., ea|eb, v, eb|ea, ..) -> (.., ea, ..)
        for (int fidx = 0; fidx < (int)r.faces.size(); fidx++) {
            if (fidx == face_id) continue;  // the stratum itself is dropped wholesale
            CellFace& face = r.faces[fidx];
            if (face.edges.empty()) continue;
            bool changed = true;
            while (changed) {
                changed = false;
                int rr2 = (int)face.verts.size();
                for (int j = 0; j < rr2; j++) {
                    if (face.verts[j] != v) continue;
                    // edge arriving at position j is edges[j-1], leaving is edges[j]
                    int in_e = resolve_edge(face.edges[(j + rr2 - 1) % rr2]);
                    int out_e = resolve_edge(face.edges[j]);
                    if (!((in_e == ea && out_e == ea)))
                        throw std::logic_error("delete_stratum: unexpected germs at dissolved vertex");
                    // drop vertex j and fuse the two edge slots into one
                    face.verts.erase(face.verts.begin() + j);
                    face.edges.erase(face.edges.begin() + j);
                    face.edges[(j + rr2 - 2) % (rr2 - 1)] = ea;
                    changed = true;
                    break;
                }
            }
        }
    }
    // rewrite edge ids inside circuits
    for (auto& face : r.faces)
        for (auto& e : face.edges) e = resolve_edge(e);
    // rewrite cell face lists; both halves of a merged face collapse to one slot
    for (auto& X : r.cells) {
        std::set<int> nf;
        for (int f : X.faces) {
            int g = resolve_face(f);
            if (g == face_id) continue;
            nf.insert(g);
        }
        X.faces.assign(nf.begin(), nf.end());
    }
    // now drop: face_id, merged-away faces, circuit edges/vertices, empty cell
    std::vector<char> drop_face(r.faces.size(), 0), drop_edge(r.edges.size(), 0), drop_vert(r.n_vertices, 0);
    drop_face[face_id] = 1;
    for (size_t f = 0; f < r.faces.size(); f++)
        if (face_alias[f] != (int)f) drop_face[f] = 1;
    for (int e : circuit.edges) drop_edge[e] = 1;
    for (size_t e = 0; e < r.edges.size(); e++)
        if (edge_alias[e] != (int)e) drop_edge[e] = 1;
    for (int v : circuit.verts) drop_vert[v] = 1;

    SimpleCellComplex out;
    std::vector<int> vmap(r.n_vertices, -1), emap(r.edges.size(), -1), fmap(r.faces.size(), -1);
    for (int v = 0; v < r.n_vertices; v++)
        if (!drop_vert[v]) {
            vmap[v] = out.n_vertices++;
        }
    for (size_t e = 0; e < r.edges.size(); e++)
        if (!drop_edge[e]) {
            emap[e] = (int)out.edges.size();
            out.edges.push_back({vmap[r.edges[e].v0], vmap[r.edges[e].v1]});
        }
    for (size_t f = 0; f < r.faces.size(); f++) {
        if (drop_face[f]) continue;
        fmap[f] = (int)out.faces.size();
        CellFace nf;
        for (int v : r.faces[f].verts) nf.verts.push_back(vmap[v]);
        for (int e : r.faces[f].edges) nf.edges.push_back(emap[e]);
        out.faces.push_back(nf);
    }
    for (int X = 0; X < (int)r.cells.size(); X++) {
        if (X == X2) continue;
        Cell3 nc;
        for (int f : r.cells[X].faces)
            if (!drop_face[f] || fmap[f] >= 0) nc.faces.push_back(fmap[f]);
        out.cells.push_back(nc);
    }
    // canonical edge orders from circuits
    out.edge_order.assign(out.edges.size(), {});
    for (int f = 0; f < (int)out.faces.size(); f++)
        for (int e : out.faces[f].edges) out.edge_order[e].push_back(f);
    out.init_flags();

    CellValidationReport r1 = validate_simple(out);
    if (!r1.ok()) throw std::invalid_argument("delete_stratum: result not simple: " + r1.summary());
    CellValidationReport r2 = validate_regular(out);
    if (!r2.ok()) throw std::invalid_argument("delete_stratum: result not regular: " + r2.summary());

    StratumDeleteResult res;
    res.reduced = std::move(out);
    res.k = k;
    res.contractions = emit_contractions(tq, pairs);
    return res;
}

StratumInsertResult insert_stratum(const SimpleCellComplex& c, const DiscSpec& spec) {
    CellValidationReport rs = validate_simple(c);
    if (!rs.ok()) throw std::invalid_argument("insert_stratum: input not simple: " + rs.summary());
    if (spec.cell < 0 || spec.cell >= (int)c.cells.size()) throw std::invalid_argument("insert_stratum: bad cell");
    const int k = (int)spec.crossing_edges.size();
    if (k < 2 || spec.arc_faces.size() != (size_t)k)
        throw std::invalid_argument("insert_stratum: need matching crossing and arc lists, k >= 2");
    {
        std::set<int> ce(spec.crossing_edges.begin(), spec.crossing_edges.end());
        if ((int)ce.size() != k) throw std::invalid_argument("insert_stratum: repeated crossing edge");
        std::set<int> af(spec.arc_faces.begin(), spec.arc_faces.end());
        if ((int)af.size() != k) throw std::invalid_argument("insert_stratum: repeated arc face");
    }
    std::set<int> cell_faces(c.cells[spec.cell].faces.begin(), c.cells[spec.cell].faces.end());
    for (int f : spec.arc_faces)
        if (!cell_faces.count(f)) throw std::invalid_argument("insert_stratum: arc face not on the cell");
    for (int i = 0; i < k; i++) {
        // arc i runs through arc_faces[i] from crossing i to crossing i+1: both
        // crossing edges must be on that face's circuit
        const CellFace& face = c.faces[spec.arc_faces[i]];
        auto has_edge = [&](int e) { return std::count(face.edges.begin(), face.edges.end(), e) == 1; };
        if (!has_edge(spec.crossing_edges[i]) || !has_edge(spec.crossing_edges[(i + 1) % k]))
            throw std::invalid_argument("insert_stratum: arc face does not join its crossing edges");
    }

    SimpleCellComplex r = c;
    r.geometry.reset();
    // 1. split each crossing edge at a new vertex
    std::vector<int> xvert(k), lo_edge(k), hi_edge(k);
    for (int i = 0; i < k; i++) {
        int e = spec.crossing_edges[i];
        int x = r.n_vertices++;
        xvert[i] = x;
        int u = r.edges[e].v0, w = r.edges[e].v1;
        r.edges[e] = {u, x};
        int ehi = (int)r.edges.size();
        r.edges.push_back({x, w});
        lo_edge[i] = e;
        hi_edge[i] = ehi;
        r.vertex_boundary.push_back(0);
        r.edge_boundary.push_back(r.edge_boundary[e]);
        // update every circuit through e
        for (auto& face : r.faces) {
            for (int j = 0; j < (int)face.edges.size(); j++) {
                if (face.edges[j] != e) continue;
                int a = face.verts[j], b = face.verts[(j + 1) % face.verts.size()];
                if (a == u && b == w) {
                    face.edges.insert(face.edges.begin() + j + 1, ehi);
                    face.verts.insert(face.verts.begin() + j + 1, x);
                } else if (a == w && b == u) {
                    face.edges[j] = ehi;
                    face.edges.insert(face.edges.begin() + j + 1, e);
                    face.verts.insert(face.verts.begin() + j + 1, x);
                } else {
                    throw std::logic_error("insert_stratum: circuit/edge mismatch");
                }
                j++;
            }
        }
    }
    // 2. cut each arc face along a chord between its two crossing vertices
    std::vector<int> chord(k);
    std::map<int, std::array<int, 2>> face_pieces;  // original face -> its two pieces
    for (int i = 0; i < k; i++) {
        int f = spec.arc_faces[i];
        int xa = xvert[i], xb = xvert[(i + 1) % k];
        int a_edge = (int)r.edges.size();
        r.edges.push_back({xa, xb});
        r.edge_boundary.push_back(0);
        chord[i] = a_edge;
        const CellFace face = r.faces[f];
        int rr = (int)face.verts.size();
        int pa = -1, pb = -1;
        for (int j = 0; j < rr; j++) {
            if (face.verts[j] == xa) pa = j;
            if (face.verts[j] == xb) pb = j;
        }
        if (pa < 0 || pb < 0) throw std::logic_error("insert_stratum: crossing vertices not on arc face");
        // piece 1: xa ... xb then chord back; piece 2: xb ... xa then chord back
        CellFace p1, p2;
        for (int j = pa; j != pb; j = (j + 1) % rr) {
            p1.verts.push_back(face.verts[j]);
            p1.edges.push_back(face.edges[j]);
        }
        p1.verts.push_back(face.verts[pb]);
        p1.edges.push_back(a_edge);
        for (int j = pb; j != pa; j = (j + 1) % rr) {
            p2.verts.push_back(face.verts[j]);
            p2.edges.push_back(face.edges[j]);
        }
        p2.verts.push_back(face.verts[pa]);
        p2.edges.push_back(a_edge);
        int f2 = (int)r.faces.size();
        r.faces[f] = p1;
        r.faces.push_back(p2);
        r.face_boundary.push_back(r.face_boundary[f]);
        face_pieces[f] = {f, f2};
        // the piece joins every cell that had f
        for (auto& X : r.cells) {
            for (size_t s = 0; s < X.faces.size(); s++)
                if (X.faces[s] == f) X.faces.push_back(f2);
        }
    }
    // 3. the new stratum
    int new_face = (int)r.faces.size();
    {
        CellFace nf;
        for (int i = 0; i < k; i++) {
            nf.verts.push_back(xvert[i]);
            nf.edges.push_back(chord[i]);
        }
        r.faces.push_back(nf);
        r.face_boundary.push_back(0);
    }
    // 4. split the cell across the walk
    {
        std::vector<int> fs = r.cells[spec.cell].faces;
        std::set<int> in_cell(fs.begin(), fs.end());
        std::set<int> chords(chord.begin(), chord.end());
        std::map<int, std::vector<int>> by_edge;
        for (int f : fs)
            for (int e : r.faces[f].edges)
                if (!chords.count(e)) by_edge[e].push_back(f);
        std::map<int, int> comp;
        int ncomp = 0;
        for (int f : fs) {
            if (comp.count(f)) continue;
            std::vector<int> stack{f};
            comp[f] = ncomp;
            while (!stack.empty()) {
                int g = stack.back();
                stack.pop_back();
                for (int e : r.faces[g].edges) {
                    if (chords.count(e)) continue;
                    for (int h : by_edge[e])
                        if (!comp.count(h)) {
                            comp[h] = ncomp;
                            stack.push_back(h);
                        }
                }
            }
            ncomp++;
        }
        if (ncomp != 2)
            throw std::invalid_argument("insert_stratum: boundary walk does not split the cell into two balls");
        Cell3 xa, xb;
        for (int f : fs) (comp[f] == 0 ? xa : xb).faces.push_back(f);
        xa.faces.push_back(new_face);
        xb.faces.push_back(new_face);
        r.cells[spec.cell] = xa;
        r.cells.push_back(xb);
    }
    r.edge_order.assign(r.edges.size(), {});
    for (int f = 0; f < (int)r.faces.size(); f++)
        for (int e : r.faces[f].edges) r.edge_order[e].push_back(f);

    CellValidationReport r1 = validate_simple(r);
    if (!r1.ok()) throw std::invalid_argument("insert_stratum: result not simple: " + r1.summary());
    CellValidationReport r2 = validate_regular(r);
    if (!r2.ok()) throw std::invalid_argument("insert_stratum: result not regular: " + r2.summary());

    StratumInsertResult res;
    res.enlarged = r;
    res.new_face = new_face;
    res.k = k;

    // expansion sequence: invert the deletion of the new stratum
    StratumDeleteResult del = delete_stratum(r, new_face);
    // replay the contractions on TQ(enlarged), capturing inverse expansions
    TQResult tq1 = triangulate_TQ(r);
    Triangulation3 cur = tq1.tri;
    struct Captured {
        ExpansionMove inv;
        int b;  // removed vertex index in the pre-contraction frame
    };
    std::vector<Captured> caps;
    for (const MoveStep& st : del.contractions.steps) {
        ContractResult cr = contract(cur, st.contraction);
        caps.push_back({cr.inverse, st.contraction.b});
        cur = std::move(cr.result);
    }
    // align the contracted end with TQ(input)
    TQResult tq0 = triangulate_TQ(c);
    CanonicalForm cf_end = canonical_form(cur);
    CanonicalForm cf_tgt = canonical_form(tq0.tri);
    if (cf_end.signature != cf_tgt.signature)
        throw std::logic_error("insert_stratum: deletion of the new stratum does not restore the input");
    std::vector<int> inv_tgt(cf_tgt.relabel.size());
    for (size_t i = 0; i < cf_tgt.relabel.size(); i++) inv_tgt[cf_tgt.relabel[i]] = (int)i;
    std::vector<int> M(cur.vertex_count);  // end-frame -> replay-frame
    for (int v = 0; v < cur.vertex_count; v++) M[v] = inv_tgt[cf_end.relabel[v]];

    Triangulation3 replay_tri = tq0.tri;
    MoveSequence seq;
    seq.start_signature = cf_tgt.signature;
    for (int i = (int)caps.size() - 1; i >= 0; i--) {
        ExpansionMove e = caps[i].inv;
        e.vertex = M[e.vertex];
        for (int& v : e.gamma) v = M[v];
        for (auto& tr : e.side_a) {
            for (int& v : tr) v = M[v];
            std::sort(tr.begin(), tr.end());
        }
        for (auto& tr : e.side_b) {
            for (int& v : tr) v = M[v];
            std::sort(tr.begin(), tr.end());
        }
        std::sort(e.side_a.begin(), e.side_a.end());
        std::sort(e.side_b.begin(), e.side_b.end());
        ExpandResult er = expand(replay_tri, e);
        seq.steps.push_back({false, {}, e});
        // update M to the previous (larger) frame
        int b = caps[i].b;
        std::vector<int> M2(M.size() + 1);
        for (int v = 0; v < (int)M2.size(); v++) {
            if (v == b)
                M2[v] = er.new_vertex;
            else if (v < b)
                M2[v] = M[v];
            else
                M2[v] = M[v - 1];
        }
        M = std::move(M2);
        replay_tri = std::move(er.result);
    }
    seq.end_signature = canonical_form(replay_tri).signature;
    if (seq.end_signature != canonical_form(tq1.tri).signature)
        throw std::logic_error("insert_stratum: expansion sequence does not reach T(Q1)");
    res.expansions = std::move(seq);
    return res;
}

}  // namespace tri3
