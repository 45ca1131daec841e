#include "tri3/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace tri3 {

namespace {

int third_axis(int a, int b) { return 3 - a - b; }

struct Membership {
    const GridInput& in;

    bool facet_in_hole(const Facet& f) const {
        const InfinitePlane& ip = *in.inf;
        for (int l = 0; l < 3; l++) {
            if (l == f.axis) continue;
            if (f.p[l] < ip.hole_lo[l] || f.p[l] + 1 > ip.hole_hi[l]) return false;
        }
        return true;
    }
    bool has(const Facet& f) const {
        if (in.facets.count(f)) return true;
        if (in.inf && f.axis == in.inf->axis && f.p[f.axis] == in.inf->level && !facet_in_hole(f)) return true;
        return false;
    }
    bool is_boundary(const Facet& f) const { return in.boundary.count(f) > 0; }

    // the up-to-4 facets containing a segment
    std::vector<Facet> facets_of_seg(const Seg& s) const {
        std::vector<Facet> out;
        for (int n = 0; n < 3; n++) {
            if (n == s.axis) continue;
            int l = third_axis(n, s.axis);
            for (int off : {0, -1}) {
                Facet f;
                f.axis = n;
                f.p = s.p;
                f.p[l] += off;
                if (has(f)) out.push_back(f);
            }
        }
        return out;
    }
};

// direction encoding 0..5: axis*2 + (negative ? 1 : 0)
int dir_code(int axis, bool negative) { return axis * 2 + (negative ? 1 : 0); }

struct LinkGraph {
    // multigraph on the six axis directions
    std::vector<std::array<int, 2>> arcs;
    int circles = 0;

    void add(int a, int b) { arcs.push_back({std::min(a, b), std::max(a, b)}); }

    // smooth away degree-2 nodes; classify the remainder
    enum Kind { Empty, Manifold, Theta, K4, Invalid };
    Kind classify(std::vector<int>* germs) {
        while (true) {
            int deg[6] = {0, 0, 0, 0, 0, 0};
            int loops[6] = {0, 0, 0, 0, 0, 0};
            for (auto& a : arcs) {
                if (a[0] == a[1]) {
                    loops[a[0]]++;
                    deg[a[0]] += 2;
                } else {
                    deg[a[0]]++;
                    deg[a[1]]++;
                }
            }
            // an isolated loop is a circle component
            bool changed = false;
            for (int v = 0; v < 6 && !changed; v++) {
                if (loops[v] == 1 && deg[v] == 2) {
                    for (size_t i = 0; i < arcs.size(); i++)
                        if (arcs[i][0] == v && arcs[i][1] == v) {
                            arcs.erase(arcs.begin() + (long)i);
                            break;
                        }
                    circles++;
                    changed = true;
                }
            }
            if (changed) continue;
            for (int v = 0; v < 6 && !changed; v++) {
                if (deg[v] == 2 && loops[v] == 0) {
                    int other[2], found = 0;
                    for (size_t i = 0; i < arcs.size() && found < 2; i++) {
                        if (arcs[i][0] == v || arcs[i][1] == v) {
                            other[found++] = arcs[i][0] == v ? arcs[i][1] : arcs[i][0];
                        }
                    }
                    std::vector<std::array<int, 2>> na;
                    int removed = 0;
                    for (auto& a : arcs) {
                        if ((a[0] == v || a[1] == v) && removed < 2) {
                            removed++;
                            continue;
                        }
                        na.push_back(a);
                    }
                    na.push_back({std::min(other[0], other[1]), std::max(other[0], other[1])});
                    arcs = std::move(na);
                    changed = true;
                }
            }
            if (!changed) break;
        }
        if (arcs.empty()) {
            if (circles == 0) return Empty;
            if (circles == 1) return Manifold;
            return Invalid;
        }
        if (circles > 0) return Invalid;
        std::set<int> nodes;
        for (auto& a : arcs) {
            nodes.insert(a[0]);
            nodes.insert(a[1]);
        }
        if (nodes.size() == 2 && arcs.size() == 3) {
            bool parallel = true;
            for (auto& a : arcs)
                if (a[0] == a[1] || !nodes.count(a[0]) || !nodes.count(a[1])) parallel = false;
            if (parallel) {
                if (germs) germs->assign(nodes.begin(), nodes.end());
                return Theta;
            }
            return Invalid;
        }
        if (nodes.size() == 4 && arcs.size() == 6) {
            std::set<std::array<int, 2>> pairset(arcs.begin(), arcs.end());
            if (pairset.size() != 6) return Invalid;
            for (auto& a : arcs)
                if (a[0] == a[1]) return Invalid;
            if (germs) germs->assign(nodes.begin(), nodes.end());
            return K4;
        }
        return Invalid;
    }
};

LinkGraph vertex_link(const Membership& mem, P3 p) {
    LinkGraph g;
    for (int n = 0; n < 3; n++) {
        int l1 = (n + 1) % 3, l2 = (n + 2) % 3;
        for (int o1 : {0, -1})
            for (int o2 : {0, -1}) {
                Facet f;
                f.axis = n;
                f.p = p;
                f.p[l1] += o1;
                f.p[l2] += o2;
                if (!mem.has(f)) continue;
                g.add(dir_code(l1, o1 == -1), dir_code(l2, o2 == -1));
            }
    }
    return g;
}

std::string pstr(P3 p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.z) + ")";
}

}  // namespace

SimpleCellComplex extract_grid_complex(const GridInput& in) {
    Membership mem{in};
    auto geo = std::make_shared<GridGeometry>();
    geo->input = in;

    // ---- segment census and classification
    std::map<Seg, int> seg_count;
    std::set<P3> points;
    for (const Facet& f : in.facets) {
        int l1 = (f.axis + 1) % 3, l2 = (f.axis + 2) % 3;
        for (int side : {0, 1}) {
            Seg s1{l1, f.p};
            s1.p[l2] += side;
            Seg s2{l2, f.p};
            s2.p[l1] += side;
            seg_count.emplace(s1, 0);
            seg_count.emplace(s2, 0);
        }
        P3 q = f.p;
        points.insert(q);
        q[l1] += 1;
        points.insert(q);
        q[l2] += 1;
        points.insert(q);
        q[l1] -= 1;
        points.insert(q);
    }
    for (auto& [s, n] : seg_count) n = (int)mem.facets_of_seg(s).size();
    for (auto& [s, n] : seg_count) {
        if (n == 1) throw std::invalid_argument("grid: free sheet edge at seg " + pstr(s.p));
        if (n >= 4) throw std::invalid_argument("grid: quadruple line at seg " + pstr(s.p) + " (not a fake surface)");
    }

    // ---- vertex classification
    std::map<P3, std::vector<int>> theta_germs;  // skeleton pass-through points
    std::vector<P3> k4_points;
    std::map<P3, std::vector<int>> k4_germs;
    for (P3 p : points) {
        LinkGraph g = vertex_link(mem, p);
        std::vector<int> germs;
        LinkGraph::Kind kind = g.classify(&germs);
        switch (kind) {
            case LinkGraph::Empty:
            case LinkGraph::Manifold: break;
            case LinkGraph::Theta: theta_germs[p] = germs; break;
            case LinkGraph::K4:
                k4_points.push_back(p);
                k4_germs[p] = germs;
                break;
            case LinkGraph::Invalid:
                throw std::invalid_argument("grid: point " + pstr(p) + " has an invalid link (not a fake surface)");
        }
    }
    std::sort(k4_points.begin(), k4_points.end());
    SimpleCellComplex c;
    c.n_vertices = (int)k4_points.size();
    geo->vertex_point = k4_points;
    for (int i = 0; i < c.n_vertices; i++) geo->vertex_of_point[k4_points[i]] = i;

    // ---- 1-cells: walk triple lines between K4 vertices
    std::set<Seg> skeleton;
    for (auto& [s, n] : seg_count)
        if (n == 3) skeleton.insert(s);
    auto seg_from = [&](P3 p, int dir) {  // seg leaving p in direction code
        Seg s{dir / 2, p};
        if (dir % 2 == 1) s.p[dir / 2] -= 1;
        return s;
    };
    std::map<Seg, int> edge_of_seg;
    for (int vi = 0; vi < c.n_vertices; vi++) {
        P3 start = k4_points[vi];
        for (int dir : k4_germs[start]) {
            Seg first = seg_from(start, dir);
            if (!skeleton.count(first)) throw std::logic_error("grid: K4 germ not on a triple line");
            if (edge_of_seg.count(first)) continue;
            std::vector<Seg> chain;
            P3 cur = start;
            int curdir = dir;
            int guard = 0;
            while (true) {
                if (++guard > 1000000) throw std::logic_error("grid: runaway edge walk");
                Seg s = seg_from(cur, curdir);
                chain.push_back(s);
                P3 nxt = cur;
                nxt[curdir / 2] += (curdir % 2 == 1) ? -1 : 1;
                if (geo->vertex_of_point.count(nxt)) {
                    int ei = (int)c.edges.size();
                    c.edges.push_back({vi, geo->vertex_of_point[nxt]});
                    for (const Seg& cs : chain) edge_of_seg[cs] = ei;
                    geo->edge_segs.push_back(chain);
                    break;
                }
                auto it = theta_germs.find(nxt);
                if (it == theta_germs.end())
                    throw std::invalid_argument("grid: triple line runs into a manifold point at " + pstr(nxt));
                int back = dir_code(curdir / 2, curdir % 2 == 0);  // direction pointing back
                int fwd = -1;
                for (int g : it->second)
                    if (g != back) fwd = g;
                if (fwd < 0) throw std::logic_error("grid: theta point without forward germ");
                cur = nxt;
                curdir = fwd;
            }
        }
    }
    for (const Seg& s : skeleton)
        if (!edge_of_seg.count(s))
            throw std::invalid_argument("grid: closed triple loop without intrinsic vertices at " + pstr(s.p));
    geo->edge_of_seg = edge_of_seg;

    // ---- 2-cells: strata = facet components across manifold segments
    std::vector<Facet> all_facets(in.facets.begin(), in.facets.end());
    std::map<Facet, int> fidx;
    for (int i = 0; i < (int)all_facets.size(); i++) fidx[all_facets[i]] = i;
    std::vector<int> uf(all_facets.size());
    for (size_t i = 0; i < uf.size(); i++) uf[i] = (int)i;
    std::function<int(int)> find = [&](int a) { return uf[a] == a ? a : uf[a] = find(uf[a]); };
    auto edges_of_facet = [&](const Facet& f) {
        int l1 = (f.axis + 1) % 3, l2 = (f.axis + 2) % 3;
        std::array<Seg, 4> es;
        es[0] = Seg{l1, f.p};
        es[1] = Seg{l1, f.p};
        es[1].p[l2] += 1;
        es[2] = Seg{l2, f.p};
        es[3] = Seg{l2, f.p};
        es[3].p[l1] += 1;
        return es;
    };
    for (const Facet& f : all_facets) {
        for (const Seg& s : edges_of_facet(f)) {
            if (skeleton.count(s)) continue;
            auto fs = mem.facets_of_seg(s);
            if (fs.size() != 2) continue;  // rim of the infinity plane
            Facet other = fs[0] == f ? fs[1] : fs[0];
            if (!fidx.count(other)) continue;  // beyond the iteration box
            int a = find(fidx[f]), b = find(fidx[other]);
            if (a != b) uf[std::max(a, b)] = std::min(a, b);
        }
    }
    std::map<int, int> face_id;
    for (int i = 0; i < (int)all_facets.size(); i++) {
        int r = find(i);
        if (!face_id.count(r)) {
            face_id[r] = (int)c.faces.size();
            c.faces.push_back({});
            geo->face_facets.push_back({});
        }
        geo->face_facets[face_id[r]].insert(all_facets[i]);
        geo->face_of_facet[all_facets[i]] = face_id[r];
    }
    // the stratum closed through infinity, when present
    if (in.inf) {
        std::set<int> rim_faces;
        for (const Facet& f : all_facets) {
            if (f.axis != in.inf->axis || f.p[f.axis] != in.inf->level) continue;
            for (int l = 0; l < 3; l++) {
                if (l == f.axis) continue;
                if (f.p[l] == in.lo[l] || f.p[l] + 1 == in.hi[l]) rim_faces.insert(geo->face_of_facet[f]);
            }
        }
        if (rim_faces.size() != 1)
            throw std::invalid_argument("grid: expected exactly one stratum closed through infinity, found " +
                                        std::to_string(rim_faces.size()));
        geo->inf_face = *rim_faces.begin();
    }

    // ---- 3-cells: cube components across non-structure facets
    std::map<P3, int> cube_idx;
    std::vector<P3> cubes;
    for (int x = in.lo.x; x < in.hi.x; x++)
        for (int y = in.lo.y; y < in.hi.y; y++)
            for (int z = in.lo.z; z < in.hi.z; z++) {
                P3 q{x, y, z};
                if (in.excluded.count(q)) continue;
                cube_idx[q] = (int)cubes.size();
                cubes.push_back(q);
            }
    std::vector<int> cuf(cubes.size());
    for (size_t i = 0; i < cuf.size(); i++) cuf[i] = (int)i;
    std::function<int(int)> cfind = [&](int a) { return cuf[a] == a ? a : cuf[a] = cfind(cuf[a]); };
    for (size_t i = 0; i < cubes.size(); i++) {
        for (int a = 0; a < 3; a++) {
            P3 q = cubes[i] + unit(a);
            auto it = cube_idx.find(q);
            if (it == cube_idx.end()) continue;
            Facet f{a, q};  // the facet between cube i and q has min corner q in axis a? no:
            f.p = cubes[i] + unit(a);
            f.p[(a + 1) % 3] = cubes[i][(a + 1) % 3];
            f.p[(a + 2) % 3] = cubes[i][(a + 2) % 3];
            f.p[a] = cubes[i][a] + 1;
            if (mem.has(f)) continue;
            int x1 = cfind((int)i), x2 = cfind(it->second);
            if (x1 != x2) cuf[std::max(x1, x2)] = std::min(x1, x2);
        }
    }
    std::map<int, int> cell_id;
    for (size_t i = 0; i < cubes.size(); i++) {
        int r = cfind((int)i);
        if (!cell_id.count(r)) {
            cell_id[r] = (int)c.cells.size();
            c.cells.push_back({});
            geo->cell_cubes.push_back({});
            geo->cell_unbounded.push_back(0);
        }
        int ci = cell_id[r];
        geo->cell_cubes[ci].insert(cubes[i]);
        geo->cell_of_cube[cubes[i]] = ci;
        for (int a = 0; a < 3; a++)
            if (cubes[i][a] == in.lo[a] || cubes[i][a] + 1 == in.hi[a]) geo->cell_unbounded[ci] = 1;
    }
    {
        int unb = 0;
        for (char u : geo->cell_unbounded) unb += u;
        int want = in.inf ? 2 : 1;
        if (unb != want)
            throw std::invalid_argument("grid: expected " + std::to_string(want) + " unbounded complement components, found " +
                                        std::to_string(unb));
    }

    // ---- face sides -> 3-cell boundaries
    // side 0 of facet (a,p): the cube with min corner p (positive normal side)
    {
        int nf = (int)all_facets.size();
        std::vector<int> suf(2 * nf);
        for (int i = 0; i < 2 * nf; i++) suf[i] = i;
        std::function<int(int)> sfind = [&](int a) { return suf[a] == a ? a : suf[a] = sfind(suf[a]); };
        auto cube_of_side = [&](int fi, int side) {
            Facet f = all_facets[fi];
            P3 q = f.p;
            if (side == 1) q[f.axis] -= 1;
            return q;
        };
        for (int fi = 0; fi < nf; fi++) {
            const Facet& f = all_facets[fi];
            for (const Seg& s : edges_of_facet(f)) {
                if (skeleton.count(s)) continue;
                auto fs = mem.facets_of_seg(s);
                if (fs.size() != 2) continue;
                Facet other = fs[0] == f ? fs[1] : fs[0];
                auto oit = fidx.find(other);
                if (oit == fidx.end() || oit->second < fi) continue;
                int oi = oit->second;
                if (f.axis == other.axis) {
                    for (int side : {0, 1}) {
                        int a = sfind(2 * fi + side), b = sfind(2 * oi + side);
                        if (a != b) suf[std::max(a, b)] = std::min(a, b);
                    }
                } else {
                    // bent pair: exactly one shared cube
                    int shared_f = -1, shared_o = -1;
                    for (int s1 : {0, 1})
                        for (int s2 : {0, 1})
                            if (cube_of_side(fi, s1) == cube_of_side(oi, s2)) {
                                shared_f = s1;
                                shared_o = s2;
                            }
                    if (shared_f < 0) throw std::logic_error("grid: bent facet pair without shared cube");
                    for (int s1 : {0, 1}) {
                        int s2 = (s1 == shared_f) ? shared_o : 1 - shared_o;
                        int a = sfind(2 * fi + s1), b = sfind(2 * oi + s2);
                        if (a != b) suf[std::max(a, b)] = std::min(a, b);
                    }
                }
            }
        }
        // map each side class to a 3-cell (or to the excluded region)
        std::map<int, int> side_cell;  // root -> cell id (-1 = excluded side)
        for (int fi = 0; fi < nf; fi++) {
            for (int side : {0, 1}) {
                int root = sfind(2 * fi + side);
                P3 q = cube_of_side(fi, side);
                int ci = -1;
                auto it = geo->cell_of_cube.find(q);
                if (it != geo->cell_of_cube.end()) ci = it->second;
                auto [sit, inserted] = side_cell.emplace(root, ci);
                if (!inserted && sit->second != ci)
                    throw std::logic_error("grid: stratum side touches two different 3-cells");
            }
        }
        // aggregate per stratum: count sides once per (face, side-class)
        std::map<int, std::set<int>> face_side_roots;
        for (int fi = 0; fi < nf; fi++) {
            int face = geo->face_of_facet[all_facets[fi]];
            face_side_roots[face].insert(sfind(2 * fi + 0));
            face_side_roots[face].insert(sfind(2 * fi + 1));
        }
        c.face_boundary.assign(c.faces.size(), 0);
        for (auto& [face, roots] : face_side_roots) {
            if (roots.size() != 2)
                throw std::invalid_argument("grid: stratum " + std::to_string(face) + " has " +
                                            std::to_string(roots.size()) + " sides");
            int n_cells = 0;
            for (int r : roots) {
                int ci = side_cell.at(r);
                if (ci < 0) continue;
                c.cells[ci].faces.push_back(face);
                n_cells++;
            }
            if (n_cells == 0) throw std::invalid_argument("grid: stratum buried in the excluded region");
            if (n_cells == 1) c.face_boundary[face] = 1;
        }
    }

    // boundary facet marks must agree with the excluded-side computation
    for (const Facet& f : in.boundary)
        if (!in.facets.count(f)) throw std::invalid_argument("grid: boundary facet not in facet set");
    for (int face = 0; face < (int)c.faces.size(); face++) {
        bool marked = false;
        for (const Facet& f : geo->face_facets[face])
            if (mem.is_boundary(f)) marked = true;
        if (marked != (bool)c.face_boundary[face])
            throw std::invalid_argument("grid: boundary marks disagree with excluded cubes on stratum " +
                                        std::to_string(face));
    }

    // ---- boundary circuits of the strata
    struct Item {
        Facet f;
        Seg s;
        auto operator<=>(const Item&) const = default;
    };
    for (int face = 0; face < (int)c.faces.size(); face++) {
        std::set<Item> items;
        for (const Facet& f : geo->face_facets[face])
            for (const Seg& s : edges_of_facet(f))
                if (skeleton.count(s)) items.insert({f, s});
        if (items.empty())
            throw std::invalid_argument("grid: stratum " + std::to_string(face) + " has no skeleton boundary");
        // trace one circuit; at the end all items must be consumed
        auto other_seg_at = [&](const Facet& f, const Seg& s, P3 w) {
            // the other edge of facet f at corner w
            for (const Seg& t : edges_of_facet(f)) {
                if (t == s) continue;
                if (t.p == w) return t;
                P3 far = t.p + unit(t.axis);
                if (far == w) return t;
            }
            throw std::logic_error("grid: corner without second edge");
        };
        auto next_item = [&](P3 w, Facet g, Seg t) {
            int guard = 0;
            while (true) {
                if (++guard > 100000) throw std::logic_error("grid: runaway fan walk");
                Seg t2 = other_seg_at(g, t, w);
                if (skeleton.count(t2)) return Item{g, t2};
                auto fs = mem.facets_of_seg(t2);
                if (fs.size() != 2) throw std::logic_error("grid: fan walk left the stratum");
                Facet g2 = fs[0] == g ? fs[1] : fs[0];
                if (!geo->face_of_facet.count(g2) || geo->face_of_facet[g2] != face)
                    throw std::logic_error("grid: fan walk crossed into another stratum");
                g = g2;
                t = t2;
            }
        };
        Item start = *items.begin();
        // traversal direction: begin at the lexicographically smaller endpoint
        P3 enter = start.s.p;
        std::vector<std::pair<Seg, P3>> walk;  // (segment, entry point)
        Item cur = start;
        P3 cur_enter = enter;
        int guard = 0;
        do {
            if (++guard > 500000) throw std::logic_error("grid: runaway circuit trace");
            items.erase(cur);
            walk.push_back({cur.s, cur_enter});
            P3 exitp = (cur.s.p == cur_enter) ? cur.s.p + unit(cur.s.axis) : cur.s.p;
            Item nxt = next_item(exitp, cur.f, cur.s);
            cur = nxt;
            cur_enter = exitp;
        } while (!(cur == start && cur_enter == enter));
        if (!items.empty())
            throw std::invalid_argument("grid: stratum " + std::to_string(face) +
                                        " boundary is not a single circuit (closure not a disc)");
        // collapse to cell-level circuit
        CellFace& cf = c.faces[face];
        int n = (int)walk.size();
        // find a position where the walk passes a K4 vertex
        int first_k4 = -1;
        for (int i = 0; i < n; i++)
            if (geo->vertex_of_point.count(walk[i].second)) {
                first_k4 = i;
                break;
            }
        if (first_k4 < 0)
            throw std::invalid_argument("grid: stratum boundary contains no intrinsic vertex");
        for (int ii = 0; ii < n; ii++) {
            int i = (first_k4 + ii) % n;
            const auto& [s, entry] = walk[i];
            auto vit = geo->vertex_of_point.find(entry);
            if (vit != geo->vertex_of_point.end()) {
                cf.verts.push_back(vit->second);
                cf.edges.push_back(edge_of_seg.at(s));
            } else {
                if (cf.edges.empty() || cf.edges.back() != edge_of_seg.at(s))
                    throw std::logic_error("grid: circuit changed 1-cell away from a vertex");
            }
        }
        if (cf.verts.empty()) throw std::logic_error("grid: empty circuit");
    }

    // ---- cyclic orders around 1-cells
    c.edge_order.assign(c.edges.size(), {});
    for (int e = 0; e < (int)c.edges.size(); e++) {
        const Seg& s = geo->edge_segs[e].front();
        auto fs = mem.facets_of_seg(s);
        // order corners by rotational angle around the segment axis
        std::vector<std::pair<int, int>> ang;  // (angle index, face id)
        for (const Facet& f : fs) {
            int l = third_axis(f.axis, s.axis);
            bool neg = f.p[l] < s.p[l];
            int l1 = (s.axis + 1) % 3;
            // angle slots around axis: (+l1)=0, (+l2)=1, (-l1)=2, (-l2)=3
            int idx = (l == l1) ? (neg ? 2 : 0) : (neg ? 3 : 1);
            ang.push_back({idx, geo->face_of_facet.at(f)});
        }
        std::sort(ang.begin(), ang.end());
        for (auto& [a, f] : ang) c.edge_order[e].push_back(f);
    }

    // boundary flags for vertices and edges
    c.vertex_boundary.assign(c.n_vertices, 0);
    c.edge_boundary.assign(c.edges.size(), 0);
    for (int e = 0; e < (int)c.edges.size(); e++) {
        int nb = 0;
        for (const Facet& f : mem.facets_of_seg(geo->edge_segs[e].front()))
            if (mem.is_boundary(f)) nb++;
        if (nb >= 2) c.edge_boundary[e] = 1;
    }
    for (int e = 0; e < (int)c.edges.size(); e++)
        if (c.edge_boundary[e]) {
            c.vertex_boundary[c.edges[e].v0] = 1;
            c.vertex_boundary[c.edges[e].v1] = 1;
        }

    c.geometry = geo;

    CellValidationReport rep = validate_simple(c);
    if (!rep.ok()) throw std::invalid_argument("grid: extracted complex is not simple: " + rep.summary());
    return c;
}

TruncateResult truncate_along_cycle(const SimpleCellComplex& c, const EdgeCycle& k1) {
    if (!c.geometry) throw std::invalid_argument("truncate_along_cycle: complex carries no grid geometry");
    const GridGeometry& g = *c.geometry;
    const int n = (int)k1.edges.size();
    if (n < 1 || k1.vertices.size() != (size_t)n)
        throw std::invalid_argument("truncate_along_cycle: malformed cycle");
    {
        std::set<int> vs(k1.vertices.begin(), k1.vertices.end());
        std::set<int> es(k1.edges.begin(), k1.edges.end());
        if ((int)vs.size() != n || (int)es.size() != n)
            throw std::invalid_argument("truncate_along_cycle: cycle not simple");
    }
    for (int i = 0; i < n; i++) {
        int e_prev = k1.edges[(i + n - 1) % n], e_cur = k1.edges[i];
        int v = k1.vertices[i];
        auto touches = [&](int e) { return c.edges[e].v0 == v || c.edges[e].v1 == v; };
        if (!touches(e_prev) || !touches(e_cur))
            throw std::invalid_argument("truncate_along_cycle: cycle edges do not chain through vertices");
    }

    // the lattice tube: all cubes whose closure meets the cycle's path
    std::set<P3> tube;
    for (int e : k1.edges) {
        for (const Seg& s : g.edge_segs[e]) {
            for (int dd = -1; dd <= 1; dd++)
                for (int o1 : {0, -1})
                    for (int o2 : {0, -1}) {
                        P3 q = s.p;
                        q[s.axis] += dd;
                        q[(s.axis + 1) % 3] += o1;
                        q[(s.axis + 2) % 3] += o2;
                        tube.insert(q);
                    }
        }
    }

    GridInput ni = g.input;
    ni.boundary.clear();
    FacetSet nf;
    auto in_tube = [&](P3 q) { return tube.count(q) > 0; };
    for (const Facet& f : g.input.facets) {
        P3 above = f.p;
        P3 below = f.p;
        below[f.axis] -= 1;
        bool a = in_tube(above), b = in_tube(below);
        if (a && b) continue;  // swallowed by the open neighborhood
        nf.insert(f);
        if (a != b) ni.boundary.insert(f);
    }
    // tube wall facets
    for (P3 q : tube) {
        for (int a = 0; a < 3; a++)
            for (int side : {0, 1}) {
                P3 nb = q;
                nb[a] += side ? 1 : -1;
                if (in_tube(nb)) continue;
                Facet f{a, q};
                if (side) f.p[a] += 1;
                nf.insert(f);
                ni.boundary.insert(f);
            }
    }
    ni.facets = std::move(nf);
    for (P3 q : tube) ni.excluded.insert(q);

    TruncateResult out;
    out.drilled_cubes = tube;
    out.exterior = extract_grid_complex(ni);
    const GridGeometry& ng = *out.exterior.geometry;

    // identity map on cells preserved outside the closed star of the cycle
    for (int v = 0; v < c.n_vertices; v++) {
        auto it = ng.vertex_of_point.find(g.vertex_point[v]);
        if (it != ng.vertex_of_point.end()) out.vertex_map[v] = it->second;
    }
    for (int e = 0; e < (int)c.edges.size(); e++) {
        auto it = ng.edge_of_seg.find(g.edge_segs[e].front());
        if (it == ng.edge_of_seg.end()) continue;
        if (ng.edge_segs[it->second] == g.edge_segs[e]) out.edge_map[e] = it->second;
    }
    for (int f = 0; f < (int)c.faces.size(); f++) {
        auto it = ng.face_of_facet.find(*g.face_facets[f].begin());
        if (it == ng.face_of_facet.end()) continue;
        if (ng.face_facets[it->second] == g.face_facets[f]) out.face_map[f] = it->second;
    }
    for (int X = 0; X < (int)c.cells.size(); X++) {
        auto it = ng.cell_of_cube.find(*g.cell_cubes[X].begin());
        if (it == ng.cell_of_cube.end()) continue;
        if (ng.cell_cubes[it->second] == g.cell_cubes[X]) out.cell_map[X] = it->second;
    }
    return out;
}

BoundarySurfaceInfo boundary_surface_info(const SimpleCellComplex& c) {
    BoundarySurfaceInfo info;
    std::set<int> bverts, bedges;
    std::vector<int> bfaces;
    for (int f = 0; f < (int)c.faces.size(); f++) {
        if (!c.face_boundary[f]) continue;
        bfaces.push_back(f);
        for (int v : c.faces[f].verts) bverts.insert(v);
        for (int e : c.faces[f].edges) bedges.insert(e);
    }
    info.verts = (long long)bverts.size();
    info.edges = (long long)bedges.size();
    info.faces = (long long)bfaces.size();
    if (bfaces.empty()) return info;
    // components over shared edges
    std::map<int, std::vector<int>> at_edge;
    for (int f : bfaces)
        for (int e : c.faces[f].edges) at_edge[e].push_back(f);
    std::set<int> seen;
    for (int f0 : bfaces) {
        if (seen.count(f0)) continue;
        info.components++;
        std::vector<int> stack{f0};
        seen.insert(f0);
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (int e : c.faces[f].edges)
                for (int h : at_edge[e])
                    if (!seen.count(h)) {
                        seen.insert(h);
                        stack.push_back(h);
                    }
        }
    }
    return info;
}

}  // namespace tri3
