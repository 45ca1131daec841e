#include "tri3/triangulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tri3 {

void Triangulation3::normalize() {
    for (auto& t : tets) std::sort(t.begin(), t.end());
    std::sort(tets.begin(), tets.end());
}

const char* violation_name(Violation v) {
    switch (v) {
        case Violation::BadIndex: return "bad-index";
        case Violation::DegenerateTet: return "degenerate-tet";
        case Violation::DuplicateTet: return "duplicate-tet";
        case Violation::Disconnected: return "disconnected";
        case Violation::TriangleNotInTwoTets: return "triangle-not-in-two-tets";
        case Violation::VertexLinkNotSphere: return "vertex-link-not-sphere";
        case Violation::UnusedVertex: return "unused-vertex";
    }
    return "?";
}

Skeleton Skeleton::build(const Triangulation3& t) {
    Skeleton s;
    s.tets_of_vertex.assign(t.vertex_count, {});
    std::set<EdgePair> edge_set;
    for (int ti = 0; ti < (int)t.tets.size(); ti++) {
        const Tet& tet = t.tets[ti];
        for (int a = 0; a < 4; a++) {
            if (tet[a] >= 0 && tet[a] < t.vertex_count) s.tets_of_vertex[tet[a]].push_back(ti);
            for (int b = a + 1; b < 4; b++) {
                EdgePair e{tet[a], tet[b]};
                edge_set.insert(e);
                s.tets_of_edge[e].push_back(ti);
                for (int c = b + 1; c < 4; c++) {
                    Triangle f{tet[a], tet[b], tet[c]};
                    s.tets_of_triangle[f].push_back(ti);
                }
            }
        }
    }
    s.edges.assign(edge_set.begin(), edge_set.end());
    for (auto& [f, v] : s.tets_of_triangle) s.triangles.push_back(f);
    return s;
}

namespace {

// Checks that the given triangle set is a single triangulated 2-sphere.
bool is_triangulated_sphere(const std::vector<Triangle>& tris, std::string* why) {
    if (tris.empty()) {
        if (why) *why = "empty link";
        return false;
    }
    std::map<EdgePair, int> edge_count;
    std::set<int> verts;
    for (const auto& f : tris) {
        verts.insert(f.begin(), f.end());
        edge_count[{f[0], f[1]}]++;
        edge_count[{f[0], f[2]}]++;
        edge_count[{f[1], f[2]}]++;
    }
    for (auto& [e, c] : edge_count) {
        if (c != 2) {
            if (why) *why = "link edge not in exactly 2 link triangles";
            return false;
        }
    }
    // connectivity over triangles via shared edges
    std::map<EdgePair, std::vector<int>> tri_of_edge;
    for (int i = 0; i < (int)tris.size(); i++) {
        const auto& f = tris[i];
        tri_of_edge[{f[0], f[1]}].push_back(i);
        tri_of_edge[{f[0], f[2]}].push_back(i);
        tri_of_edge[{f[1], f[2]}].push_back(i);
    }
    std::vector<int> stack{0};
    std::vector<bool> seen(tris.size(), false);
    seen[0] = true;
    int reached = 1;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const auto& f = tris[i];
        for (EdgePair e : {EdgePair{f[0], f[1]}, EdgePair{f[0], f[2]}, EdgePair{f[1], f[2]}}) {
            for (int j : tri_of_edge[e])
                if (!seen[j]) {
                    seen[j] = true;
                    reached++;
                    stack.push_back(j);
                }
        }
    }
    if (reached != (int)tris.size()) {
        if (why) *why = "link disconnected";
        return false;
    }
    long long chi = (long long)verts.size() - (long long)edge_count.size() + (long long)tris.size();
    if (chi != 2) {
        if (why) *why = "link Euler characteristic != 2";
        return false;
    }
    return true;
}

}  // namespace

ValidationReport validate(const Triangulation3& t) {
    ValidationReport rep;
    // basic shape
    for (const Tet& tet : t.tets) {
        bool bad = false;
        for (int v : tet)
            if (v < 0 || v >= t.vertex_count) bad = true;
        if (bad) {
            rep.failures.push_back({Violation::BadIndex, Simplex(tet.begin(), tet.end()), "vertex index out of range"});
            return rep;
        }
        Tet s = tet;
        std::sort(s.begin(), s.end());
        if (s[0] == s[1] || s[1] == s[2] || s[2] == s[3])
            rep.failures.push_back({Violation::DegenerateTet, Simplex(tet.begin(), tet.end()), "repeated vertex"});
        if (s != tet)
            rep.failures.push_back({Violation::BadIndex, Simplex(tet.begin(), tet.end()), "tetrahedron not sorted"});
    }
    if (!rep.ok()) return rep;
    for (size_t i = 0; i + 1 < t.tets.size(); i++) {
        if (t.tets[i] == t.tets[i + 1])
            rep.failures.push_back({Violation::DuplicateTet, Simplex(t.tets[i].begin(), t.tets[i].end()), "duplicate"});
        if (t.tets[i] > t.tets[i + 1])
            rep.failures.push_back({Violation::BadIndex, Simplex(t.tets[i].begin(), t.tets[i].end()), "tet list not sorted"});
    }
    if (!rep.ok()) return rep;
    if (t.tets.empty()) {
        rep.failures.push_back({Violation::Disconnected, {}, "no tetrahedra"});
        return rep;
    }

    Skeleton sk = Skeleton::build(t);

    for (int v = 0; v < t.vertex_count; v++)
        if (sk.tets_of_vertex[v].empty())
            rep.failures.push_back({Violation::UnusedVertex, {v}, "vertex in no tetrahedron"});

    // closed pseudomanifold
    for (auto& [f, ts] : sk.tets_of_triangle)
        if (ts.size() != 2)
            rep.failures.push_back({Violation::TriangleNotInTwoTets, Simplex(f.begin(), f.end()),
                                    "in " + std::to_string(ts.size()) + " tetrahedra"});

    // connectivity via triangle adjacency
    {
        std::vector<bool> seen(t.tets.size(), false);
        std::vector<int> stack{0};
        seen[0] = true;
        size_t reached = 1;
        while (!stack.empty()) {
            int ti = stack.back();
            stack.pop_back();
            const Tet& tet = t.tets[ti];
            for (int skip = 0; skip < 4; skip++) {
                Triangle f;
                int w = 0;
                for (int a = 0; a < 4; a++)
                    if (a != skip) f[w++] = tet[a];
                for (int tj : sk.tets_of_triangle[f])
                    if (!seen[tj]) {
                        seen[tj] = true;
                        reached++;
                        stack.push_back(tj);
                    }
            }
        }
        if (reached != t.tets.size()) {
            // witness: first unreached tet
            for (size_t i = 0; i < t.tets.size(); i++)
                if (!seen[i]) {
                    rep.failures.push_back({Violation::Disconnected, Simplex(t.tets[i].begin(), t.tets[i].end()),
                                            "component not containing first tetrahedron"});
                    break;
                }
        }
    }

    // vertex links
    for (int v = 0; v < t.vertex_count; v++) {
        if (sk.tets_of_vertex[v].empty()) continue;
        std::vector<Triangle> link;
        for (int ti : sk.tets_of_vertex[v]) {
            const Tet& tet = t.tets[ti];
            Triangle f;
            int w = 0;
            for (int a = 0; a < 4; a++)
                if (tet[a] != v) f[w++] = tet[a];
            link.push_back(f);
        }
        std::string why;
        if (!is_triangulated_sphere(link, &why))
            rep.failures.push_back({Violation::VertexLinkNotSphere, {v}, why});
    }
    return rep;
}

void require_valid(const Triangulation3& t, const char* where) {
    ValidationReport rep = validate(t);
    if (!rep.ok())
        throw std::invalid_argument(std::string(where) + ": invalid triangulation (" +
                                    violation_name(rep.failures[0].kind) + ": " + rep.failures[0].detail + ")");
}

Triangulation3 boundary_4_simplex() {
    Triangulation3 t;
    t.vertex_count = 5;
    for (int skip = 0; skip < 5; skip++) {
        Tet tet;
        int w = 0;
        for (int v = 0; v < 5; v++)
            if (v != skip) tet[w++] = v;
        t.tets.push_back(tet);
    }
    t.normalize();
    return t;
}

Triangulation3 join_of_cycles(int p, int q) {
    if (p < 3 || q < 3) throw std::invalid_argument("join_of_cycles: p and q must be >= 3");
    Triangulation3 t;
    t.vertex_count = p + q;
    // first cycle on 0..p-1, second on p..p+q-1; tets are edge * edge
    for (int i = 0; i < p; i++)
        for (int j = 0; j < q; j++) {
            Tet tet{i, (i + 1) % p, p + j, p + (j + 1) % q};
            std::sort(tet.begin(), tet.end());
            t.tets.push_back(tet);
        }
    t.normalize();
    return t;
}

FVector f_vector(const Triangulation3& t) {
    Skeleton sk = Skeleton::build(t);
    FVector f;
    f.f0 = t.vertex_count;
    f.f1 = (long long)sk.edges.size();
    f.f2 = (long long)sk.triangles.size();
    f.f3 = (long long)t.tets.size();
    return f;
}

std::vector<Simplex> star_simplices(const Triangulation3& t, const Simplex& s) {
    std::set<Simplex> out;
    for (const Tet& tet : t.tets) {
        if (!std::includes(tet.begin(), tet.end(), s.begin(), s.end())) continue;
        // all faces of tet containing s
        for (int mask = 1; mask < 16; mask++) {
            Simplex face;
            for (int a = 0; a < 4; a++)
                if (mask & (1 << a)) face.push_back(tet[a]);
            if (std::includes(face.begin(), face.end(), s.begin(), s.end())) out.insert(face);
        }
    }
    if (out.empty()) throw std::invalid_argument("star: simplex not in triangulation");
    return {out.begin(), out.end()};
}

std::vector<Simplex> link_simplices(const Triangulation3& t, const Simplex& s) {
    std::set<Simplex> out;
    bool present = false;
    for (const Tet& tet : t.tets) {
        if (!std::includes(tet.begin(), tet.end(), s.begin(), s.end())) continue;
        present = true;
        Simplex rest;
        for (int v : tet)
            if (!std::binary_search(s.begin(), s.end(), v)) rest.push_back(v);
        for (int mask = 1; mask < (1 << rest.size()); mask++) {
            Simplex face;
            for (size_t a = 0; a < rest.size(); a++)
                if (mask & (1 << a)) face.push_back(rest[a]);
            out.insert(face);
        }
    }
    if (!present) throw std::invalid_argument("link: simplex not in triangulation");
    return {out.begin(), out.end()};
}

std::vector<Triangle> vertex_link_triangles(const Triangulation3& t, int v) {
    std::vector<Triangle> link;
    for (const Tet& tet : t.tets) {
        if (!std::binary_search(tet.begin(), tet.end(), v)) continue;
        Triangle f;
        int w = 0;
        for (int a = 0; a < 4; a++)
            if (tet[a] != v) f[w++] = tet[a];
        link.push_back(f);
    }
    return link;
}

std::optional<std::vector<int>> edge_link_cycle(const Triangulation3& t, EdgePair e) {
    // link vertices w with {e0,e1,w,x} tets; link edges {w,x} from tets containing e
    std::map<int, std::vector<int>> adj;
    bool present = false;
    for (const Tet& tet : t.tets) {
        if (!std::binary_search(tet.begin(), tet.end(), e[0])) continue;
        if (!std::binary_search(tet.begin(), tet.end(), e[1])) continue;
        present = true;
        std::vector<int> rest;
        for (int v : tet)
            if (v != e[0] && v != e[1]) rest.push_back(v);
        if (rest.size() != 2) return std::nullopt;
        adj[rest[0]].push_back(rest[1]);
        adj[rest[1]].push_back(rest[0]);
    }
    if (!present || adj.empty()) return std::nullopt;
    for (auto& [v, ns] : adj)
        if (ns.size() != 2) return std::nullopt;
    std::vector<int> cycle;
    int start = adj.begin()->first;
    int prev = -1, cur = start;
    do {
        cycle.push_back(cur);
        auto& ns = adj[cur];
        int nxt = (ns[0] == prev) ? ns[1] : ns[0];
        prev = cur;
        cur = nxt;
        if (cycle.size() > adj.size()) return std::nullopt;
    } while (cur != start);
    if (cycle.size() != adj.size()) return std::nullopt;  // several components
    return cycle;
}

Triangulation3 barycentric_subdivision(const Triangulation3& t) {
    // one vertex per simplex, one tetrahedron per flag v < e < f < tet
    std::map<Simplex, int> index;
    std::set<Simplex> faces;
    for (const Tet& tet : t.tets)
        for (int mask = 1; mask < 16; mask++) {
            Simplex face;
            for (int a = 0; a < 4; a++)
                if (mask & (1 << a)) face.push_back(tet[a]);
            faces.insert(face);
        }
    for (const Simplex& f : faces) {
        int id = (int)index.size();
        index.emplace(f, id);
    }
    Triangulation3 out;
    out.vertex_count = (int)index.size();
    for (const Tet& tet : t.tets) {
        // flags: choose an ordering of the 4 vertices; prefix sets give the chain
        std::array<int, 4> perm{0, 1, 2, 3};
        std::sort(perm.begin(), perm.end());
        do {
            Simplex chain;
            Tet newtet;
            std::vector<int> acc;
            for (int d = 0; d < 4; d++) {
                acc.push_back(tet[perm[d]]);
                std::vector<int> key = acc;
                std::sort(key.begin(), key.end());
                newtet[d] = index.at(key);
            }
            std::sort(newtet.begin(), newtet.end());
            out.tets.push_back(newtet);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    out.normalize();
    return out;
}

std::vector<EdgePair> all_edges(const Triangulation3& t) {
    std::set<EdgePair> es;
    for (const Tet& tet : t.tets)
        for (int a = 0; a < 4; a++)
            for (int b = a + 1; b < 4; b++) es.insert({tet[a], tet[b]});
    return {es.begin(), es.end()};
}

}  // namespace tri3
