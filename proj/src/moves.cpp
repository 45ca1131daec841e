#include "tri3/moves.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "tri3/canonical.hpp"
#include "tri3/homology.hpp"

namespace tri3 {

namespace {

// every nonempty face of the residual simplex across all tets containing s
std::set<Simplex> link_set(const Triangulation3& t, const Simplex& s) {
    std::set<Simplex> out;
    for (const Tet& tet : t.tets) {
        if (!std::includes(tet.begin(), tet.end(), s.begin(), s.end())) continue;
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
    return out;
}

std::vector<Triangle> sorted_triangles(std::vector<Triangle> v) {
    for (auto& f : v) std::sort(f.begin(), f.end());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

AdmissibilityResult is_contraction_admissible(const Triangulation3& t, EdgePair e) {
    std::set<Simplex> la = link_set(t, {e[0]});
    std::set<Simplex> lb = link_set(t, {e[1]});
    std::set<Simplex> le = link_set(t, {e[0], e[1]});
    if (le.empty()) throw std::invalid_argument("is_contraction_admissible: not an edge");
    for (const Simplex& s : la) {
        if (!lb.count(s)) continue;
        if (!le.count(s)) return {false, s};
    }
    return {true, {}};
}

ContractResult contract(const Triangulation3& t, ContractionMove m) {
    if (m.a >= m.b) throw std::invalid_argument("contract: need a < b");
    EdgePair e{m.a, m.b};
    AdmissibilityResult adm = is_contraction_admissible(t, e);
    if (!adm.admissible) {
        std::string w = "{";
        for (size_t i = 0; i < adm.witness.size(); i++) w += (i ? "," : "") + std::to_string(adm.witness[i]);
        w += "}";
        throw std::invalid_argument("contract: inadmissible move, witness " + w);
    }
    auto cyc = edge_link_cycle(t, e);
    if (!cyc) throw std::invalid_argument("contract: edge link is not a circle");

    // old label -> new label: b merges into a, labels above b shift down
    auto map_v = [&](int v) { return v == m.b ? m.a : (v > m.b ? v - 1 : v); };
    ContractResult res;
    res.vertex_map.resize(t.vertex_count);
    for (int v = 0; v < t.vertex_count; v++) res.vertex_map[v] = map_v(v);

    res.result.vertex_count = t.vertex_count - 1;
    std::set<Tet> seen;
    for (const Tet& tet : t.tets) {
        bool has_a = std::binary_search(tet.begin(), tet.end(), m.a);
        bool has_b = std::binary_search(tet.begin(), tet.end(), m.b);
        if (has_a && has_b) continue;  // open star of e removed
        Tet nt{map_v(tet[0]), map_v(tet[1]), map_v(tet[2]), map_v(tet[3])};
        std::sort(nt.begin(), nt.end());
        if (!seen.insert(nt).second)
            throw std::logic_error("contract: produced duplicate tetrahedron despite link condition");
        res.result.tets.push_back(nt);
    }
    res.result.normalize();

    // inverse expansion at the merged vertex
    res.inverse.vertex = m.a;
    for (int v : *cyc) res.inverse.gamma.push_back(map_v(v));
    std::vector<Triangle> sa, sb;
    for (const Tet& tet : t.tets) {
        bool has_a = std::binary_search(tet.begin(), tet.end(), m.a);
        bool has_b = std::binary_search(tet.begin(), tet.end(), m.b);
        if (has_a && !has_b) {
            Triangle f;
            int w = 0;
            for (int v : tet)
                if (v != m.a) f[w++] = map_v(v);
            sa.push_back(f);
        } else if (has_b && !has_a) {
            Triangle f;
            int w = 0;
            for (int v : tet)
                if (v != m.b) f[w++] = map_v(v);
            sb.push_back(f);
        }
    }
    res.inverse.side_a = sorted_triangles(std::move(sa));
    res.inverse.side_b = sorted_triangles(std::move(sb));
    return res;
}

namespace {

struct DiscCheck {
    bool ok = false;
    std::string why;
};

// side must be a triangulated disc with boundary exactly `gamma_edges`
DiscCheck check_disc(const std::vector<Triangle>& side, const std::set<EdgePair>& gamma_edges) {
    DiscCheck r;
    if (side.empty()) {
        r.why = "empty side";
        return r;
    }
    std::map<EdgePair, int> ecount;
    std::set<int> verts;
    for (const Triangle& f : side) {
        verts.insert(f.begin(), f.end());
        ecount[{f[0], f[1]}]++;
        ecount[{f[0], f[2]}]++;
        ecount[{f[1], f[2]}]++;
    }
    std::set<EdgePair> boundary;
    for (auto& [e, c] : ecount) {
        if (c > 2) {
            r.why = "edge in more than two side triangles";
            return r;
        }
        if (c == 1) boundary.insert(e);
    }
    if (boundary != gamma_edges) {
        r.why = "side boundary is not gamma";
        return r;
    }
    // connectivity across interior edges
    std::map<EdgePair, std::vector<int>> tri_of_edge;
    for (int i = 0; i < (int)side.size(); i++) {
        const Triangle& f = side[i];
        for (EdgePair e : {EdgePair{f[0], f[1]}, EdgePair{f[0], f[2]}, EdgePair{f[1], f[2]}})
            tri_of_edge[e].push_back(i);
    }
    std::vector<bool> seen(side.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t reached = 1;
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const Triangle& f = side[i];
        for (EdgePair e : {EdgePair{f[0], f[1]}, EdgePair{f[0], f[2]}, EdgePair{f[1], f[2]}})
            for (int j : tri_of_edge[e])
                if (!seen[j]) {
                    seen[j] = true;
                    reached++;
                    stack.push_back(j);
                }
    }
    if (reached != side.size()) {
        r.why = "side disconnected";
        return r;
    }
    long long chi = (long long)verts.size() - (long long)ecount.size() + (long long)side.size();
    if (chi != 1) {
        r.why = "side Euler characteristic != 1";
        return r;
    }
    r.ok = true;
    return r;
}

}  // namespace

ExpandResult expand(const Triangulation3& t, const ExpansionMove& m) {
    if (m.vertex < 0 || m.vertex >= t.vertex_count) throw std::invalid_argument("expand: bad vertex");
    if (m.gamma.size() < 3) throw std::invalid_argument("expand: gamma too short");
    std::set<int> gset(m.gamma.begin(), m.gamma.end());
    if (gset.size() != m.gamma.size()) throw std::invalid_argument("expand: gamma not simple");

    std::vector<Triangle> link = sorted_triangles(vertex_link_triangles(t, m.vertex));
    std::set<Triangle> link_tris(link.begin(), link.end());
    std::set<EdgePair> gamma_edges;
    for (size_t i = 0; i < m.gamma.size(); i++) {
        int u = m.gamma[i], v = m.gamma[(i + 1) % m.gamma.size()];
        EdgePair e{std::min(u, v), std::max(u, v)};
        gamma_edges.insert(e);
        // each gamma edge must be an edge of link(vertex)
        bool found = false;
        for (const Triangle& f : link)
            if (std::binary_search(f.begin(), f.end(), e[0]) && std::binary_search(f.begin(), f.end(), e[1]))
                found = true;
        if (!found) throw std::invalid_argument("expand: gamma edge not in link");
    }
    if (gamma_edges.size() != m.gamma.size()) throw std::invalid_argument("expand: gamma degenerate");

    std::vector<Triangle> sa = sorted_triangles(m.side_a);
    std::vector<Triangle> sb = sorted_triangles(m.side_b);
    {
        std::set<Triangle> ta(sa.begin(), sa.end()), tb(sb.begin(), sb.end());
        if (ta.size() != sa.size() || tb.size() != sb.size())
            throw std::invalid_argument("expand: repeated side triangle");
        std::set<Triangle> uni = ta;
        uni.insert(tb.begin(), tb.end());
        if (uni != link_tris || ta.size() + tb.size() != link_tris.size())
            throw std::invalid_argument("expand: sides do not partition link");
    }
    DiscCheck ca = check_disc(sa, gamma_edges);
    if (!ca.ok) throw std::invalid_argument("expand: side_a not a disc with boundary gamma: " + ca.why);
    DiscCheck cb = check_disc(sb, gamma_edges);
    if (!cb.ok) throw std::invalid_argument("expand: side_b not a disc with boundary gamma: " + cb.why);

    ExpandResult res;
    res.new_vertex = t.vertex_count;
    res.result.vertex_count = t.vertex_count + 1;
    int va = m.vertex, vb = res.new_vertex;
    for (const Tet& tet : t.tets) {
        if (std::binary_search(tet.begin(), tet.end(), m.vertex)) continue;  // old star removed
        res.result.tets.push_back(tet);
    }
    for (const Triangle& f : sa) {
        Tet nt{va, f[0], f[1], f[2]};
        std::sort(nt.begin(), nt.end());
        res.result.tets.push_back(nt);
    }
    for (const Triangle& f : sb) {
        Tet nt{vb, f[0], f[1], f[2]};
        std::sort(nt.begin(), nt.end());
        res.result.tets.push_back(nt);
    }
    for (const EdgePair& e : gamma_edges) {
        Tet nt{va, vb, e[0], e[1]};
        std::sort(nt.begin(), nt.end());
        res.result.tets.push_back(nt);
    }
    res.result.normalize();
    res.inverse = ContractionMove{std::min(va, vb), std::max(va, vb)};
    return res;
}

std::vector<ContractionMove> enumerate_contractions(const Triangulation3& t) {
    std::vector<ContractionMove> out;
    for (EdgePair e : all_edges(t))
        if (is_contraction_admissible(t, e).admissible) out.push_back({e[0], e[1]});
    return out;
}

namespace {

// simple cycles (as canonical vertex lists) of bounded length in a graph
std::vector<std::vector<int>> bounded_cycles(const std::map<int, std::set<int>>& adj, int max_len,
                                             long long budget) {
    std::vector<std::vector<int>> cycles;
    std::vector<int> verts;
    for (auto& [v, ns] : adj) verts.push_back(v);
    long long examined = 0;
    for (int start : verts) {
        // paths starting at `start` using only vertices > start except start itself,
        // with second vertex < last vertex to kill the reflection double-count
        std::vector<int> path{start};
        std::set<int> used{start};
        std::function<void(int)> dfs = [&](int cur) {
            if ((long long)cycles.size() >= budget || examined > 64 * budget) return;
            examined++;
            for (int nxt : adj.at(cur)) {
                if (nxt == start && path.size() >= 3) {
                    if (path[1] < path.back()) cycles.push_back(path);
                    continue;
                }
                if (nxt <= start || used.count(nxt)) continue;
                if ((int)path.size() >= max_len) continue;
                used.insert(nxt);
                path.push_back(nxt);
                dfs(nxt);
                path.pop_back();
                used.erase(nxt);
            }
        };
        dfs(start);
        if ((long long)cycles.size() >= budget) break;
    }
    std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return cycles;
}

}  // namespace

std::vector<ExpansionMove> enumerate_expansions(const Triangulation3& t, const ExpansionEnumOptions& opt) {
    std::vector<ExpansionMove> out;
    for (int v = 0; v < t.vertex_count; v++) {
        std::vector<Triangle> link = sorted_triangles(vertex_link_triangles(t, v));
        if (link.empty()) continue;
        std::map<int, std::set<int>> adj;
        for (const Triangle& f : link) {
            adj[f[0]].insert(f[1]);
            adj[f[0]].insert(f[2]);
            adj[f[1]].insert(f[0]);
            adj[f[1]].insert(f[2]);
            adj[f[2]].insert(f[0]);
            adj[f[2]].insert(f[1]);
        }
        auto cycles = bounded_cycles(adj, opt.max_cycle_len, opt.max_moves_per_vertex);
        for (const auto& gamma : cycles) {
            std::set<EdgePair> gamma_edges;
            for (size_t i = 0; i < gamma.size(); i++) {
                int a = gamma[i], b = gamma[(i + 1) % gamma.size()];
                gamma_edges.insert({std::min(a, b), std::max(a, b)});
            }
            // split link triangles across gamma
            std::map<EdgePair, std::vector<int>> tri_of_edge;
            for (int i = 0; i < (int)link.size(); i++) {
                const Triangle& f = link[i];
                for (EdgePair e : {EdgePair{f[0], f[1]}, EdgePair{f[0], f[2]}, EdgePair{f[1], f[2]}})
                    tri_of_edge[e].push_back(i);
            }
            std::vector<int> comp(link.size(), -1);
            int ncomp = 0;
            for (int i = 0; i < (int)link.size(); i++) {
                if (comp[i] >= 0) continue;
                std::vector<int> stack{i};
                comp[i] = ncomp;
                while (!stack.empty()) {
                    int j = stack.back();
                    stack.pop_back();
                    const Triangle& f = link[j];
                    for (EdgePair e : {EdgePair{f[0], f[1]}, EdgePair{f[0], f[2]}, EdgePair{f[1], f[2]}}) {
                        if (gamma_edges.count(e)) continue;
                        for (int k : tri_of_edge[e])
                            if (comp[k] < 0) {
                                comp[k] = ncomp;
                                stack.push_back(k);
                            }
                    }
                }
                ncomp++;
            }
            if (ncomp != 2) continue;
            std::vector<Triangle> s0, s1;
            for (int i = 0; i < (int)link.size(); i++) (comp[i] == 0 ? s0 : s1).push_back(link[i]);
            if (!check_disc(s0, gamma_edges).ok || !check_disc(s1, gamma_edges).ok) continue;
            ExpansionMove m;
            m.vertex = v;
            m.gamma = gamma;
            if (s0 <= s1) {
                m.side_a = s0;
                m.side_b = s1;
            } else {
                m.side_a = s1;
                m.side_b = s0;
            }
            out.push_back(std::move(m));
        }
    }
    return out;
}

namespace {

std::string target_signature() {
    static const std::string sig = canonical_form(boundary_4_simplex()).signature;
    return sig;
}

}  // namespace

SearchOutcome edge_contractibility(const Triangulation3& t, const SearchLimits& limits) {
    require_valid(t, "edge_contractibility");
    SearchOutcome out;
    const std::string target = target_signature();
    std::string sig0 = canonical_form(t).signature;

    struct Frame {
        Triangulation3 tri;
        std::vector<ContractionMove> path;
    };
    std::vector<Frame> stack;
    std::set<uint64_t> seen;
    auto mark = [&](const std::string& sig) { return seen.insert(fnv1a(sig)).second; };

    stack.push_back({t, {}});
    mark(sig0);
    bool budget_hit = false;
    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        out.nodes_explored++;
        out.max_depth_reached = std::max(out.max_depth_reached, (int)fr.path.size());
        std::string sig = canonical_form(fr.tri).signature;
        if (sig == target) {
            MoveSequence seq;
            seq.start_signature = sig0;
            seq.end_signature = target;
            for (auto& c : fr.path) seq.steps.push_back({true, c, {}});
            out.status = SearchStatus::Found;
            out.certificate = std::move(seq);
            return out;
        }
        if (out.nodes_explored >= limits.max_nodes) {
            budget_hit = true;
            break;
        }
        for (ContractionMove m : enumerate_contractions(fr.tri)) {
            ContractResult cr = contract(fr.tri, m);
            std::string csig = canonical_form(cr.result).signature;
            if (!mark(csig)) continue;
            Frame nf;
            nf.tri = std::move(cr.result);
            nf.path = fr.path;
            nf.path.push_back(m);
            stack.push_back(std::move(nf));
        }
    }
    out.status = budget_hit ? SearchStatus::BudgetExceeded : SearchStatus::Exhausted;
    return out;
}

RecognitionResult recognize_s3(const Triangulation3& t, int max_depth, long long max_nodes) {
    require_valid(t, "recognize_s3");
    RecognitionResult res;
    {
        FVector f = f_vector(t);
        // the paper's try-all budget: < 2^(201 n^2) move sequences
        res.theoretical_bound = "2^(201*" + std::to_string(f.f3) + "^2)";
    }
    HomologyProfile h = homology(t);
    if (!h.is_sphere_like()) {
        res.answer = Recognition::No;
        res.witness = "homology " + h.to_string() + " != (Z, 0, 0, Z)";
        return res;
    }
    // contraction-only search first; it is cheap and usually suffices
    SearchLimits cl;
    cl.max_nodes = std::max<long long>(1, max_nodes / 2);
    SearchOutcome contr = edge_contractibility(t, cl);
    res.nodes_explored += contr.nodes_explored;
    if (contr.status == SearchStatus::Found) {
        res.answer = Recognition::Yes;
        res.certificate = contr.certificate;
        return res;
    }

    // mixed BFS with the expansion count capped at max_depth
    const std::string target = target_signature();
    std::string sig0 = canonical_form(t).signature;
    if (sig0 == target) {
        res.answer = Recognition::Yes;
        MoveSequence seq;
        seq.start_signature = sig0;
        seq.end_signature = target;
        res.certificate = seq;
        return res;
    }
    struct Node {
        Triangulation3 tri;
        MoveSequence path;
        int expansions = 0;
    };
    std::deque<Node> queue;
    std::unordered_map<uint64_t, int> best_exp;  // signature hash -> fewest expansions seen
    MoveSequence seq0;
    seq0.start_signature = sig0;
    queue.push_back({t, seq0, 0});
    best_exp[fnv1a(sig0)] = 0;
    long long nodes = 0;
    while (!queue.empty()) {
        Node nd = std::move(queue.front());
        queue.pop_front();
        nodes++;
        if (nodes >= max_nodes) {
            res.nodes_explored += nodes;
            res.answer = Recognition::Unknown;
            return res;
        }
        auto push = [&](Triangulation3 tri, MoveStep step, int exps) {
            std::string sig = canonical_form(tri).signature;
            uint64_t hh = fnv1a(sig);
            auto it = best_exp.find(hh);
            if (it != best_exp.end() && it->second <= exps) return;
            best_exp[hh] = exps;
            Node nn;
            nn.tri = std::move(tri);
            nn.path = nd.path;
            nn.path.steps.push_back(std::move(step));
            nn.expansions = exps;
            if (sig == target) {
                nn.path.end_signature = target;
                res.answer = Recognition::Yes;
                res.certificate = nn.path;
            }
            queue.push_back(std::move(nn));
        };
        for (ContractionMove m : enumerate_contractions(nd.tri)) {
            ContractResult cr = contract(nd.tri, m);
            push(std::move(cr.result), MoveStep{true, m, {}}, nd.expansions);
            if (res.answer == Recognition::Yes) break;
        }
        if (res.answer == Recognition::Yes) break;
        if (nd.expansions < max_depth) {
            for (const ExpansionMove& m : enumerate_expansions(nd.tri)) {
                ExpandResult er = expand(nd.tri, m);
                push(std::move(er.result), MoveStep{false, {}, m}, nd.expansions + 1);
                if (res.answer == Recognition::Yes) break;
            }
        }
        if (res.answer == Recognition::Yes) break;
    }
    res.nodes_explored += nodes;
    if (res.answer != Recognition::Yes && res.answer != Recognition::No) res.answer = Recognition::Unknown;
    return res;
}

SearchOutcome d_upper_bound(const Triangulation3& t, const SearchLimits& limits) {
    require_valid(t, "d_upper_bound");
    SearchOutcome out;
    SearchLimits inner;
    inner.max_nodes = limits.max_nodes;
    SearchOutcome direct = edge_contractibility(t, inner);
    out.nodes_explored += direct.nodes_explored;
    if (direct.status == SearchStatus::Found) {
        out.status = SearchStatus::Found;
        out.bound = 0;
        MoveSequence seq;
        seq.start_signature = canonical_form(t).signature;
        seq.end_signature = seq.start_signature;
        out.certificate = seq;  // empty expansion sequence; t itself is edge contractible
        return out;
    }
    // breadth-first over expansion sequences
    struct Node {
        Triangulation3 tri;
        MoveSequence path;
    };
    std::deque<Node> queue;
    std::set<uint64_t> seen;
    MoveSequence seq0;
    seq0.start_signature = canonical_form(t).signature;
    queue.push_back({t, seq0});
    seen.insert(fnv1a(seq0.start_signature));
    while (!queue.empty()) {
        Node nd = std::move(queue.front());
        queue.pop_front();
        out.nodes_explored++;
        if (out.nodes_explored >= limits.max_nodes || (int)nd.path.steps.size() > limits.max_depth) {
            out.status = SearchStatus::BudgetExceeded;
            return out;
        }
        for (const ExpansionMove& m : enumerate_expansions(nd.tri)) {
            ExpandResult er = expand(nd.tri, m);
            std::string sig = canonical_form(er.result).signature;
            if (!seen.insert(fnv1a(sig)).second) continue;
            Node nn;
            nn.tri = er.result;
            nn.path = nd.path;
            nn.path.steps.push_back({false, {}, m});
            SearchOutcome chk = edge_contractibility(nn.tri, inner);
            out.nodes_explored += chk.nodes_explored;
            if (chk.status == SearchStatus::Found) {
                nn.path.end_signature = sig;
                out.status = SearchStatus::Found;
                out.bound = (long long)nn.path.steps.size();
                out.certificate = nn.path;
                return out;
            }
            queue.push_back(std::move(nn));
        }
    }
    out.status = SearchStatus::BudgetExceeded;
    return out;
}

Triangulation3 replay(const Triangulation3& start, const MoveSequence& seq) {
    if (!seq.start_signature.empty() && canonical_form(start).signature != seq.start_signature)
        throw std::invalid_argument("replay: start signature mismatch");
    Triangulation3 cur = start;
    for (const MoveStep& s : seq.steps) {
        if (s.is_contraction)
            cur = contract(cur, s.contraction).result;
        else
            cur = expand(cur, s.expansion).result;
        ValidationReport rep = validate(cur);
        if (!rep.ok()) throw std::logic_error("replay: intermediate complex invalid");
    }
    if (!seq.end_signature.empty() && canonical_form(cur).signature != seq.end_signature)
        throw std::logic_error("replay: end signature mismatch");
    return cur;
}

}  // namespace tri3
