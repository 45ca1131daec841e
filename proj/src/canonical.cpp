#include "tri3/canonical.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace tri3 {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Triangulation3 relabel(const Triangulation3& t, const std::vector<int>& perm) {
    Triangulation3 out;
    out.vertex_count = t.vertex_count;
    out.tets.reserve(t.tets.size());
    for (const Tet& tet : t.tets) {
        Tet nt{perm[tet[0]], perm[tet[1]], perm[tet[2]], perm[tet[3]]};
        std::sort(nt.begin(), nt.end());
        out.tets.push_back(nt);
    }
    out.normalize();
    return out;
}

namespace {

// Dense color refinement on vertices; colors are canonical (assigned by
// sorting structural keys), so class order is isomorphism-invariant.
struct Refiner {
    const Triangulation3& t;
    std::vector<std::vector<int>> tets_at;  // vertex -> tet ids

    explicit Refiner(const Triangulation3& tt) : t(tt) {
        tets_at.assign(t.vertex_count, {});
        for (int i = 0; i < (int)t.tets.size(); i++)
            for (int v : t.tets[i]) tets_at[v].push_back(i);
    }

    std::vector<int> refine(std::vector<int> color) const {
        int n = t.vertex_count;
        while (true) {
            std::vector<std::pair<std::vector<int>, int>> keys(n);
            for (int v = 0; v < n; v++) {
                std::vector<int> key;
                key.push_back(color[v]);
                std::vector<std::array<int, 3>> nbr;
                for (int ti : tets_at[v]) {
                    std::array<int, 3> c;
                    int w = 0;
                    for (int u : t.tets[ti])
                        if (u != v) c[w++] = color[u];
                    std::sort(c.begin(), c.end());
                    nbr.push_back(c);
                }
                std::sort(nbr.begin(), nbr.end());
                for (auto& c : nbr) key.insert(key.end(), c.begin(), c.end());
                keys[v] = {std::move(key), v};
            }
            std::map<std::vector<int>, int> id;
            for (int v = 0; v < n; v++) id.emplace(keys[v].first, 0);
            int next = 0;
            for (auto& [k, i] : id) i = next++;
            std::vector<int> nc(n);
            for (int v = 0; v < n; v++) nc[v] = id[keys[v].first];
            if (nc == color) return color;
            color = std::move(nc);
        }
    }
};

std::string encode(const Triangulation3& t) {
    std::string s;
    auto put = [&s](int x) {
        s.push_back((char)(x & 0xff));
        s.push_back((char)((x >> 8) & 0xff));
    };
    put(t.vertex_count);
    put((int)t.tets.size());
    for (const Tet& tet : t.tets)
        for (int v : tet) put(v);
    return s;
}

struct CanonSearch {
    const Triangulation3& t;
    const Refiner& ref;
    std::string best;
    std::vector<int> best_perm;

    void leaf(const std::vector<int>& color) {
        // discrete coloring: color is the relabeling
        Triangulation3 r = relabel(t, color);
        std::string enc = encode(r);
        if (best.empty() || enc < best) {
            best = std::move(enc);
            best_perm = color;
        }
    }

    void dfs(std::vector<int> color) {
        // find first class with >1 members
        int n = t.vertex_count;
        std::vector<int> count(n + 1, 0);
        for (int v = 0; v < n; v++) count[color[v]]++;
        int target = -1;
        for (int c = 0; c < n; c++)
            if (count[c] > 1) {
                target = c;
                break;
            }
        if (target < 0) {
            leaf(color);
            return;
        }
        for (int v = 0; v < n; v++) {
            if (color[v] != target) continue;
            std::vector<int> nc = color;
            // individualize: give v a color just below its class
            for (int u = 0; u < n; u++)
                if (nc[u] >= target) nc[u]++;
            nc[v] = target;
            dfs(ref.refine(std::move(nc)));
        }
    }
};

}  // namespace

CanonicalForm canonical_form(const Triangulation3& t) {
    if (t.vertex_count == 0 || t.tets.empty()) {
        CanonicalForm cf;
        cf.signature = encode(t);
        cf.hash = fnv1a(cf.signature);
        return cf;
    }
    Refiner ref(t);
    std::vector<int> init(t.vertex_count, 0);
    CanonSearch srch{t, ref, {}, {}};
    srch.dfs(ref.refine(init));
    CanonicalForm cf;
    cf.relabel = srch.best_perm;
    cf.signature = srch.best;
    cf.hash = fnv1a(cf.signature);
    return cf;
}

bool is_isomorphic(const Triangulation3& a, const Triangulation3& b) {
    if (a.vertex_count != b.vertex_count || a.tets.size() != b.tets.size()) return false;
    return canonical_form(a).signature == canonical_form(b).signature;
}

}  // namespace tri3
