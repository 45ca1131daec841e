#include "tri3/homology.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace tri3 {

namespace {

struct OverflowBail {};

// checked 64-bit ops; bail out to the big-integer path on overflow
inline long long chk_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowBail{};
    return r;
}
inline long long chk_sub(long long a, long long b) {
    long long r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowBail{};
    return r;
}

// Sparse elimination working state over a generic integer type.
template <class I>
struct Elim {
    // row -> (col -> value), col -> set of rows
    std::unordered_map<int, std::unordered_map<int, I>> row;
    std::unordered_map<int, std::unordered_map<int, char>> colrows;
    long long rank = 0;

    void set(int r, int c, const I& v) {
        if (v == 0) return;
        auto& cell = row[r][c];
        cell += v;
        if (cell == 0) {
            row[r].erase(c);
            colrows[c].erase(r);
            if (row[r].empty()) row.erase(r);
            if (colrows[c].empty()) colrows.erase(c);
        } else {
            colrows[c][r] = 1;
        }
    }

    // Eliminate with unit pivots while any exist. Returns leftover dense matrix.
    std::vector<std::vector<I>> run() {
        bool progress = true;
        while (progress) {
            progress = false;
            // find a +-1 pivot with minimal fill estimate
            int best_r = -1, best_c = -1;
            long long best_score = -1;
            for (auto& [r, cells] : row) {
                for (auto& [c, v] : cells) {
                    if (v != 1 && v != -1) continue;
                    long long score = (long long)(cells.size() - 1) * (long long)(colrows[c].size() - 1);
                    if (best_r < 0 || score < best_score) {
                        best_r = r;
                        best_c = c;
                        best_score = score;
                        if (score == 0) break;
                    }
                }
                if (best_score == 0) break;
            }
            if (best_r < 0) break;
            progress = true;
            pivot_eliminate(best_r, best_c);
        }
        // gather leftover into a dense matrix
        std::map<int, int> rmap, cmap;
        for (auto& [r, cells] : row) {
            rmap.emplace(r, 0);
            for (auto& [c, v] : cells) cmap.emplace(c, 0);
        }
        int ri = 0, ci = 0;
        for (auto& [r, idx] : rmap) idx = ri++;
        for (auto& [c, idx] : cmap) idx = ci++;
        std::vector<std::vector<I>> dense(rmap.size(), std::vector<I>(cmap.size(), I(0)));
        for (auto& [r, cells] : row)
            for (auto& [c, v] : cells) dense[rmap[r]][cmap[c]] = v;
        return dense;
    }

    void pivot_eliminate(int pr, int pc) {
        I pv = row[pr][pc];  // +-1
        // rows with entry in column pc (other than pr)
        std::vector<int> rs;
        for (auto& [r, one] : colrows[pc])
            if (r != pr) rs.push_back(r);
        std::vector<std::pair<int, I>> prow(row[pr].begin(), row[pr].end());
        for (int r : rs) {
            I factor = row[r][pc];  // row_r -= (factor/pv) * row_pr
            I q = factor;
            if (pv == I(-1)) q = -q;
            for (auto& [c, v] : prow) {
                I delta = mulv(q, v);
                subv(r, c, delta);
            }
        }
        // remove pivot row and column
        for (auto& [c, v] : prow) {
            colrows[c].erase(pr);
            if (colrows[c].empty()) colrows.erase(c);
        }
        row.erase(pr);
        if (colrows.count(pc)) {
            for (auto& [r, one] : colrows[pc]) row[r].erase(pc);
            colrows.erase(pc);
        }
        rank++;
    }

    I mulv(const I& a, const I& b);
    void subv(int r, int c, const I& delta) {
        auto it = row.find(r);
        I cur = I(0);
        if (it != row.end()) {
            auto jt = it->second.find(c);
            if (jt != it->second.end()) cur = jt->second;
        }
        I nv = subv2(cur, delta);
        if (nv == 0) {
            if (it != row.end()) {
                it->second.erase(c);
                if (it->second.empty()) row.erase(r);
            }
            auto ct = colrows.find(c);
            if (ct != colrows.end()) {
                ct->second.erase(r);
                if (ct->second.empty()) colrows.erase(c);
            }
        } else {
            row[r][c] = nv;
            colrows[c][r] = 1;
        }
    }
    I subv2(const I& a, const I& b);
};

template <>
long long Elim<long long>::mulv(const long long& a, const long long& b) {
    return chk_mul(a, b);
}
template <>
long long Elim<long long>::subv2(const long long& a, const long long& b) {
    return chk_sub(a, b);
}
template <>
BigInt Elim<BigInt>::mulv(const BigInt& a, const BigInt& b) {
    return a * b;
}
template <>
BigInt Elim<BigInt>::subv2(const BigInt& a, const BigInt& b) {
    return a - b;
}

// Full SNF of a small dense matrix over BigInt.
void dense_snf(std::vector<std::vector<BigInt>> m, SmithSummary& out) {
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    size_t t = 0;
    while (true) {
        // find a nonzero entry at or after (t,t)
        int pr = -1, pc = -1;
        BigInt best = 0;
        for (size_t r = t; r < rows; r++)
            for (size_t c = t; c < cols; c++)
                if (m[r][c] != 0) {
                    BigInt a = abs(m[r][c]);
                    if (pr < 0 || a < best) {
                        best = a;
                        pr = (int)r;
                        pc = (int)c;
                    }
                }
        if (pr < 0) break;
        std::swap(m[t], m[pr]);
        for (size_t r = 0; r < rows; r++) std::swap(m[r][t], m[r][pc]);
        // reduce row/col until pivot divides everything in its row and column
        bool clean = false;
        while (!clean) {
            clean = true;
            for (size_t r = t + 1; r < rows; r++) {
                if (m[r][t] == 0) continue;
                BigInt q = m[r][t] / m[t][t];
                for (size_t c = t; c < cols; c++) m[r][c] -= q * m[t][c];
                if (m[r][t] != 0) {
                    std::swap(m[t], m[r]);
                    clean = false;
                }
            }
            for (size_t c = t + 1; c < cols; c++) {
                if (m[t][c] == 0) continue;
                BigInt q = m[t][c] / m[t][t];
                for (size_t r = t; r < rows; r++) m[r][c] -= q * m[r][t];
                if (m[t][c] != 0) {
                    for (size_t r = t; r < rows; r++) std::swap(m[r][t], m[r][c]);
                    clean = false;
                }
            }
        }
        // ensure divisibility of the rest by the pivot
        bool again = false;
        for (size_t r = t + 1; r < rows && !again; r++)
            for (size_t c = t + 1; c < cols && !again; c++)
                if (m[r][c] % m[t][t] != 0) {
                    for (size_t cc = t; cc < cols; cc++) m[t][cc] += m[r][cc];
                    again = true;
                }
        if (again) continue;
        t++;
    }
    out.rank += (long long)t;
    for (size_t i = 0; i < t; i++) {
        BigInt d = abs(m[i][i]);
        if (d > 1) out.torsion.push_back(d);
    }
    std::sort(out.torsion.begin(), out.torsion.end());
}

template <class I>
SmithSummary snf_with(const SparseIntMatrix& m) {
    Elim<I> e;
    for (size_t i = 0; i < m.pos.size(); i++) e.set(m.pos[i][0], m.pos[i][1], I(m.val[i]));
    auto dense = e.run();
    SmithSummary out;
    out.rank = e.rank;
    std::vector<std::vector<BigInt>> big(dense.size());
    for (size_t r = 0; r < dense.size(); r++)
        for (auto& v : dense[r]) big[r].push_back(BigInt(v));
    dense_snf(std::move(big), out);
    return out;
}

}  // namespace

SmithSummary smith_summary(const SparseIntMatrix& m) {
    try {
        return snf_with<long long>(m);
    } catch (OverflowBail&) {
        return snf_with<BigInt>(m);
    }
}

HomologyProfile chain_homology(const std::vector<long long>& dims, const std::vector<SparseIntMatrix>& d) {
    if (dims.size() != 4 || d.size() != 4) throw std::invalid_argument("chain_homology: need 4 dimensions");
    std::array<SmithSummary, 4> s;  // s[i] = SNF of d_i (d_0 is zero)
    for (int i = 1; i < 4; i++) s[i] = smith_summary(d[i]);
    HomologyProfile h;
    for (int i = 0; i < 4; i++) {
        long long rank_di = (i == 0) ? 0 : s[i].rank;
        long long rank_di1 = (i == 3) ? 0 : s[i + 1].rank;
        h.betti[i] = dims[i] - rank_di - rank_di1;
        if (i < 3) h.torsion[i] = s[i + 1].torsion;
    }
    return h;
}

HomologyProfile homology(const Triangulation3& t) {
    Skeleton sk = Skeleton::build(t);
    std::map<EdgePair, int> eid;
    std::map<Triangle, int> fid;
    for (int i = 0; i < (int)sk.edges.size(); i++) eid[sk.edges[i]] = i;
    for (int i = 0; i < (int)sk.triangles.size(); i++) fid[sk.triangles[i]] = i;

    std::vector<long long> dims{(long long)t.vertex_count, (long long)sk.edges.size(), (long long)sk.triangles.size(),
                                (long long)t.tets.size()};
    std::vector<SparseIntMatrix> d(4);
    d[1].rows = t.vertex_count;
    d[1].cols = (int)sk.edges.size();
    for (int i = 0; i < (int)sk.edges.size(); i++) {
        d[1].add(sk.edges[i][1], i, 1);
        d[1].add(sk.edges[i][0], i, -1);
    }
    d[2].rows = (int)sk.edges.size();
    d[2].cols = (int)sk.triangles.size();
    for (int i = 0; i < (int)sk.triangles.size(); i++) {
        const Triangle& f = sk.triangles[i];
        d[2].add(eid[{f[1], f[2]}], i, 1);
        d[2].add(eid[{f[0], f[2]}], i, -1);
        d[2].add(eid[{f[0], f[1]}], i, 1);
    }
    d[3].rows = (int)sk.triangles.size();
    d[3].cols = (int)t.tets.size();
    for (int i = 0; i < (int)t.tets.size(); i++) {
        const Tet& tet = t.tets[i];
        int sign = 1;
        for (int skip = 0; skip < 4; skip++) {
            Triangle f;
            int w = 0;
            for (int a = 0; a < 4; a++)
                if (a != skip) f[w++] = tet[a];
            d[3].add(fid[f], i, (skip % 2 == 0) ? 1 : -1);
        }
        (void)sign;
    }
    return chain_homology(dims, d);
}

std::string HomologyProfile::to_string() const {
    std::string s = "(";
    for (int i = 0; i < 4; i++) {
        if (i) s += ", ";
        std::string part;
        for (long long b = 0; b < betti[i]; b++) part += part.empty() ? "Z" : "+Z";
        for (const BigInt& q : torsion[i]) part += (part.empty() ? "Z/" : "+Z/") + q.str();
        if (part.empty()) part = "0";
        s += part;
    }
    s += ")";
    return s;
}

}  // namespace tri3
