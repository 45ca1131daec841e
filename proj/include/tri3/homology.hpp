#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "tri3/triangulation.hpp"

namespace tri3 {

using BigInt = boost::multiprecision::cpp_int;

// Sparse integer matrix, row-major triplets.
struct SparseIntMatrix {
    int rows = 0, cols = 0;
    std::vector<std::array<int, 2>> pos;  // (row, col)
    std::vector<long long> val;

    void add(int r, int c, long long v) {
        pos.push_back({r, c});
        val.push_back(v);
    }
};

struct SmithSummary {
    long long rank = 0;
    std::vector<BigInt> torsion;  // diagonal entries > 1, each dividing the next
};

// Smith normal form summary (rank and nontrivial invariant factors).
// Exact over the integers; falls back to arbitrary precision internally
// when entries leave the checked 64-bit range.
SmithSummary smith_summary(const SparseIntMatrix& m);

struct HomologyProfile {
    std::array<long long, 4> betti{0, 0, 0, 0};
    std::array<std::vector<BigInt>, 4> torsion;

    bool is_sphere_like() const {
        return betti[0] == 1 && betti[1] == 0 && betti[2] == 0 && betti[3] == 1 &&
               torsion[0].empty() && torsion[1].empty() && torsion[2].empty() && torsion[3].empty();
    }
    std::string to_string() const;
    bool operator==(const HomologyProfile& o) const = default;
};

HomologyProfile homology(const Triangulation3& t);

// Homology of an arbitrary chain complex given by boundary matrices
// d[i]: C_i -> C_{i-1} (d[0] ignored / empty), with dims[i] = rank of C_i.
HomologyProfile chain_homology(const std::vector<long long>& dims, const std::vector<SparseIntMatrix>& d);

}  // namespace tri3
