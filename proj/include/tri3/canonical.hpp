#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tri3/triangulation.hpp"

namespace tri3 {

// Canonical vertex relabeling plus a byte signature of the relabeled
// tetrahedron set. Signatures of two triangulations are equal exactly when
// the triangulations are simplicially isomorphic.
struct CanonicalForm {
    std::vector<int> relabel;  // relabel[old] = new
    std::string signature;
    uint64_t hash = 0;
};

CanonicalForm canonical_form(const Triangulation3& t);
bool is_isomorphic(const Triangulation3& a, const Triangulation3& b);

Triangulation3 relabel(const Triangulation3& t, const std::vector<int>& perm);

uint64_t fnv1a(const std::string& s);

}  // namespace tri3
