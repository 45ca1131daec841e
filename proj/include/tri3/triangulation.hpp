#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tri3 {

using Tet = std::array<int, 4>;        // vertex indices, sorted ascending
using Triangle = std::array<int, 3>;   // sorted
using EdgePair = std::array<int, 2>;   // sorted
using Simplex = std::vector<int>;      // sorted, dimension = size-1

// A closed simplicial 3-manifold triangulation given by its tetrahedra.
struct Triangulation3 {
    int vertex_count = 0;
    std::vector<Tet> tets;  // each sorted, list sorted lexicographically

    void normalize();  // sort each tet and the tet list
    bool operator==(const Triangulation3& o) const = default;
};

struct FVector {
    long long f0 = 0, f1 = 0, f2 = 0, f3 = 0;
    long long euler() const { return f0 - f1 + f2 - f3; }
    bool operator==(const FVector& o) const = default;
};

enum class Violation {
    BadIndex,
    DegenerateTet,
    DuplicateTet,
    Disconnected,
    TriangleNotInTwoTets,
    VertexLinkNotSphere,
    UnusedVertex,
};

struct ValidationFailure {
    Violation kind;
    Simplex witness;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationFailure> failures;
    bool ok() const { return failures.empty(); }
};

const char* violation_name(Violation v);

// Incidence tables for one triangulation, built on demand.
struct Skeleton {
    std::vector<EdgePair> edges;
    std::vector<Triangle> triangles;
    std::map<Triangle, std::vector<int>> tets_of_triangle;  // triangle -> tet indices
    std::map<EdgePair, std::vector<int>> tets_of_edge;
    std::vector<std::vector<int>> tets_of_vertex;

    static Skeleton build(const Triangulation3& t);
};

ValidationReport validate(const Triangulation3& t);
void require_valid(const Triangulation3& t, const char* where);

Triangulation3 boundary_4_simplex();
Triangulation3 join_of_cycles(int p, int q);

FVector f_vector(const Triangulation3& t);

// All simplices sigma disjoint from s with s + sigma a simplex of t.
std::vector<Simplex> link_simplices(const Triangulation3& t, const Simplex& s);
// All simplices of t containing s.
std::vector<Simplex> star_simplices(const Triangulation3& t, const Simplex& s);

// Triangles of the link 2-sphere of a vertex (each is a sorted triple).
std::vector<Triangle> vertex_link_triangles(const Triangulation3& t, int v);
// The link of an edge as a closed vertex cycle, or nullopt when it is not a
// single simple cycle.
std::optional<std::vector<int>> edge_link_cycle(const Triangulation3& t, EdgePair e);

Triangulation3 barycentric_subdivision(const Triangulation3& t);

std::vector<EdgePair> all_edges(const Triangulation3& t);

}  // namespace tri3
