#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tri3/canonical.hpp"
#include "tri3/homology.hpp"
#include "tri3/moves.hpp"

using namespace tri3;

namespace {

// deterministic random expansion walk from the boundary 4-simplex
Triangulation3 fuzz_complex(std::mt19937_64& rng, int depth, MoveSequence* record = nullptr) {
    Triangulation3 t = boundary_4_simplex();
    if (record) record->start_signature = canonical_form(t).signature;
    for (int d = 0; d < depth; d++) {
        auto moves = enumerate_expansions(t);
        if (moves.empty()) break;
        std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
        const ExpansionMove& m = moves[pick(rng)];
        if (record) record->steps.push_back({false, {}, m});
        t = expand(t, m).result;
    }
    if (record) record->end_signature = canonical_form(t).signature;
    return t;
}

}  // namespace

TEST_CASE("no admissible contraction on the boundary 4-simplex") {
    Triangulation3 t = boundary_4_simplex();
    for (EdgePair e : all_edges(t)) {
        AdmissibilityResult r = is_contraction_admissible(t, e);
        CHECK(!r.admissible);
        // witness is the triangle on the other three vertices
        CHECK(r.witness.size() == 3);
        for (int v : r.witness) {
            CHECK(v != e[0]);
            CHECK(v != e[1]);
        }
    }
    CHECK(enumerate_contractions(t).empty());
    CHECK_THROWS(contract(t, {0, 1}));
}

TEST_CASE("join(3,3) contracts along exactly the nine cross edges") {
    Triangulation3 t = join_of_cycles(3, 3);
    auto adm = enumerate_contractions(t);
    CHECK(adm.size() == 9);
    for (const ContractionMove& m : adm) {
        CHECK(m.a < 3);
        CHECK(m.b >= 3);  // cross-factor edge
    }
    // within-factor edges are all inadmissible
    for (EdgePair e : all_edges(t)) {
        bool cross = (e[0] < 3) != (e[1] < 3);
        CHECK(is_contraction_admissible(t, e).admissible == cross);
    }
    // contracting any admissible edge yields the boundary 4-simplex
    Triangulation3 d4 = boundary_4_simplex();
    for (const ContractionMove& m : adm) {
        ContractResult cr = contract(t, m);
        CHECK(validate(cr.result).ok());
        CHECK((int)cr.result.tets.size() == 5);
        CHECK(is_isomorphic(cr.result, d4));
    }
}

TEST_CASE("contract then expand returns the input up to isomorphism") {
    Triangulation3 t = join_of_cycles(3, 3);
    for (const ContractionMove& m : enumerate_contractions(t)) {
        ContractResult cr = contract(t, m);
        ExpandResult er = expand(cr.result, cr.inverse);
        CHECK(validate(er.result).ok());
        CHECK(is_isomorphic(er.result, t));
        // and homology is untouched by the move
        CHECK(homology(cr.result) == homology(t));
    }
}

TEST_CASE("expansion on the boundary 4-simplex") {
    Triangulation3 t = boundary_4_simplex();
    // gamma = 3-cycle on b,c,d in link(v); side_a the triangle bcd, side_b the rest
    ExpansionMove m;
    m.vertex = 0;
    m.gamma = {1, 2, 3};
    m.side_a = {{1, 2, 3}};
    m.side_b = {{1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
    ExpandResult er = expand(t, m);
    CHECK(validate(er.result).ok());
    CHECK(er.result.vertex_count == 6);
    CHECK((int)er.result.tets.size() == 8);
    // expand then contract the new edge recovers the input
    ContractResult back = contract(er.result, er.inverse);
    CHECK(is_isomorphic(back.result, t));
}

TEST_CASE("stellar subdivision of a tetrahedron is an expansion") {
    Triangulation3 t = boundary_4_simplex();
    // stellar subdivision of tetrahedron {1,2,3,4}: new vertex joined to its boundary,
    // as an expansion at vertex 0 with gamma the link of ... the full link of 0 split
    // by the cycle bounding the facet opposite to 0 inside star(0).
    // Independent construction of the stellar subdivision:
    Triangulation3 stellar;
    stellar.vertex_count = 6;
    for (const Tet& tet : t.tets) {
        if (tet == Tet{1, 2, 3, 4}) {
            for (int skip = 0; skip < 4; skip++) {
                Tet nt;
                int w = 0;
                for (int a = 0; a < 4; a++)
                    if (a != skip) nt[w++] = tet[a];
                nt[3] = 5;
                std::sort(nt.begin(), nt.end());
                stellar.tets.push_back(nt);
            }
        } else {
            stellar.tets.push_back(tet);
        }
    }
    stellar.normalize();
    CHECK(validate(stellar).ok());

    // as an expansion: at any vertex v of {1,2,3,4}, gamma = link of v in the
    // boundary of that tetrahedron, side_a = the single opposite triangle
    ExpansionMove m;
    m.vertex = 1;
    m.gamma = {2, 3, 4};
    m.side_a = {{2, 3, 4}};
    m.side_b = {{0, 2, 3}, {0, 2, 4}, {0, 3, 4}};
    ExpandResult er = expand(t, m);
    CHECK(validate(er.result).ok());
    CHECK(is_isomorphic(er.result, stellar));
}

TEST_CASE("expansion enumeration on the boundary 4-simplex") {
    Triangulation3 t = boundary_4_simplex();
    auto moves = enumerate_expansions(t, {.max_cycle_len = 3});
    // per vertex: 4 triangles of the link tetrahedron sphere, i.e. 4 moves modulo side swap
    int at_vertex0 = 0;
    for (auto& m : moves)
        if (m.vertex == 0) at_vertex0++;
    CHECK(at_vertex0 == 4);
    CHECK((int)moves.size() == 20);
    for (auto& m : moves) CHECK_NOTHROW(expand(t, m));
}

TEST_CASE("rejects malformed expansions") {
    Triangulation3 t = boundary_4_simplex();
    ExpansionMove m;
    m.vertex = 0;
    m.gamma = {1, 2, 3};
    m.side_a = {{1, 2, 4}};  // not a disc with boundary gamma
    m.side_b = {{1, 2, 3}, {1, 3, 4}, {2, 3, 4}};
    CHECK_THROWS(expand(t, m));
    m.gamma = {1, 2};  // too short
    CHECK_THROWS(expand(t, m));
}

TEST_CASE("edge contractibility searches") {
    CHECK(edge_contractibility(boundary_4_simplex()).status == SearchStatus::Found);
    CHECK(edge_contractibility(boundary_4_simplex()).certificate->steps.empty());
    SearchOutcome j = edge_contractibility(join_of_cycles(3, 3));
    REQUIRE(j.status == SearchStatus::Found);
    CHECK(j.certificate->steps.size() == 1);
    Triangulation3 end = replay(join_of_cycles(3, 3), *j.certificate);
    CHECK(is_isomorphic(end, boundary_4_simplex()));
}

TEST_CASE("recognizer answers yes on spheres and runs the homology shortcut") {
    RecognitionResult r = recognize_s3(boundary_4_simplex(), 0, 1000);
    CHECK(r.answer == Recognition::Yes);
    r = recognize_s3(join_of_cycles(4, 4), 2, 100000);
    CHECK(r.answer == Recognition::Yes);
    REQUIRE(r.certificate.has_value());
    Triangulation3 end = replay(join_of_cycles(4, 4), *r.certificate);
    CHECK(is_isomorphic(end, boundary_4_simplex()));
}

TEST_CASE("barycentric subdivision of the 4-simplex boundary is recognized") {
    Triangulation3 b = barycentric_subdivision(boundary_4_simplex());
    RecognitionResult r = recognize_s3(b, 4, 2000000);
    CHECK(r.answer == Recognition::Yes);
}

TEST_CASE("fuzzed expansion walks stay spheres and are recognized") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 25; trial++) {
        int depth = 1 + (int)(rng() % 5);
        MoveSequence rec;
        Triangulation3 t = fuzz_complex(rng, depth, &rec);
        CHECK(validate(t).ok());
        CHECK(homology(t).is_sphere_like());
        Triangulation3 end = replay(boundary_4_simplex(), rec);
        CHECK(canonical_form(end).signature == rec.end_signature);
        RecognitionResult r = recognize_s3(t, depth, 500000);
        CHECK(r.answer == Recognition::Yes);
    }
}

TEST_CASE("d upper bound") {
    SearchOutcome o = d_upper_bound(boundary_4_simplex());
    CHECK(o.status == SearchStatus::Found);
    CHECK(o.bound == 0);
    o = d_upper_bound(join_of_cycles(3, 3));
    CHECK(o.status == SearchStatus::Found);
    CHECK(o.bound == 0);
}
