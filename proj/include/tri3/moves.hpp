#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tri3/triangulation.hpp"

namespace tri3 {

struct ContractionMove {
    int a = -1, b = -1;  // edge endpoints, a < b
    bool operator==(const ContractionMove&) const = default;
};

// An expansion at `vertex`: gamma is a simple edge cycle in its link,
// side_a / side_b the two closed discs of the link with boundary gamma.
// This is exactly the data whose inverse contraction is the identity move.
struct ExpansionMove {
    int vertex = -1;
    std::vector<int> gamma;  // cyclic vertex list
    std::vector<Triangle> side_a, side_b;
    bool operator==(const ExpansionMove&) const = default;
};

struct MoveStep {
    bool is_contraction = true;
    ContractionMove contraction;
    ExpansionMove expansion;
};

struct MoveSequence {
    std::vector<MoveStep> steps;
    std::string start_signature, end_signature;

    int expansion_count() const {
        int n = 0;
        for (auto& s : steps)
            if (!s.is_contraction) n++;
        return n;
    }
    int contraction_count() const { return (int)steps.size() - expansion_count(); }
};

struct AdmissibilityResult {
    bool admissible = false;
    Simplex witness;  // simplex of link(a) & link(b) outside link(ab) when inadmissible
};

AdmissibilityResult is_contraction_admissible(const Triangulation3& t, EdgePair e);

struct ContractResult {
    Triangulation3 result;
    ExpansionMove inverse;          // expansion on `result` undoing the contraction
    std::vector<int> vertex_map;    // old vertex -> new vertex (b maps to a's image)
};

ContractResult contract(const Triangulation3& t, ContractionMove m);

struct ExpandResult {
    Triangulation3 result;
    ContractionMove inverse;  // contraction on `result` undoing the expansion
    int new_vertex = -1;
};

ExpandResult expand(const Triangulation3& t, const ExpansionMove& m);

std::vector<ContractionMove> enumerate_contractions(const Triangulation3& t);

struct ExpansionEnumOptions {
    int max_cycle_len = 4;
    long long max_moves_per_vertex = 1000000;
};

std::vector<ExpansionMove> enumerate_expansions(const Triangulation3& t, const ExpansionEnumOptions& opt = {});

enum class SearchStatus { Found, Exhausted, BudgetExceeded };

struct SearchLimits {
    long long max_nodes = 200000;
    int max_depth = 64;
};

struct SearchOutcome {
    SearchStatus status = SearchStatus::BudgetExceeded;
    std::optional<MoveSequence> certificate;
    long long nodes_explored = 0;
    int max_depth_reached = 0;
    long long bound = -1;  // used by d_upper_bound
};

// Pure-contraction reachability of the boundary 4-simplex.
SearchOutcome edge_contractibility(const Triangulation3& t, const SearchLimits& limits = {});

enum class Recognition { Yes, No, Unknown };

struct RecognitionResult {
    Recognition answer = Recognition::Unknown;
    std::optional<MoveSequence> certificate;  // for Yes
    std::string witness;                      // for No: homology obstruction
    long long nodes_explored = 0;
    std::string theoretical_bound;            // the try-all bound, reported not executed
};

RecognitionResult recognize_s3(const Triangulation3& t, int max_depth, long long max_nodes);

SearchOutcome d_upper_bound(const Triangulation3& t, const SearchLimits& limits = {});

// Replays a move sequence, validating every intermediate complex; throws on
// any mismatch with the recorded signatures.
Triangulation3 replay(const Triangulation3& start, const MoveSequence& seq);

}  // namespace tri3
