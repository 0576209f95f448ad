#pragma once

#include "sparsecand/decompose.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sparsecand {

struct ClusterTree {
    std::vector<int> vertices;                 // the component it covers, sorted
    std::vector<std::vector<int>> clusters;    // U_j, sorted
    std::vector<std::pair<int, int>> edges;    // tree edges between cluster indices
    std::vector<int> assignment;               // j(i) per vertex of H, -1 outside the component

    std::size_t max_cluster_size() const;
    std::vector<int> assigned(int j) const;    // A_j
};

// Min-fill elimination on the moral graph of the component, maximal cliques
// joined by a maximum-intersection spanning tree, each vertex assigned to the
// smallest covering cluster. Falls back to a single cluster if the result
// fails validation.
ClusterTree build_cluster_tree(const CandidateGraph& h, std::span<const int> component);
ClusterTree build_cluster_tree(const CandidateGraph& h);

// Empty string when the tree satisfies coverage, running intersection and the
// partition property; otherwise a description of the first failure.
std::string validate_cluster_tree(const CandidateGraph& h, const ClusterTree& ct);

struct DpStats {
    std::size_t orders_visited = 0;     // complete cluster orders evaluated
    std::size_t family_lookups = 0;     // best-parent-set lookups
    std::size_t table_entries = 0;      // sum of |S_j|!
    std::size_t order_ceiling = 0;      // sum of |U_j|!
    std::size_t root = 0;
};

// Exact dynamic program over separator orders. Throws LimitError when a
// cluster exceeds max_cluster, std::invalid_argument for an invalid tree.
MrbnSolution cluster_tree_dp(const CandidateGraph& h, const FamilyWeights& w, const ClusterTree& ct,
                             std::size_t max_cluster = 8, DpStats* stats = nullptr);

} // namespace sparsecand
