#pragma once

#include "sparsecand/dag.hpp"
#include "sparsecand/measures.hpp"
#include "sparsecand/scoring.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sparsecand {

// Digraph with an arc j -> i for every j in C_i. Usually cyclic.
class CandidateGraph {
public:
    CandidateGraph() = default;
    // Throws std::invalid_argument for unsorted, duplicate, out-of-range or
    // self-referencing entries.
    explicit CandidateGraph(CandidateSets candidates);

    std::size_t size() const { return c_.size(); }
    const std::vector<int>& candidates(int v) const { return c_[static_cast<std::size_t>(v)]; }
    const CandidateSets& candidate_sets() const { return c_; }
    std::size_t max_in_degree() const;
    bool has_arc(int from, int to) const;
    // Position of `parent` in C_child, or -1.
    int position(int child, int parent) const;

private:
    CandidateSets c_;
};

// w(X_i, Y) for every Y subset of C_i, indexed by bit masks over the
// positions of C_i. -infinity forbids a family.
class FamilyWeights {
public:
    static constexpr std::size_t kMaxCandidates = 20;

    FamilyWeights() = default;
    explicit FamilyWeights(const CandidateGraph& h); // all zero

    std::size_t size() const { return w_.size(); }
    double at(int v, std::uint32_t mask) const { return w_[v][mask]; }
    double& at(int v, std::uint32_t mask) { return w_[v][mask]; }
    std::size_t subsets(int v) const { return w_[v].size(); }
    std::size_t entries() const;

private:
    std::vector<std::vector<double>> w_;
};

std::vector<int> mask_to_parents(const CandidateGraph& h, int v, std::uint32_t mask);
// Throws std::invalid_argument if a parent is not a candidate.
std::uint32_t parents_to_mask(const CandidateGraph& h, int v, std::span<const int> parents);

// w(X_i, Y) = family score. Families above max_in_degree get -infinity.
FamilyWeights weights_from_score(const CandidateGraph& h, Scorer& scorer,
                                 std::optional<std::size_t> max_in_degree = std::nullopt);

// W_H[G] = sum of w(X_i, Pa(X_i)). Throws std::invalid_argument when G is not
// a subgraph of H.
double total_weight(const CandidateGraph& h, const FamilyWeights& w, const ParentSets& g);

struct MrbnSolution {
    ParentSets parents; // one entry per vertex of H; empty outside the solved scope
    double weight = 0.0;
};

struct SolverLimits {
    std::size_t brute_max_vertices = 8;
    std::size_t separator_max_vertices = 16;
    std::size_t max_cluster = 8;
};

// Exhaustive search over parent-set combinations with acyclicity and bound
// pruning. Ties go to the first maximizer found. Throws LimitError above
// limits.brute_max_vertices.
MrbnSolution brute_force_mrbn(const CandidateGraph& h, const FamilyWeights& w, const SolverLimits& limits = {});

// Maximal strongly connected components in topological order of the
// condensation; vertices sorted within each component.
std::vector<std::vector<int>> scc_decompose(const CandidateGraph& h);

// True iff no directed path of g runs from a later to an earlier vertex of order.
bool respects_order(const Dag& g, std::span<const int> order);

// Side split of a component around a separator.
struct SeparatorSplit {
    std::vector<int> separator;
    std::vector<int> side[2];     // vertices of H' \ S on each side
    std::vector<int> assigned[2]; // A_1, A_2: families solved on each side
};

// Checks both separator conditions; the error names the condition that failed.
// Returns the split on success.
struct SeparatorCheck {
    std::optional<SeparatorSplit> split;
    std::string error;
};
SeparatorCheck check_separator(const CandidateGraph& h, std::span<const int> component, std::span<const int> s);

// Smallest valid separator of the component, most balanced among equal sizes.
std::optional<SeparatorSplit> find_separator(const CandidateGraph& h, std::span<const int> component);

struct SeparatorStats {
    std::size_t orders = 0;
};

// Enumerates every order on s and solves both sides by order-filtered
// exhaustive search. Throws std::invalid_argument when s is not a separator,
// std::logic_error if a union of side solutions is ever cyclic.
MrbnSolution separator_solve(const CandidateGraph& h, const FamilyWeights& w, std::span<const int> component,
                             std::span<const int> s, SeparatorStats* stats = nullptr);

enum class MrbnStrategy { Brute, Separator, ClusterTree };

struct PartialMrbn {
    ParentSets parents; // solved families; empty for unsolved vertices
    double weight = 0.0;                  // over solved vertices only
    std::vector<std::vector<int>> components;
    std::vector<bool> component_solved;
    std::vector<bool> vertex_solved;
    bool complete() const;
};

// Solves each SCC independently with the strategy; components over the
// strategy's limits are left unsolved.
PartialMrbn solve_mrbn_partial(const CandidateGraph& h, const FamilyWeights& w, MrbnStrategy strategy,
                               const SolverLimits& limits = {});

// As above, but throws LimitError when any component is over the limits.
MrbnSolution solve_mrbn(const CandidateGraph& h, const FamilyWeights& w, MrbnStrategy strategy,
                        const SolverLimits& limits = {});

// Tab-delimited summary: one row per SCC with its size and largest cluster.
void write_decomposition(std::ostream& out, const CandidateGraph& h);

namespace detail {

// Order-filtered exhaustive solve over `local` vertices (at most 32). Only the
// `decide` vertices choose families; the rest keep empty parent sets. forbid
// holds (a, b) pairs: a must not reach b. Candidates outside `scope` are free.
// Returns nullopt when every choice is forbidden.
std::optional<MrbnSolution> exhaustive_solve(const CandidateGraph& h, const FamilyWeights& w,
                                             std::span<const int> local, std::span<const int> decide,
                                             std::span<const int> scope,
                                             std::span<const std::pair<int, int>> forbid);

} // namespace detail

} // namespace sparsecand
