#pragma once

#include "sparsecand/dag.hpp"
#include "sparsecand/measures.hpp"
#include "sparsecand/scoring.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace sparsecand {

struct SearchConfig {
    std::size_t tabu_capacity = 100;
    std::size_t patience = 15; // applied moves without beating the best score
    std::optional<std::size_t> max_in_degree;
    std::optional<CandidateSets> candidates; // constrained mode when set
    std::vector<bool> frozen;                // families that must not change
};

// Order-independent hash of the parent-set family.
std::uint64_t family_hash(int child, const std::vector<int>& parents);
std::uint64_t structure_fingerprint(const ParentSets& parents);

// Bounded FIFO of visited structures. Hash hits are confirmed by comparing the
// full parent sets.
class TabuList {
public:
    explicit TabuList(std::size_t capacity) : capacity_(capacity) {}

    void push(const ParentSets& g, std::uint64_t fingerprint);
    bool contains(const ParentSets& g, std::uint64_t fingerprint) const;
    bool maybe_contains(std::uint64_t fingerprint) const { return counts_.count(fingerprint) > 0; }
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<std::pair<std::uint64_t, ParentSets>> items_;
    std::unordered_map<std::uint64_t, std::size_t> counts_;
};

// Moves that keep the graph acyclic, keep every parent set inside its
// candidate set, respect the in-degree bound and leave frozen families alone.
// Listed in (kind, from, to) order.
std::vector<Move> legal_moves(const Dag& g, const SearchConfig& cfg);

// Throws std::invalid_argument when the move does not apply or creates a cycle.
Dag apply_move(const Dag& g, const Move& m);

struct TraceRow {
    std::size_t step = 0;
    Move move{};
    double delta = 0.0;
    double score = 0.0;
    std::uint64_t fresh_stats = 0;
};

struct SearchResult {
    Dag dag;
    double score = 0.0;
    std::vector<TraceRow> trace;
};

// Best-improvement hill climbing with a TABU list: applies the best move whose
// result is not on the list (which may lower the score), stops after
// `patience` moves without improving on the best score seen, and returns the
// best structure visited. With tabu_capacity 0 it stops at the first local
// maximum. Ties within 1e-9 go to the first move in (kind, from, to) order.
SearchResult greedy_hill_climb(const Dag& initial, const SearchConfig& cfg, Scorer& scorer);

// Tab-delimited: step, move, from, to, delta, score_per_instance, stats.
void write_trace(std::ostream& out, const std::vector<TraceRow>& trace, const std::vector<VariableDecl>& variables,
                 std::size_t rows);

} // namespace sparsecand
