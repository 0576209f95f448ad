#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace sparsecand {

using ParentSets = std::vector<std::vector<int>>;

// Acyclic digraph stored as sorted parent lists. Every mutator rejects
// self-loops, duplicate arcs and cycles with std::invalid_argument, leaving
// the graph unchanged.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::size_t n) : parents_(n) {}
    explicit Dag(ParentSets parents);

    std::size_t size() const { return parents_.size(); }
    const std::vector<int>& parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
    const ParentSets& parent_sets() const { return parents_; }
    std::size_t num_edges() const;

    bool has_edge(int from, int to) const;
    // True when a directed path (length >= 1) leads from `from` to `to`.
    bool reaches(int from, int to) const;

    void add_edge(int from, int to);
    void remove_edge(int from, int to);
    void reverse_edge(int from, int to);
    void set_parents(int v, std::vector<int> parents);

    std::vector<int> topological_order() const;
    ParentSets children() const;

    bool operator==(const Dag&) const = default;

private:
    void check_vertex(int v) const;
    ParentSets parents_;
};

bool is_acyclic(const ParentSets& parents);

enum class MoveKind { Add = 0, Delete = 1, Reverse = 2 };

// A single-arc change. For Delete and Reverse, (from, to) names the existing arc.
struct Move {
    MoveKind kind;
    int from;
    int to;

    auto operator<=>(const Move&) const = default;
};

std::string to_string(MoveKind kind);
std::string to_string(const Move& m);

} // namespace sparsecand
