#include "sparsecand/dag.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparsecand {

Dag::Dag(ParentSets parents) : parents_(std::move(parents)) {
    const int n = static_cast<int>(parents_.size());
    for (int v = 0; v < n; ++v) {
        auto& ps = parents_[v];
        std::sort(ps.begin(), ps.end());
        if (std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
            throw std::invalid_argument("duplicate parent of vertex " + std::to_string(v));
        }
        for (int p : ps) {
            if (p < 0 || p >= n) throw std::invalid_argument("parent index out of range");
            if (p == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(v));
        }
    }
    if (!is_acyclic(parents_)) throw std::invalid_argument("parent sets contain a cycle");
}

void Dag::check_vertex(int v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= parents_.size()) {
        throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
    }
}

std::size_t Dag::num_edges() const {
    std::size_t e = 0;
    for (const auto& ps : parents_) e += ps.size();
    return e;
}

bool Dag::has_edge(int from, int to) const {
    check_vertex(from);
    check_vertex(to);
    const auto& ps = parents_[to];
    return std::binary_search(ps.begin(), ps.end(), from);
}

bool Dag::reaches(int from, int to) const {
    check_vertex(from);
    check_vertex(to);
    // Walk parent links backwards from `to`.
    std::vector<char> seen(parents_.size(), 0);
    std::vector<int> stack(parents_[to].begin(), parents_[to].end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == from) return true;
        if (seen[v]) continue;
        seen[v] = 1;
        for (int p : parents_[v]) {
            if (!seen[p]) stack.push_back(p);
        }
    }
    return false;
}

void Dag::add_edge(int from, int to) {
    check_vertex(from);
    check_vertex(to);
    if (from == to) throw std::invalid_argument("self-loop");
    if (has_edge(from, to)) throw std::invalid_argument("arc already present");
    if (reaches(to, from)) throw std::invalid_argument("arc would create a cycle");
    auto& ps = parents_[to];
    ps.insert(std::lower_bound(ps.begin(), ps.end(), from), from);
}

void Dag::remove_edge(int from, int to) {
    if (!has_edge(from, to)) throw std::invalid_argument("arc not present");
    auto& ps = parents_[to];
    ps.erase(std::lower_bound(ps.begin(), ps.end(), from));
}

void Dag::reverse_edge(int from, int to) {
    remove_edge(from, to);
    if (reaches(from, to)) {
        auto& ps = parents_[to];
        ps.insert(std::lower_bound(ps.begin(), ps.end(), from), from);
        throw std::invalid_argument("reversal would create a cycle");
    }
    auto& ps = parents_[from];
    ps.insert(std::lower_bound(ps.begin(), ps.end(), to), to);
}

void Dag::set_parents(int v, std::vector<int> parents) {
    check_vertex(v);
    ParentSets next = parents_;
    next[v] = std::move(parents);
    *this = Dag(std::move(next));
}

std::vector<int> Dag::topological_order() const {
    const std::size_t n = parents_.size();
    std::vector<std::size_t> indeg(n);
    auto kids = children();
    for (std::size_t v = 0; v < n; ++v) indeg[v] = parents_[v].size();
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> ready;
    for (std::size_t v = n; v-- > 0;) {
        if (!indeg[v]) ready.push_back(static_cast<int>(v));
    }
    // Smallest ready index first, for a canonical order.
    while (!ready.empty()) {
        auto it = std::min_element(ready.begin(), ready.end());
        int v = *it;
        ready.erase(it);
        order.push_back(v);
        for (int c : kids[v]) {
            if (--indeg[c] == 0) ready.push_back(c);
        }
    }
    return order;
}

ParentSets Dag::children() const {
    ParentSets kids(parents_.size());
    for (std::size_t v = 0; v < parents_.size(); ++v) {
        for (int p : parents_[v]) kids[p].push_back(static_cast<int>(v));
    }
    return kids;
}

bool is_acyclic(const ParentSets& parents) {
    const std::size_t n = parents.size();
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<char> state(n, 0);
    std::vector<std::pair<int, std::size_t>> stack;
    for (std::size_t root = 0; root < n; ++root) {
        if (state[root]) continue;
        stack.emplace_back(static_cast<int>(root), 0);
        state[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < parents[v].size()) {
                int p = parents[v][next++];
                if (state[p] == 1) return false;
                if (state[p] == 0) {
                    state[p] = 1;
                    stack.emplace_back(p, 0);
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return true;
}

std::string to_string(MoveKind kind) {
    switch (kind) {
    case MoveKind::Add: return "add";
    case MoveKind::Delete: return "delete";
    case MoveKind::Reverse: return "reverse";
    }
    return "?";
}

std::string to_string(const Move& m) {
    return to_string(m.kind) + " " + std::to_string(m.from) + "->" + std::to_string(m.to);
}

} // namespace sparsecand
