#include "sparsecand/stats_cache.hpp"

#include "sparsecand/error.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace sparsecand {

StatsCache::StatsCache(const Dataset& data, CacheLimits limits)
    : data_(data), limits_(limits), by_variable_(data.num_variables()) {}

const ContingencyTable& StatsCache::counts(std::span<const int> scope) {
    if (scope.empty()) throw std::invalid_argument("counts: empty scope");
    std::vector<int> key(scope.begin(), scope.end());
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    for (int v : key) {
        if (v < 0 || static_cast<std::size_t>(v) >= data_.num_variables()) {
            throw std::invalid_argument("counts: variable index " + std::to_string(v) + " out of range");
        }
    }

    std::lock_guard lock(mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) {
        ++report_.hits;
        return it->second;
    }

    const std::size_t cells = table_cells(data_, key);
    if (cells > limits_.max_table_cells) {
        throw LimitError("table over " + std::to_string(key.size()) + " variables needs " +
                         std::to_string(cells) + " cells, limit is " + std::to_string(limits_.max_table_cells));
    }
    if (limits_.max_total_cells && total_cells_ + cells > limits_.max_total_cells) {
        throw LimitError("statistics cache memory limit of " + std::to_string(limits_.max_total_cells) +
                         " cells exceeded");
    }

    // Smallest cached superset, searched through the rarest member's entries.
    const int rarest = *std::min_element(key.begin(), key.end(), [&](int a, int b) {
        return by_variable_[a].size() < by_variable_[b].size();
    });
    const auto& pool = by_variable_[rarest];
    const ContingencyTable* best = nullptr;
    for (const ContingencyTable* t : pool) {
        if (t->arity() <= key.size()) continue;
        if (!std::includes(t->scope().begin(), t->scope().end(), key.begin(), key.end())) continue;
        if (!best || t->size() < best->size()) best = t;
    }

    ContingencyTable table;
    if (best) {
        table = marginalize_table(*best, key);
        ++report_.marginalizations;
    } else {
        table = count_table(data_, key);
        ++report_.fresh_computations;
    }
    total_cells_ += cells;
    auto [it, inserted] = tables_.emplace(key, std::move(table));
    for (int v : key) by_variable_[v].push_back(&it->second);
    return it->second;
}

CacheReport StatsCache::report() const {
    std::lock_guard lock(mutex_);
    return report_;
}

std::size_t StatsCache::entries() const {
    std::lock_guard lock(mutex_);
    return tables_.size();
}

std::size_t StatsCache::cached_cells() const {
    std::lock_guard lock(mutex_);
    return total_cells_;
}

} // namespace sparsecand
