#pragma once

#include "sparsecand/contingency.hpp"
#include "sparsecand/dataset.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace sparsecand {

struct CacheReport {
    std::uint64_t fresh_computations = 0; // tables built by a pass over the data
    std::uint64_t marginalizations = 0;   // tables derived from a cached superset
    std::uint64_t hits = 0;
};

struct CacheLimits {
    std::size_t max_table_cells = std::size_t{1} << 24;
    std::size_t max_total_cells = 0; // 0: unlimited
};

// Joint-count cache keyed by sorted scope. A request is answered from an exact
// entry, else by marginalizing the smallest cached superset, else by a fresh
// pass. Only fresh passes count as collected statistics. Entries are never
// evicted; exceeding a limit throws LimitError.
class StatsCache {
public:
    explicit StatsCache(const Dataset& data, CacheLimits limits = {});

    StatsCache(const StatsCache&) = delete;
    StatsCache& operator=(const StatsCache&) = delete;

    const Dataset& data() const { return data_; }

    // Table over the sorted, deduplicated scope. The reference stays valid for
    // the lifetime of the cache.
    const ContingencyTable& counts(std::span<const int> scope);

    CacheReport report() const;
    std::size_t entries() const;
    std::size_t cached_cells() const;

private:
    const Dataset& data_;
    CacheLimits limits_;
    mutable std::mutex mutex_;
    std::map<std::vector<int>, ContingencyTable> tables_;
    std::vector<std::vector<const ContingencyTable*>> by_variable_;
    CacheReport report_;
    std::size_t total_cells_ = 0;
};

} // namespace sparsecand
