#pragma once

#include "sparsecand/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sparsecand {

using Count = std::uint64_t;

// Joint counts over an ordered scope of variables. Dense, row-major with the
// last scope variable varying fastest.
class ContingencyTable {
public:
    ContingencyTable() = default;
    ContingencyTable(std::vector<int> scope, std::vector<std::size_t> dims);

    const std::vector<int>& scope() const { return scope_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t arity() const { return scope_.size(); }
    std::size_t size() const { return counts_.size(); }
    Count total() const { return total_; }

    std::span<const Count> counts() const { return counts_; }
    Count operator[](std::size_t flat) const { return counts_[flat]; }
    void add(std::size_t flat, Count c) {
        counts_[flat] += c;
        total_ += c;
    }

    std::size_t stride(std::size_t axis) const { return strides_[axis]; }
    // Axis position of `var` in the scope; throws std::invalid_argument when absent.
    std::size_t axis_of(int var) const;
    Count at(std::span<const std::size_t> states) const;

    bool operator==(const ContingencyTable& o) const {
        return scope_ == o.scope_ && dims_ == o.dims_ && counts_ == o.counts_;
    }

private:
    std::vector<int> scope_;
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::vector<Count> counts_;
    Count total_ = 0;
};

// Product of the cardinalities of `scope`, saturating at SIZE_MAX.
std::size_t table_cells(const Dataset& data, std::span<const int> scope);

// One pass over the data. The table's axes follow `scope` as given.
ContingencyTable count_table(const Dataset& data, std::span<const int> scope);

// Sums out every variable not in `keep`. The result keeps the relative axis
// order of `t`. Throws std::invalid_argument if keep is empty or not a subset.
ContingencyTable marginalize_table(const ContingencyTable& t, std::span<const int> keep);

// Visits every cell of a family table as f(parent_config, child_state, count).
// Parent configurations are numbered over the non-child axes in table order,
// last axis fastest.
template <typename F>
void for_each_family_cell(const ContingencyTable& t, int child, F&& f) {
    const std::size_t axis = t.axis_of(child);
    const std::size_t r = t.dims()[axis];
    const std::size_t low_span = t.stride(axis);
    const std::size_t block = r * low_span;
    const std::size_t high_span = t.size() / block;
    for (std::size_t high = 0; high < high_span; ++high) {
        for (std::size_t low = 0; low < low_span; ++low) {
            const std::size_t pa = high * low_span + low;
            for (std::size_t x = 0; x < r; ++x) f(pa, x, t[high * block + x * low_span + low]);
        }
    }
}

} // namespace sparsecand
