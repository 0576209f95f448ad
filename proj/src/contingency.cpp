#include "sparsecand/contingency.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace sparsecand {

ContingencyTable::ContingencyTable(std::vector<int> scope, std::vector<std::size_t> dims)
    : scope_(std::move(scope)), dims_(std::move(dims)) {
    if (scope_.size() != dims_.size()) throw std::invalid_argument("scope and dims differ in length");
    strides_.assign(dims_.size(), 1);
    std::size_t cells = 1;
    for (std::size_t a = dims_.size(); a-- > 0;) {
        strides_[a] = cells;
        cells *= dims_[a];
    }
    counts_.assign(cells, 0);
}

std::size_t ContingencyTable::axis_of(int var) const {
    auto it = std::find(scope_.begin(), scope_.end(), var);
    if (it == scope_.end()) throw std::invalid_argument("variable " + std::to_string(var) + " not in table scope");
    return static_cast<std::size_t>(it - scope_.begin());
}

Count ContingencyTable::at(std::span<const std::size_t> states) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < states.size(); ++a) flat += states[a] * strides_[a];
    return counts_[flat];
}

std::size_t table_cells(const Dataset& data, std::span<const int> scope) {
    std::size_t cells = 1;
    for (int v : scope) {
        std::size_t c = data.cardinality(static_cast<std::size_t>(v));
        if (cells > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
        cells *= c;
    }
    return cells;
}

ContingencyTable count_table(const Dataset& data, std::span<const int> scope) {
    std::vector<std::size_t> dims;
    for (int v : scope) {
        if (v < 0 || static_cast<std::size_t>(v) >= data.num_variables()) {
            throw std::invalid_argument("variable index " + std::to_string(v) + " out of range");
        }
        dims.push_back(data.cardinality(static_cast<std::size_t>(v)));
    }
    ContingencyTable t(std::vector<int>(scope.begin(), scope.end()), std::move(dims));
    const std::size_t rows = data.num_rows();
    std::vector<std::size_t> flat(rows, 0);
    for (std::size_t a = 0; a < scope.size(); ++a) {
        auto col = data.column(static_cast<std::size_t>(scope[a]));
        const std::size_t stride = t.stride(a);
        for (std::size_t r = 0; r < rows; ++r) flat[r] += col[r] * stride;
    }
    for (std::size_t r = 0; r < rows; ++r) t.add(flat[r], 1);
    return t;
}

ContingencyTable marginalize_table(const ContingencyTable& t, std::span<const int> keep) {
    if (keep.empty()) throw std::invalid_argument("marginalize: empty keep set");
    std::vector<bool> kept(t.arity(), false);
    for (int v : keep) {
        auto it = std::find(t.scope().begin(), t.scope().end(), v);
        if (it == t.scope().end()) throw std::invalid_argument("marginalize: keep set is not a subset of the scope");
        kept[static_cast<std::size_t>(it - t.scope().begin())] = true;
    }
    std::vector<int> scope;
    std::vector<std::size_t> dims;
    for (std::size_t a = 0; a < t.arity(); ++a) {
        if (kept[a]) {
            scope.push_back(t.scope()[a]);
            dims.push_back(t.dims()[a]);
        }
    }
    ContingencyTable out(std::move(scope), std::move(dims));
    // Destination stride for each source axis (0 when summed out).
    std::vector<std::size_t> dest_stride(t.arity(), 0);
    for (std::size_t a = 0, b = 0; a < t.arity(); ++a) {
        if (kept[a]) dest_stride[a] = out.stride(b++);
    }
    std::vector<std::size_t> state(t.arity(), 0);
    std::size_t dest = 0;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        if (t[flat]) out.add(dest, t[flat]);
        for (std::size_t a = t.arity(); a-- > 0;) {
            if (++state[a] < t.dims()[a]) {
                dest += dest_stride[a];
                break;
            }
            dest -= (state[a] - 1) * dest_stride[a];
            state[a] = 0;
        }
    }
    return out;
}

} // namespace sparsecand
