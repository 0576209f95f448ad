#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sparsecand {

using State = std::uint16_t;

struct VariableDecl {
    std::string name;
    std::vector<std::string> states;

    std::size_t cardinality() const { return states.size(); }
    bool operator==(const VariableDecl&) const = default;
};

// Complete discrete instances. Cells are stored column-major so that a
// counting pass over a handful of variables touches contiguous memory.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<VariableDecl> variables, std::size_t rows);

    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_rows() const { return rows_; }
    const std::vector<VariableDecl>& variables() const { return variables_; }
    const VariableDecl& variable(std::size_t v) const { return variables_[v]; }
    std::size_t cardinality(std::size_t v) const { return variables_[v].cardinality(); }

    State at(std::size_t row, std::size_t v) const { return cells_[v * rows_ + row]; }
    void set(std::size_t row, std::size_t v, State s);

    std::span<const State> column(std::size_t v) const {
        return {cells_.data() + v * rows_, rows_};
    }

    // Index of the variable called `name`, or -1.
    int find(const std::string& name) const;

private:
    std::vector<VariableDecl> variables_;
    std::size_t rows_ = 0;
    std::vector<State> cells_;
};

// Parses the delimited text format: header of variable names, one instance per
// line, `#` comment lines and blank lines skipped. State labels per column are
// the sorted set of labels observed. Throws ParseError.
Dataset load_dataset(std::istream& in);
Dataset load_dataset_file(const std::string& path);

// Tab-delimited output that load_dataset reads back to an equal Dataset
// (provided every declared state occurs at least once).
void write_dataset(std::ostream& out, const Dataset& data);

// Re-indexes `data` against a declared schema: same variable names in the same
// order, each observed label must be one of the declared states. Used when a
// dataset has to line up with an existing network's state lists.
Dataset align_dataset(const Dataset& data, const std::vector<VariableDecl>& schema);

} // namespace sparsecand
