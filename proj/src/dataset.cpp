#include "sparsecand/dataset.hpp"

#include "sparsecand/error.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace sparsecand {

Dataset::Dataset(std::vector<VariableDecl> variables, std::size_t rows)
    : variables_(std::move(variables)), rows_(rows), cells_(variables_.size() * rows, 0) {}

void Dataset::set(std::size_t row, std::size_t v, State s) {
    if (s >= variables_[v].cardinality()) {
        throw std::out_of_range("state index out of range for variable " + variables_[v].name);
    }
    cells_[v * rows_ + row] = s;
}

int Dataset::find(const std::string& name) const {
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (variables_[v].name == name) return static_cast<int>(v);
    }
    return -1;
}

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

} // namespace

Dataset load_dataset(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> names;
    char delim = '\t';
    std::size_t header_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        delim = line.find('\t') != std::string::npos ? '\t' : ',';
        names = split(line, delim);
        header_line = line_no;
        break;
    }
    if (names.empty()) throw ParseError("missing header", line_no);

    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw ParseError("empty variable name", header_line);
        if (!seen.insert(n).second) throw ParseError("duplicate variable name '" + n + "'", header_line);
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, delim);
        if (fields.size() != names.size()) throw ParseError("row arity mismatch", line_no);
        for (const auto& f : fields) {
            if (f.empty()) throw ParseError("missing value", line_no);
        }
        rows.push_back(std::move(fields));
        row_lines.push_back(line_no);
    }
    if (rows.empty()) throw ParseError("empty data section", line_no);

    const std::size_t n = names.size();
    std::vector<VariableDecl> vars(n);
    std::vector<std::unordered_map<std::string, State>> index(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::set<std::string> labels;
        for (const auto& r : rows) labels.insert(r[v]);
        if (labels.size() < 2) {
            throw ParseError("variable '" + names[v] + "' has a single observed state", row_lines.back());
        }
        if (labels.size() > std::numeric_limits<State>::max()) {
            throw ParseError("variable '" + names[v] + "' has too many states", row_lines.back());
        }
        vars[v].name = names[v];
        vars[v].states.assign(labels.begin(), labels.end());
        for (std::size_t s = 0; s < vars[v].states.size(); ++s) {
            index[v].emplace(vars[v].states[s], static_cast<State>(s));
        }
    }

    Dataset data(std::move(vars), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t v = 0; v < n; ++v) data.set(r, v, index[v].at(rows[r][v]));
    }
    return data;
}

Dataset load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset file '" + path + "'");
    return load_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    const std::size_t n = data.num_variables();
    for (std::size_t v = 0; v < n; ++v) {
        if (v) out << '\t';
        out << data.variable(v).name;
    }
    out << '\n';
    for (std::size_t r = 0; r < data.num_rows(); ++r) {
        for (std::size_t v = 0; v < n; ++v) {
            if (v) out << '\t';
            out << data.variable(v).states[data.at(r, v)];
        }
        out << '\n';
    }
}

Dataset align_dataset(const Dataset& data, const std::vector<VariableDecl>& schema) {
    if (schema.size() != data.num_variables()) {
        throw ParseError("dataset has " + std::to_string(data.num_variables()) +
                         " variables, schema has " + std::to_string(schema.size()));
    }
    Dataset out(schema, data.num_rows());
    for (std::size_t v = 0; v < schema.size(); ++v) {
        int src = data.find(schema[v].name);
        if (src < 0) throw ParseError("variable '" + schema[v].name + "' missing from dataset");
        std::map<std::string, State> idx;
        for (std::size_t s = 0; s < schema[v].states.size(); ++s) idx[schema[v].states[s]] = static_cast<State>(s);
        std::vector<State> remap(data.cardinality(src));
        for (std::size_t s = 0; s < remap.size(); ++s) {
            auto it = idx.find(data.variable(src).states[s]);
            if (it == idx.end()) {
                throw ParseError("state '" + data.variable(src).states[s] + "' of variable '" +
                                 schema[v].name + "' is not declared");
            }
            remap[s] = it->second;
        }
        auto col = data.column(src);
        for (std::size_t r = 0; r < data.num_rows(); ++r) out.set(r, v, remap[col[r]]);
    }
    return out;
}

} // namespace sparsecand
