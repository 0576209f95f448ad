#include "sparsecand/error.hpp"
#include "sparsecand/network.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sparsecand {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double parse_prob(const std::string& tok, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("invalid probability '" + tok + "'", line);
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct PendingCpt {
    bool has_parents = false;
    std::size_t parents_line = 0;
    std::vector<std::string> parent_names;
    std::vector<std::pair<std::size_t, std::vector<double>>> rows; // (line, row)
};

} // namespace

BayesianNetwork read_network(std::istream& in) {
    std::vector<VariableDecl> vars;
    std::map<std::string, int> index;
    std::vector<PendingCpt> pending;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tok = tokenize(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        const std::string& kind = tok[0];
        if (tok.size() < 2) throw ParseError("record '" + kind + "' without a variable name", line_no);
        const std::string& name = tok[1];
        if (kind == "var") {
            if (index.count(name)) throw ParseError("duplicate variable '" + name + "'", line_no);
            VariableDecl d{name, std::vector<std::string>(tok.begin() + 2, tok.end())};
            if (d.cardinality() < 2) throw ParseError("variable '" + name + "' needs at least two states", line_no);
            std::map<std::string, int> seen;
            for (const auto& s : d.states) {
                if (seen[s]++) throw ParseError("duplicate state '" + s + "' of '" + name + "'", line_no);
            }
            index[name] = static_cast<int>(vars.size());
            vars.push_back(std::move(d));
            pending.emplace_back();
            continue;
        }
        auto it = index.find(name);
        if (it == index.end()) throw ParseError("unknown variable '" + name + "'", line_no);
        PendingCpt& pc = pending[it->second];
        if (kind == "parents") {
            if (pc.has_parents) throw ParseError("second parents record for '" + name + "'", line_no);
            pc.has_parents = true;
            pc.parents_line = line_no;
            pc.parent_names.assign(tok.begin() + 2, tok.end());
        } else if (kind == "cpt") {
            std::vector<double> row;
            for (std::size_t k = 2; k < tok.size(); ++k) row.push_back(parse_prob(tok[k], line_no));
            pc.rows.emplace_back(line_no, std::move(row));
        } else {
            throw ParseError("unknown record type '" + kind + "'", line_no);
        }
    }
    if (vars.empty()) throw ParseError("network declares no variables", line_no);

    std::vector<Cpt> cpts(vars.size());
    for (std::size_t v = 0; v < vars.size(); ++v) {
        PendingCpt& pc = pending[v];
        if (!pc.has_parents) throw ParseError("missing parents record for '" + vars[v].name + "'", line_no);
        std::size_t configs = 1;
        for (const auto& pn : pc.parent_names) {
            auto it = index.find(pn);
            if (it == index.end()) throw ParseError("unknown parent '" + pn + "'", pc.parents_line);
            cpts[v].parents.push_back(it->second);
            configs *= vars[it->second].cardinality();
        }
        if (pc.rows.size() != configs) {
            throw ParseError("'" + vars[v].name + "' has " + std::to_string(pc.rows.size()) + " cpt rows, expected " +
                                 std::to_string(configs),
                             pc.rows.empty() ? pc.parents_line : pc.rows.back().first);
        }
        const std::size_t r = vars[v].cardinality();
        for (auto& [ln, row] : pc.rows) {
            if (row.size() != r) throw ParseError("cpt row of '" + vars[v].name + "' has wrong length", ln);
            double sum = 0.0;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0)) throw ParseError("probability outside [0,1]", ln);
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-6) throw ParseError("cpt row does not sum to 1", ln);
            if (std::abs(sum - 1.0) > 1e-9) {
                for (double& p : row) p /= sum;
            }
            cpts[v].table.insert(cpts[v].table.end(), row.begin(), row.end());
        }
    }
    try {
        return BayesianNetwork(std::move(vars), std::move(cpts));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
    }
}

BayesianNetwork read_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file '" + path + "'");
    return read_network(in);
}

void write_network(std::ostream& out, const BayesianNetwork& b) {
    for (const auto& v : b.variables()) {
        out << "var " << v.name;
        for (const auto& s : v.states) out << ' ' << s;
        out << '\n';
    }
    for (std::size_t v = 0; v < b.size(); ++v) {
        const int iv = static_cast<int>(v);
        const auto& name = b.variable(iv).name;
        out << "parents " << name;
        for (int p : b.cpt(iv).parents) out << ' ' << b.variable(p).name;
        out << '\n';
        for (std::size_t c = 0; c < b.num_configs(iv); ++c) {
            out << "cpt " << name;
            for (double p : b.row(iv, c)) out << ' ' << format_double(p);
            out << '\n';
        }
    }
}

} // namespace sparsecand
