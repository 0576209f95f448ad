#include "sparsecand/network.hpp"

#include "sparsecand/contingency.hpp"
#include "sparsecand/error.hpp"
#include "sparsecand/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace sparsecand {

BayesianNetwork::BayesianNetwork(std::vector<VariableDecl> variables, std::vector<Cpt> cpts)
    : variables_(std::move(variables)), cpts_(std::move(cpts)) {
    const std::size_t n = variables_.size();
    if (cpts_.size() != n) throw std::invalid_argument("one CPT per variable required");
    std::set<std::string> names;
    for (const auto& v : variables_) {
        if (v.cardinality() < 2) throw std::invalid_argument("variable '" + v.name + "' needs at least two states");
        if (!names.insert(v.name).second) throw std::invalid_argument("duplicate variable '" + v.name + "'");
        std::set<std::string> states(v.states.begin(), v.states.end());
        if (states.size() != v.states.size()) throw std::invalid_argument("duplicate state in '" + v.name + "'");
    }
    ParentSets parents(n);
    multipliers_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        const auto& ps = cpts_[v].parents;
        std::size_t configs = 1;
        multipliers_[v].assign(ps.size(), 1);
        for (std::size_t k = ps.size(); k-- > 0;) {
            if (ps[k] < 0 || static_cast<std::size_t>(ps[k]) >= n) throw std::invalid_argument("parent index out of range");
            multipliers_[v][k] = configs;
            configs *= variables_[ps[k]].cardinality();
        }
        parents[v] = ps;
        const std::size_t r = variables_[v].cardinality();
        if (cpts_[v].table.size() != configs * r) {
            throw std::invalid_argument("CPT of '" + variables_[v].name + "' has wrong shape");
        }
        for (std::size_t c = 0; c < configs; ++c) {
            double sum = 0.0;
            for (std::size_t x = 0; x < r; ++x) {
                double p = cpts_[v].table[c * r + x];
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw std::invalid_argument("CPT entry of '" + variables_[v].name + "' outside [0,1]");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw std::invalid_argument("CPT row of '" + variables_[v].name + "' does not sum to 1");
            }
        }
    }
    dag_ = Dag(std::move(parents)); // validates duplicates, self-loops, cycles
    order_ = dag_.topological_order();
}

std::size_t BayesianNetwork::config_index(int v, std::span<const State> assignment) const {
    const auto& ps = cpts_[v].parents;
    const auto& mult = multipliers_[v];
    std::size_t c = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) c += assignment[ps[k]] * mult[k];
    return c;
}

std::span<const double> BayesianNetwork::row(int v, std::size_t config) const {
    const std::size_t r = cardinality(v);
    return {cpts_[v].table.data() + config * r, r};
}

double BayesianNetwork::prob(int v, std::span<const State> assignment) const {
    return row(v, config_index(v, assignment))[assignment[v]];
}

double BayesianNetwork::log2_prob(std::span<const State> assignment) const {
    double lp = 0.0;
    for (std::size_t v = 0; v < size(); ++v) lp += std::log2(prob(static_cast<int>(v), assignment));
    return lp;
}

bool BayesianNetwork::same_cpts(const BayesianNetwork& o, double tol) const {
    if (variables_ != o.variables_ || cpts_.size() != o.cpts_.size()) return false;
    for (std::size_t v = 0; v < cpts_.size(); ++v) {
        if (cpts_[v].parents != o.cpts_[v].parents || cpts_[v].table.size() != o.cpts_[v].table.size()) return false;
        for (std::size_t e = 0; e < cpts_[v].table.size(); ++e) {
            if (std::abs(cpts_[v].table[e] - o.cpts_[v].table[e]) > tol) return false;
        }
    }
    return true;
}

BayesianNetwork fit_parameters(const Dag& dag, StatsCache& stats, double smoothing) {
    if (smoothing < 0) throw std::invalid_argument("smoothing must be non-negative");
    const Dataset& data = stats.data();
    if (dag.size() != data.num_variables()) throw std::invalid_argument("structure and dataset sizes differ");
    std::vector<Cpt> cpts(dag.size());
    for (std::size_t v = 0; v < dag.size(); ++v) {
        const int child = static_cast<int>(v);
        const auto& ps = dag.parents(child);
        std::vector<int> scope = ps;
        scope.push_back(child);
        const ContingencyTable& t = stats.counts(scope);
        const std::size_t r = data.cardinality(v);
        const std::size_t q = t.size() / r;
        std::vector<double> counts(q * r, 0.0);
        for_each_family_cell(t, child, [&](std::size_t pa, std::size_t x, Count n) {
            counts[pa * r + x] = static_cast<double>(n);
        });
        const double alpha = smoothing / static_cast<double>(r * q);
        Cpt& cpt = cpts[v];
        cpt.parents = ps;
        cpt.table.assign(q * r, 0.0);
        for (std::size_t pa = 0; pa < q; ++pa) {
            double n_pa = 0.0;
            for (std::size_t x = 0; x < r; ++x) n_pa += counts[pa * r + x];
            const double denom = n_pa + alpha * static_cast<double>(r);
            for (std::size_t x = 0; x < r; ++x) {
                cpt.table[pa * r + x] = denom > 0 ? (counts[pa * r + x] + alpha) / denom : 1.0 / static_cast<double>(r);
            }
        }
    }
    return BayesianNetwork(data.variables(), std::move(cpts));
}

namespace {

std::size_t sample_row(std::span<const double> row, double u) {
    double acc = 0.0;
    for (std::size_t x = 0; x + 1 < row.size(); ++x) {
        acc += row[x];
        if (u < acc) return x;
    }
    // Skip trailing zero-probability states when rounding leaves u >= acc.
    std::size_t x = row.size() - 1;
    while (x > 0 && row[x] == 0.0) --x;
    return x;
}

void draw(const BayesianNetwork& b, Rng& rng, std::vector<State>& assignment) {
    for (int v : b.topological_order()) {
        auto r = b.row(v, b.config_index(v, assignment));
        assignment[v] = static_cast<State>(sample_row(r, rng.uniform()));
    }
}

// Depth-first enumeration of all assignments to `vars` (topologically ordered,
// ancestrally closed), calling f(assignment, probability) at the leaves.
template <typename F>
void enumerate(const BayesianNetwork& b, const std::vector<int>& vars, std::vector<State>& assignment,
               std::size_t depth, double p, F& f) {
    if (depth == vars.size()) {
        f(assignment, p);
        return;
    }
    const int v = vars[depth];
    auto r = b.row(v, b.config_index(v, assignment));
    for (std::size_t x = 0; x < r.size(); ++x) {
        if (r[x] == 0.0) continue;
        assignment[v] = static_cast<State>(x);
        enumerate(b, vars, assignment, depth + 1, p * r[x], f);
    }
    assignment[v] = 0;
}

void check_compatible(const std::vector<VariableDecl>& a, const std::vector<VariableDecl>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("variable sets differ in size");
    for (std::size_t v = 0; v < a.size(); ++v) {
        if (a[v].name != b[v].name || a[v].cardinality() != b[v].cardinality()) {
            throw std::invalid_argument("variable mismatch at index " + std::to_string(v));
        }
    }
}

} // namespace

Dataset forward_sample(const BayesianNetwork& b, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("sample count must be positive");
    Dataset data(b.variables(), m);
    Rng rng(seed);
    std::vector<State> assignment(b.size(), 0);
    for (std::size_t row = 0; row < m; ++row) {
        draw(b, rng, assignment);
        for (std::size_t v = 0; v < b.size(); ++v) data.set(row, v, assignment[v]);
    }
    return data;
}

JointTable JointTable::transposed() const {
    JointTable t{cols, rows, std::vector<double>(p.size())};
    for (std::size_t a = 0; a < rows; ++a) {
        for (std::size_t c = 0; c < cols; ++c) t.p[c * rows + a] = p[a * cols + c];
    }
    return t;
}

std::size_t assignment_count(const BayesianNetwork& b, std::span<const int> vars) {
    std::size_t cells = 1;
    for (int v : vars) {
        const std::size_t c = b.cardinality(v);
        if (cells > std::numeric_limits<std::size_t>::max() / c) return std::numeric_limits<std::size_t>::max();
        cells *= c;
    }
    return cells;
}

std::vector<int> ancestral_set(const BayesianNetwork& b, std::span<const int> vars) {
    std::vector<char> in(b.size(), 0);
    std::vector<int> stack(vars.begin(), vars.end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (in[v]) continue;
        in[v] = 1;
        for (int p : b.cpt(v).parents) stack.push_back(p);
    }
    std::vector<int> out;
    for (int v : b.topological_order()) {
        if (in[v]) out.push_back(v);
    }
    return out;
}

JointTable exact_pairwise_joint(const BayesianNetwork& b, int i, int j, std::size_t max_cells) {
    if (i == j) throw std::invalid_argument("pairwise joint needs two distinct variables");
    const int pair[2] = {i, j};
    auto vars = ancestral_set(b, pair);
    const std::size_t cells = assignment_count(b, vars);
    if (cells > max_cells) {
        throw LimitError("exact joint over " + std::to_string(vars.size()) + " variables needs " +
                         std::to_string(cells) + " assignments, limit is " + std::to_string(max_cells));
    }
    JointTable out{b.cardinality(i), b.cardinality(j), {}};
    out.p.assign(out.rows * out.cols, 0.0);
    std::vector<State> assignment(b.size(), 0);
    auto acc = [&](const std::vector<State>& a, double p) { out.p[a[i] * out.cols + a[j]] += p; };
    enumerate(b, vars, assignment, 0, 1.0, acc);
    return out;
}

std::size_t PairwiseJoints::index(int i, int j) const {
    const std::size_t a = static_cast<std::size_t>(i), c = static_cast<std::size_t>(j);
    return a * (2 * n_ - a - 1) / 2 + (c - a - 1);
}

JointTable PairwiseJoints::get(int i, int j) const {
    if (i == j) throw std::invalid_argument("pairwise joint needs two distinct variables");
    return i < j ? tables_[index(i, j)] : tables_[index(j, i)].transposed();
}

JointTable& PairwiseJoints::slot(int i, int j) { return tables_[index(i, j)]; }

PairwiseJoints mc_pairwise_joints(const BayesianNetwork& b, std::size_t m, std::uint64_t seed) {
    const Dataset sample = forward_sample(b, m, seed);
    const int n = static_cast<int>(b.size());
    PairwiseJoints out(b.size());
    const double w = 1.0 / static_cast<double>(m);
    for (int i = 0; i < n; ++i) {
        auto ci = sample.column(i);
        for (int j = i + 1; j < n; ++j) {
            auto cj = sample.column(j);
            JointTable& t = out.slot(i, j);
            t.rows = b.cardinality(i);
            t.cols = b.cardinality(j);
            t.p.assign(t.rows * t.cols, 0.0);
            for (std::size_t r = 0; r < m; ++r) t.p[ci[r] * t.cols + cj[r]] += w;
        }
    }
    return out;
}

double log_likelihood(const BayesianNetwork& b, const Dataset& data) {
    if (b.variables() != data.variables()) throw std::invalid_argument("dataset variables differ from the network's");
    std::vector<State> assignment(b.size());
    double ll = 0.0;
    for (std::size_t row = 0; row < data.num_rows(); ++row) {
        for (std::size_t v = 0; v < b.size(); ++v) assignment[v] = data.at(row, v);
        ll += b.log2_prob(assignment);
    }
    return ll;
}

KlEstimate kl_to_reference(const BayesianNetwork& p, const BayesianNetwork& q, std::size_t m, std::uint64_t seed,
                           KlMode mode, std::size_t max_cells) {
    check_compatible(p.variables(), q.variables());
    const auto& all = p.topological_order();
    const std::size_t cells = assignment_count(p, all);
    const bool exact = mode == KlMode::Exact || (mode == KlMode::Auto && cells <= max_cells);
    KlEstimate est;
    if (exact) {
        if (cells > max_cells) throw LimitError("joint too large for exact KL: " + std::to_string(cells) + " assignments");
        std::vector<State> assignment(p.size(), 0);
        double kl = 0.0;
        auto acc = [&](const std::vector<State>& a, double pp) {
            const double lq = q.log2_prob(a);
            if (std::isinf(lq)) throw std::domain_error("reference assigns zero probability where the other network does not");
            kl += pp * (p.log2_prob(a) - lq);
        };
        enumerate(p, all, assignment, 0, 1.0, acc);
        est.value = std::max(kl, 0.0);
        est.exact = true;
        return est;
    }
    if (m == 0) throw std::invalid_argument("sample count must be positive");
    Rng rng(seed);
    std::vector<State> assignment(p.size(), 0);
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        draw(p, rng, assignment);
        sum += p.log2_prob(assignment) - q.log2_prob(assignment);
    }
    est.value = sum / static_cast<double>(m);
    est.samples = m;
    est.seed = seed;
    return est;
}

} // namespace sparsecand
