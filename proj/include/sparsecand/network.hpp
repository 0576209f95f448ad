#pragma once

#include "sparsecand/dag.hpp"
#include "sparsecand/dataset.hpp"
#include "sparsecand/stats_cache.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sparsecand {

// Conditional distributions of one variable: one row of `cardinality`
// probabilities per parent configuration. Configurations enumerate the parents
// in the listed order, last parent varying fastest.
struct Cpt {
    std::vector<int> parents;
    std::vector<double> table;
};

class BayesianNetwork {
public:
    BayesianNetwork() = default;
    // Validates shapes, acyclicity, and that each row is a distribution
    // (entries in [0,1], sum within 1e-9 of 1). Throws std::invalid_argument.
    BayesianNetwork(std::vector<VariableDecl> variables, std::vector<Cpt> cpts);

    std::size_t size() const { return variables_.size(); }
    const std::vector<VariableDecl>& variables() const { return variables_; }
    const VariableDecl& variable(int v) const { return variables_[static_cast<std::size_t>(v)]; }
    std::size_t cardinality(int v) const { return variables_[static_cast<std::size_t>(v)].cardinality(); }
    const Cpt& cpt(int v) const { return cpts_[static_cast<std::size_t>(v)]; }
    const Dag& dag() const { return dag_; }
    const std::vector<int>& topological_order() const { return order_; }

    std::size_t num_configs(int v) const { return cpts_[static_cast<std::size_t>(v)].table.size() / cardinality(v); }
    // Parent configuration of `v` under a full assignment.
    std::size_t config_index(int v, std::span<const State> assignment) const;
    std::span<const double> row(int v, std::size_t config) const;
    double prob(int v, std::span<const State> assignment) const;
    double log2_prob(std::span<const State> assignment) const;

    bool operator==(const BayesianNetwork& o) const {
        return variables_ == o.variables_ && dag_ == o.dag_ && same_cpts(o, 0.0);
    }
    // Same variables and structure, CPT entries within `tol`.
    bool same_cpts(const BayesianNetwork& o, double tol) const;

private:
    std::vector<VariableDecl> variables_;
    std::vector<Cpt> cpts_;
    Dag dag_;
    std::vector<int> order_;
    std::vector<std::vector<std::size_t>> multipliers_;
};

// theta_x|pa = (N_x,pa + a) / (N_pa + r a) with a = smoothing / (r q). With
// smoothing 0, unseen parent configurations get a uniform row.
BayesianNetwork fit_parameters(const Dag& dag, StatsCache& stats, double smoothing);

// Ancestral sampling in topological order, deterministic in `seed`.
Dataset forward_sample(const BayesianNetwork& b, std::size_t m, std::uint64_t seed);

// Probability table over Val(X_i) x Val(X_j), row-major.
struct JointTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> p;

    double at(std::size_t a, std::size_t b) const { return p[a * cols + b]; }
    JointTable transposed() const;
};

inline constexpr std::size_t kMaxEnumerationCells = std::size_t{1} << 22;

// Number of joint assignments of the given variables (saturating).
std::size_t assignment_count(const BayesianNetwork& b, std::span<const int> vars);
// Variables with a directed path into any of `vars`, plus `vars`; topologically ordered.
std::vector<int> ancestral_set(const BayesianNetwork& b, std::span<const int> vars);

// Exact P_B(X_i, X_j). Non-ancestors of {i, j} sum out to one, so the
// enumeration runs over the ancestral set only; it refuses (LimitError) when
// that set has more than `max_cells` joint assignments.
JointTable exact_pairwise_joint(const BayesianNetwork& b, int i, int j,
                                std::size_t max_cells = kMaxEnumerationCells);

// Pairwise tables for every unordered pair, from one shared sample.
class PairwiseJoints {
public:
    PairwiseJoints() = default;
    explicit PairwiseJoints(std::size_t n) : n_(n), tables_(n * (n > 0 ? n - 1 : 0) / 2) {}

    std::size_t size() const { return n_; }
    // Table with rows indexed by X_i; i != j.
    JointTable get(int i, int j) const;
    JointTable& slot(int i, int j); // requires i < j

private:
    std::size_t index(int i, int j) const;
    std::size_t n_ = 0;
    std::vector<JointTable> tables_;
};

// Empirical pairwise frequencies from `m` forward samples.
PairwiseJoints mc_pairwise_joints(const BayesianNetwork& b, std::size_t m = 1000, std::uint64_t seed = 0);

// Sum over instances of log2 P_B(instance). Throws std::invalid_argument when
// the dataset's variables differ from the network's.
double log_likelihood(const BayesianNetwork& b, const Dataset& data);

enum class KlMode { Auto, Exact, MonteCarlo };

struct KlEstimate {
    double value = 0.0;
    bool exact = false;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

// D_KL(P_p || P_q) in bits. Exact enumeration when requested or (Auto) when the
// joint has at most `max_cells` assignments; otherwise the Monte-Carlo mean of
// log2 P_p(x)/P_q(x) over m samples of p.
KlEstimate kl_to_reference(const BayesianNetwork& p, const BayesianNetwork& q, std::size_t m,
                           std::uint64_t seed, KlMode mode = KlMode::Auto,
                           std::size_t max_cells = kMaxEnumerationCells);

// Line-oriented text format (`var`, `parents`, `cpt` records). Probabilities
// are written in shortest round-trip form, so write -> read -> write is
// byte-identical. Rows read within 1e-6 of summing to one are renormalized
// when off by more than 1e-9. Throws ParseError.
BayesianNetwork read_network(std::istream& in);
BayesianNetwork read_network_file(const std::string& path);
void write_network(std::ostream& out, const BayesianNetwork& b);

} // namespace sparsecand
