#pragma once

#include "sparsecand/contingency.hpp"
#include "sparsecand/network.hpp"
#include "sparsecand/scoring.hpp"
#include "sparsecand/stats_cache.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace sparsecand {

enum class MeasureKind { Disc, Shield, Score };

// Per-variable candidate parents, each list sorted ascending.
using CandidateSets = std::vector<std::vector<int>>;

// All information quantities are in bits, with 0 log 0 = 0.

// I(X;Y) of a two-variable count table. Throws std::invalid_argument for other
// arities or an empty table.
double mutual_information(const ContingencyTable& t);
double mutual_information(const JointTable& p);
// I(X_var; rest of the scope), the rest treated as one joint variable.
double mutual_information_split(const ContingencyTable& t, int var);
// I(X;Y|Z) where Z is every other variable of the table's scope.
double conditional_mutual_information(const ContingencyTable& t, int x, int y);

// D_KL(p || q). Throws std::invalid_argument on a shape mismatch and
// std::domain_error where q is zero but p is not.
double kl_discrete(std::span<const double> p, std::span<const double> q);
double kl_discrete(const JointTable& p, const JointTable& q);

// Normalized P^(X_i, X_j) from counts; rows index X_i.
JointTable empirical_joint(const ContingencyTable& t, int i, int j);

enum class DiscMode { Auto, Exact, MonteCarlo };

struct DiscOptions {
    DiscMode mode = DiscMode::Auto;
    std::size_t mc_samples = 1000;
    std::uint64_t seed = 0;
    // Auto mode evaluates a pair exactly when its ancestral set has at most
    // this many joint assignments.
    std::size_t exact_limit = 4096;
};

// Pairwise P_B(X_i, X_j) source for the discrepancy measure. The Monte-Carlo
// sample is drawn lazily, once, and shared by all pairs. Its frequencies carry
// a uniform pseudo-count of total mass one so that P_B stays positive.
class PairwiseModel {
public:
    PairwiseModel(const BayesianNetwork& b, DiscOptions opts);

    JointTable joint(int i, int j);
    bool sampled() const { return mc_ != nullptr; }

private:
    const BayesianNetwork& b_;
    DiscOptions opts_;
    std::unique_ptr<PairwiseJoints> mc_;
};

// D_KL(P^(X_i, X_j) || P_B(X_i, X_j)).
double m_disc(int i, int j, PairwiseModel& model, StatsCache& stats);
double m_disc(int i, int j, const BayesianNetwork& b, StatsCache& stats, DiscOptions opts = {});

// Comparative shielding measure I(X_i; X_j, Pa(X_i)).
double m_shield(int i, int j, std::span<const int> parents_of_i, StatsCache& stats);
// I(X_i; X_j | Pa(X_i)); ranks identically to m_shield.
double m_shield_conditional(int i, int j, std::span<const int> parents_of_i, StatsCache& stats);

// Score of X_i's family after adding X_j to its parents.
double m_score(int i, int j, std::span<const int> parents_of_i, Scorer& scorer);

struct RestrictOptions {
    MeasureKind kind = MeasureKind::Score;
    std::size_t k = 5;
    DiscOptions disc;
    // When set, pairs whose first-call mutual information is below the floor
    // are not re-measured on later calls and keep their previous value.
    std::optional<double> mi_floor;
};

// Restrict step. For each X_i: keep Pa(X_i), then add the k - |Pa(X_i)|
// best-ranked non-parents, ranked by (measure desc, index asc).
class Restrictor {
public:
    Restrictor(RestrictOptions opts, Scorer& scorer);

    // Throws std::invalid_argument when some |Pa(X_i)| > k.
    CandidateSets restrict(const BayesianNetwork& b);

    // measure[i][j] of the last call (NaN for skipped slots: j == i, parents).
    const std::vector<std::vector<double>>& last_measures() const { return measures_; }
    std::size_t skipped_pairs() const { return skipped_; }

private:
    RestrictOptions opts_;
    Scorer& scorer_;
    std::vector<std::vector<double>> measures_;
    std::vector<std::vector<double>> first_mi_;
    std::size_t skipped_ = 0;
};

CandidateSets restrict_step(const BayesianNetwork& b, Scorer& scorer, const RestrictOptions& opts);

// One `candidates <name> <name>*` line per variable.
void write_candidates(std::ostream& out, const std::vector<VariableDecl>& variables, const CandidateSets& c);

} // namespace sparsecand
