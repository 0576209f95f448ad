#pragma once

#include "sparsecand/contingency.hpp"
#include "sparsecand/dag.hpp"
#include "sparsecand/stats_cache.hpp"

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

namespace sparsecand {

enum class ScoreKind { BDe, MDL };

struct ScoreConfig {
    ScoreKind kind = ScoreKind::BDe;
    double ess = 10.0; // Dirichlet equivalent sample size; unused by MDL
};

// Family scores over a table whose scope is {child} plus the parents (any
// order). Both are log2-based; larger is better.
//
// BDeu: sum over parent configurations pa of
//   lnG(a_pa) - lnG(a_pa + N_pa) + sum_x [lnG(a_x|pa + N_x,pa) - lnG(a_x|pa)]
// with a_x|pa = ess / (r q), a_pa = ess / q, converted from nats to bits.
double bde_family_score(const ContingencyTable& family, int child, double ess);

// MDL: sum N_x,pa log2(N_x,pa / N_pa) - (log2 N / 2) (r - 1) q, 0 log 0 = 0.
double mdl_family_score(const ContingencyTable& family, int child);

double family_score(const ScoreConfig& cfg, const ContingencyTable& family, int child);

// Decomposable network score backed by a statistics cache, with a
// (child, parent set) -> score memo.
class Scorer {
public:
    Scorer(ScoreConfig cfg, StatsCache& stats);

    const ScoreConfig& config() const { return cfg_; }
    StatsCache& stats() { return stats_; }
    const Dataset& data() const { return stats_.data(); }
    std::size_t num_rows() const { return stats_.data().num_rows(); }

    // Throws std::invalid_argument if child is among the parents.
    double family(int child, std::span<const int> parents);
    double network(const Dag& g);
    double network(const ParentSets& parents);
    // Score change of applying `m` to `g`, from the affected families only.
    // Throws std::invalid_argument for an inapplicable move.
    double delta(const Dag& g, const Move& m);

    std::size_t memo_size() const { return memo_.size(); }

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<int>& k) const noexcept;
    };

    ScoreConfig cfg_;
    StatsCache& stats_;
    std::unordered_map<std::vector<int>, double, KeyHash> memo_;
};

} // namespace sparsecand
