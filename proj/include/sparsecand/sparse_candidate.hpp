#pragma once

#include "sparsecand/decompose.hpp"
#include "sparsecand/measures.hpp"
#include "sparsecand/network.hpp"
#include "sparsecand/scoring.hpp"
#include "sparsecand/search.hpp"
#include "sparsecand/stats_cache.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sparsecand {

enum class Maximizer { GreedyConstrained, ExactMrbn };
enum class StopRule { Score, Candidate };

struct RunConfig {
    MeasureKind measure = MeasureKind::Score;
    std::size_t k = 5;
    ScoreConfig score;
    Maximizer maximizer = Maximizer::GreedyConstrained;
    // Greedy maximizer climbs from the empty graph each iteration instead of
    // from B_{n-1}; the better of the two is kept.
    bool restart_from_empty = false;
    StopRule stopping = StopRule::Score;
    std::size_t max_iterations = 20;
    std::size_t no_improvement_limit = 3; // candidate rule only
    DiscOptions disc;                     // Monte-Carlo size and seed for the discrepancy measure
    std::optional<double> mi_floor;
    double disc_smoothing = 1.0;   // parameters of B_n as seen by Restrict
    double output_smoothing = 1.0; // parameters of the returned network
    SearchConfig search;           // tabu, patience, in-degree bound
    SolverLimits limits;
    MrbnStrategy strategy = MrbnStrategy::ClusterTree;
    // Optional generating network: KL(reference || B_n) is reported per iteration.
    const BayesianNetwork* reference = nullptr;
    std::size_t kl_samples = 20000;
    std::uint64_t kl_seed = 0;
};

struct IterationReport {
    std::size_t iteration = 0;
    double time_s = 0.0; // cumulative wall time
    double score = 0.0;  // network score
    double score_per_instance = 0.0;
    std::optional<double> kl;
    std::uint64_t stats = 0; // cumulative fresh counting passes
    std::uint64_t candidates_fingerprint = 0;
    CandidateSets candidates;
    bool mixed = false; // exact maximizer fell back to greedy for some component
};

struct RunResult {
    BayesianNetwork network;
    Dag dag;
    double score = 0.0;
    std::vector<IterationReport> reports;
    std::string stop_reason;
};

struct ConvergenceDecision {
    bool stop = false;
    std::string reason;
};

ConvergenceDecision check_convergence(const std::vector<IterationReport>& history, const RunConfig& cfg);

std::uint64_t candidates_fingerprint(const CandidateSets& c);

// Alternates Restrict and Maximize starting from b0 (default: the empty
// network). Maximize starts from the previous structure, so the score never
// decreases; a decrease or a structure outside H_n throws std::logic_error.
RunResult run_sparse_candidate(const Dataset& data, const RunConfig& cfg, StatsCache& stats,
                               const BayesianNetwork* b0 = nullptr);

// Unconstrained greedy search from the empty network, reported as a single
// iteration.
RunResult run_greedy(const Dataset& data, const RunConfig& cfg, StatsCache& stats);

// Header `iter time_s score_per_instance kl stats`, tab-delimited; kl is NA
// without a reference.
void write_report(std::ostream& out, const std::vector<IterationReport>& reports);

} // namespace sparsecand
