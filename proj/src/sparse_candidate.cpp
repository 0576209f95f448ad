#include "sparsecand/sparse_candidate.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sparsecand {

namespace {

constexpr double kScoreTolerance = 1e-9; // on score per instance

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<double> reference_kl(const RunConfig& cfg, const BayesianNetwork& learned) {
    if (!cfg.reference) return std::nullopt;
    return kl_to_reference(*cfg.reference, learned, cfg.kl_samples, cfg.kl_seed).value;
}

void check_subgraph(const Dag& g, const CandidateSets& c) {
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (int p : g.parents(static_cast<int>(v))) {
            if (!std::binary_search(c[v].begin(), c[v].end(), p)) {
                throw std::logic_error("maximize returned an arc outside the candidate graph");
            }
        }
    }
}

struct MaximizeResult {
    Dag dag;
    double score;
    bool mixed;
};

MaximizeResult maximize(const Dag& previous, const CandidateSets& c, const RunConfig& cfg, Scorer& scorer) {
    SearchConfig search = cfg.search;
    search.candidates = c;
    if (cfg.maximizer == Maximizer::GreedyConstrained) {
        if (!cfg.restart_from_empty) {
            auto r = greedy_hill_climb(previous, search, scorer);
            return {std::move(r.dag), r.score, false};
        }
        // A fresh climb can end below B_{n-1}; keep the previous structure then.
        auto r = greedy_hill_climb(Dag(previous.size()), search, scorer);
        const double kept = scorer.network(previous);
        if (r.score < kept) return {previous, kept, false};
        return {std::move(r.dag), r.score, false};
    }

    const CandidateGraph h(c);
    const FamilyWeights w = weights_from_score(h, scorer, cfg.search.max_in_degree);
    PartialMrbn partial = solve_mrbn_partial(h, w, cfg.strategy, cfg.limits);
    if (partial.complete()) {
        Dag g(partial.parents);
        const double s = scorer.network(g);
        return {std::move(g), s, false};
    }
    // Oversize components keep their previous families as the starting point
    // for a greedy pass; solved families stay frozen. Cycles of H stay inside
    // one component, so the mix is acyclic.
    ParentSets start = partial.parents;
    for (std::size_t v = 0; v < start.size(); ++v) {
        if (!partial.vertex_solved[v]) start[v] = previous.parents(static_cast<int>(v));
    }
    search.frozen = partial.vertex_solved;
    auto r = greedy_hill_climb(Dag(start), search, scorer);
    return {std::move(r.dag), r.score, true};
}

} // namespace

std::uint64_t candidates_fingerprint(const CandidateSets& c) {
    std::uint64_t h = 0;
    for (std::size_t v = 0; v < c.size(); ++v) h ^= family_hash(static_cast<int>(v), c[v]);
    return h;
}

ConvergenceDecision check_convergence(const std::vector<IterationReport>& history, const RunConfig& cfg) {
    if (history.empty()) return {};
    const std::size_t n = history.size();
    if (cfg.stopping == StopRule::Score) {
        if (n >= 2 && std::abs(history[n - 1].score_per_instance - history[n - 2].score_per_instance) <= kScoreTolerance) {
            return {true, "score unchanged"};
        }
    } else if (n >= 2) {
        if (history[n - 1].candidates == history[n - 2].candidates) return {true, "candidate sets unchanged"};
        std::size_t flat = 0;
        for (std::size_t t = n - 1; t >= 1; --t) {
            if (history[t].score_per_instance > history[t - 1].score_per_instance + kScoreTolerance) break;
            ++flat;
        }
        if (cfg.no_improvement_limit > 0 && flat >= cfg.no_improvement_limit) {
            return {true, "no score improvement for " + std::to_string(flat) + " iterations"};
        }
    }
    if (n >= cfg.max_iterations) return {true, "iteration limit"};
    return {};
}

RunResult run_sparse_candidate(const Dataset& data, const RunConfig& cfg, StatsCache& stats,
                               const BayesianNetwork* b0) {
    if (cfg.k < 1) throw std::invalid_argument("k must be at least 1");
    if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (&stats.data() != &data) throw std::invalid_argument("statistics cache belongs to another dataset");
    const auto start = Clock::now();
    const double rows = static_cast<double>(data.num_rows());

    Scorer scorer(cfg.score, stats);
    RestrictOptions ropts;
    ropts.kind = cfg.measure;
    ropts.k = cfg.k;
    ropts.disc = cfg.disc;
    ropts.mi_floor = cfg.mi_floor;
    Restrictor restrictor(ropts, scorer);

    Dag current = b0 ? b0->dag() : Dag(data.num_variables());
    if (current.size() != data.num_variables()) throw std::invalid_argument("initial network size differs from the data");
    BayesianNetwork model = b0 ? *b0 : fit_parameters(current, stats, cfg.disc_smoothing);
    double score = scorer.network(current);

    RunResult result;
    for (std::size_t iter = 1;; ++iter) {
        const CandidateSets c = restrictor.restrict(model);
        MaximizeResult next = maximize(current, c, cfg, scorer);
        check_subgraph(next.dag, c);
        if (next.score / rows < score / rows - kScoreTolerance) {
            throw std::logic_error("maximize lowered the score");
        }
        current = std::move(next.dag);
        score = next.score;
        model = fit_parameters(current, stats, cfg.disc_smoothing);

        IterationReport rep;
        rep.iteration = iter;
        rep.score = score;
        rep.score_per_instance = score / rows;
        rep.candidates = c;
        rep.candidates_fingerprint = candidates_fingerprint(c);
        rep.mixed = next.mixed;
        if (cfg.reference) {
            const BayesianNetwork out = cfg.output_smoothing == cfg.disc_smoothing
                                            ? model
                                            : fit_parameters(current, stats, cfg.output_smoothing);
            rep.kl = reference_kl(cfg, out);
        }
        rep.stats = stats.report().fresh_computations;
        rep.time_s = seconds_since(start);
        result.reports.push_back(std::move(rep));

        auto decision = check_convergence(result.reports, cfg);
        if (decision.stop) {
            result.stop_reason = decision.reason;
            break;
        }
    }
    result.network = fit_parameters(current, stats, cfg.output_smoothing);
    result.dag = std::move(current);
    result.score = score;
    return result;
}

RunResult run_greedy(const Dataset& data, const RunConfig& cfg, StatsCache& stats) {
    if (&stats.data() != &data) throw std::invalid_argument("statistics cache belongs to another dataset");
    const auto start = Clock::now();
    Scorer scorer(cfg.score, stats);
    SearchConfig search = cfg.search;
    search.candidates.reset();
    auto r = greedy_hill_climb(Dag(data.num_variables()), search, scorer);

    RunResult result;
    result.network = fit_parameters(r.dag, stats, cfg.output_smoothing);
    IterationReport rep;
    rep.iteration = 1;
    rep.score = r.score;
    rep.score_per_instance = r.score / static_cast<double>(data.num_rows());
    rep.kl = reference_kl(cfg, result.network);
    rep.stats = stats.report().fresh_computations;
    rep.time_s = seconds_since(start);
    result.reports.push_back(std::move(rep));
    result.dag = std::move(r.dag);
    result.score = r.score;
    result.stop_reason = "local maximum";
    return result;
}

void write_report(std::ostream& out, const std::vector<IterationReport>& reports) {
    auto shortest = [](double x) {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, end);
    };
    out << "iter\ttime_s\tscore_per_instance\tkl\tstats\n";
    for (const auto& r : reports) {
        char time_buf[32];
        std::snprintf(time_buf, sizeof time_buf, "%.3f", r.time_s);
        out << r.iteration << '\t' << time_buf << '\t' << shortest(r.score_per_instance) << '\t'
            << (r.kl ? shortest(*r.kl) : std::string("NA")) << '\t' << r.stats << '\n';
    }
}

} // namespace sparsecand
