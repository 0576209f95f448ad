#include "helpers.hpp"

#include "sparsecand/search.hpp"
#include "sparsecand/synth.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace sparsecand;

namespace {

bool subgraph_of(const Dag& g, const CandidateSets& c) {
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (int p : g.parents(static_cast<int>(v))) {
            if (!std::binary_search(c[v].begin(), c[v].end(), p)) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("legal_moves lists exactly the applicable constrained moves") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 6;
        SearchConfig cfg;
        cfg.candidates = testing_util::random_candidates(n, 3, rng);
        if (trial % 3 == 0) cfg.max_in_degree = 1;
        // Start inside the candidate graph: keep only arcs of a random DAG that are candidates.
        Dag g = testing_util::random_dag(n, 0.5, rng);
        for (int v = 0; v < static_cast<int>(n); ++v) {
            std::vector<int> keep;
            for (int p : g.parents(v)) {
                if (std::binary_search((*cfg.candidates)[v].begin(), (*cfg.candidates)[v].end(), p)) keep.push_back(p);
            }
            if (cfg.max_in_degree && keep.size() > 1) keep.resize(1);
            g.set_parents(v, keep);
        }
        const auto moves = legal_moves(g, cfg);
        CHECK(std::is_sorted(moves.begin(), moves.end()));
        const std::set<Move> listed(moves.begin(), moves.end());
        for (auto kind : {MoveKind::Add, MoveKind::Delete, MoveKind::Reverse}) {
            for (int a = 0; a < static_cast<int>(n); ++a) {
                for (int b = 0; b < static_cast<int>(n); ++b) {
                    const Move m{kind, a, b};
                    bool ok = true;
                    Dag after;
                    try {
                        after = apply_move(g, m);
                    } catch (const std::invalid_argument&) {
                        ok = false;
                    }
                    if (ok) {
                        ok = subgraph_of(after, *cfg.candidates);
                        for (int v = 0; v < static_cast<int>(n) && ok && cfg.max_in_degree; ++v) {
                            if (after.parents(v).size() > *cfg.max_in_degree && after.parents(v) != g.parents(v)) ok = false;
                        }
                    }
                    CHECK(listed.count(m) == (ok ? 1U : 0U));
                }
            }
        }
    }
}

TEST_CASE("frozen families are never touched") {
    Dag g(4);
    g.add_edge(0, 1);
    SearchConfig cfg;
    cfg.frozen = {false, true, false, false};
    for (const Move& m : legal_moves(g, cfg)) {
        CHECK(m.to != 1);
        if (m.kind == MoveKind::Reverse) CHECK(m.from != 1);
    }
}

TEST_CASE("tabu list is bounded and confirms hash hits structurally") {
    TabuList t(2);
    const ParentSets a{{}, {0}}, b{{1}, {}}, c{{}, {}};
    t.push(a, structure_fingerprint(a));
    t.push(b, structure_fingerprint(b));
    CHECK(t.contains(a, structure_fingerprint(a)));
    CHECK_FALSE(t.contains(c, structure_fingerprint(a))); // forged hash collision
    t.push(c, structure_fingerprint(c));
    CHECK(t.size() == 2);
    CHECK_FALSE(t.contains(a, structure_fingerprint(a)));
}

TEST_CASE("greedy search improves the score and returns a consistent result") {
    const BayesianNetwork truth = random_network({8, 2, {{2, 1.0}, {3, 1.0}}, 0.02, 14});
    const Dataset d = forward_sample(truth, 2000, 1);
    StatsCache cache(d);
    Scorer s({}, cache);
    const Dag empty(8);
    const SearchResult r = greedy_hill_climb(empty, {}, s);
    CHECK(r.score > s.network(empty));
    CHECK(r.score == doctest::Approx(s.network(r.dag)).epsilon(1e-12));
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.trace.front().move.kind == MoveKind::Add);
    for (std::size_t t = 0; t < r.trace.size(); ++t) CHECK(r.trace[t].step == t + 1);
    // The returned score is the best on the trace.
    double best = s.network(empty);
    for (const auto& row : r.trace) best = std::max(best, row.score);
    CHECK(std::abs(best - r.score) < 1e-6);

    std::ostringstream out;
    write_trace(out, r.trace, d.variables(), d.num_rows());
    CHECK(out.str().rfind("step\tmove\tfrom\tto\tdelta\tscore_per_instance\tstats\n", 0) == 0);
}

TEST_CASE("without a tabu list the search stops at a local maximum") {
    const BayesianNetwork truth = random_network({7, 2, {{2, 1.0}, {3, 1.0}}, 0.02, 31});
    const Dataset d = forward_sample(truth, 1500, 2);
    StatsCache cache(d);
    Scorer s({}, cache);
    SearchConfig cfg;
    cfg.tabu_capacity = 0;
    const SearchResult r = greedy_hill_climb(Dag(7), cfg, s);
    for (const auto& row : r.trace) CHECK(row.delta > 0);
    for (const Move& m : legal_moves(r.dag, cfg)) CHECK(s.delta(r.dag, m) <= 1e-9);
}

TEST_CASE("constrained search stays inside the candidate graph and never loses score") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const BayesianNetwork truth = random_network({7, 3, {{2, 1.0}, {3, 1.0}}, 0.02, static_cast<std::uint64_t>(40 + trial)});
        const Dataset d = forward_sample(truth, 800, trial);
        StatsCache cache(d);
        Scorer s({}, cache);
        SearchConfig cfg;
        cfg.candidates = testing_util::random_candidates(7, 2, rng);
        const SearchResult r = greedy_hill_climb(Dag(7), cfg, s);
        CHECK(subgraph_of(r.dag, *cfg.candidates));
        CHECK(r.score >= s.network(Dag(7)) - 1e-9);
    }
}

TEST_CASE("score-equivalent ties resolve to the lexicographically first move") {
    // Two perfectly correlated binary columns: adding 0->1 and 1->0 score alike.
    Dataset d({{"A", {"0", "1"}}, {"B", {"0", "1"}}}, 40);
    for (std::size_t r = 0; r < 40; ++r) {
        d.set(r, 0, static_cast<State>(r % 2));
        d.set(r, 1, static_cast<State>(r % 2));
    }
    StatsCache cache(d);
    Scorer s({}, cache);
    const SearchResult r = greedy_hill_climb(Dag(2), {}, s);
    CHECK(r.dag.has_edge(0, 1));
}

TEST_CASE("greedy rejects a start outside the candidate graph") {
    const Dataset d = testing_util::random_dataset(3, 50, 2);
    StatsCache cache(d);
    Scorer s({}, cache);
    SearchConfig cfg;
    cfg.candidates = CandidateSets{{}, {}, {}};
    Dag g(3);
    g.add_edge(0, 1);
    CHECK_THROWS_AS(greedy_hill_climb(g, cfg, s), std::invalid_argument);
}
