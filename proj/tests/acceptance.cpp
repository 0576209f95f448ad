// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include "helpers.hpp"
#include "oracles.hpp"

#include "sparsecand/cli.hpp"
#include "sparsecand/cluster_tree.hpp"
#include "sparsecand/decompose.hpp"
#include "sparsecand/measures.hpp"
#include "sparsecand/search.hpp"
#include "sparsecand/sparse_candidate.hpp"
#include "sparsecand/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace sparsecand;

namespace {

// Collects failures for one criterion; the first few are echoed.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (ok) return;
        if (failures_++ < 5) std::cerr << "    failed: " << what << '\n';
    }
    bool ok() const { return failures_ == 0; }
    std::size_t checks() const { return checks_; }
    std::size_t failures() const { return failures_; }

private:
    std::size_t checks_ = 0, failures_ = 0;
};

std::string fmt(double x, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    return buf;
}

bool subgraph_of(const ParentSets& g, const CandidateGraph& h) {
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (int p : g[v]) {
            if (!h.has_arc(p, static_cast<int>(v))) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

std::string criterion1(Check& c) {
    Rng rng(2024);
    std::size_t separator_direct = 0, cyclic = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(7); // 2..8
        const std::size_t k = 1 + rng.below(3); // 1..3
        const CandidateGraph h(testing_util::random_candidates(n, k, rng));
        FamilyWeights w;
        std::optional<Dataset> data;
        if (trial % 2 == 0) {
            // Family scores of data drawn from a random network.
            const BayesianNetwork truth = random_network({n, 2, {{2, 1.0}, {3, 1.0}}, 0.02, 500u + trial});
            data = forward_sample(truth, 300 + rng.below(700), trial);
            StatsCache cache(*data);
            Scorer scorer(ScoreConfig{trial % 4 == 0 ? ScoreKind::MDL : ScoreKind::BDe, 10.0}, cache);
            w = weights_from_score(h, scorer, trial % 8 == 2 ? std::optional<std::size_t>(1) : std::nullopt);
        } else {
            w = testing_util::random_weights(h, rng, trial % 3 == 1 ? 0.25 : 0.0);
        }
        cyclic += scc_decompose(h).size() < n;

        const MrbnSolution brute = brute_force_mrbn(h, w);
        const std::string tag = "instance " + std::to_string(trial);
        c.expect(std::abs(brute.weight - oracle::mrbn_by_orders(h, w)) <= 1e-9, tag + ": brute force vs order oracle");

        auto verify = [&](const MrbnSolution& s, const std::string& name) {
            c.expect(std::abs(s.weight - brute.weight) <= 1e-9, tag + ": " + name + " weight");
            c.expect(is_acyclic(s.parents), tag + ": " + name + " acyclic");
            c.expect(subgraph_of(s.parents, h), tag + ": " + name + " inside H");
            c.expect(std::abs(total_weight(h, w, s.parents) - s.weight) <= 1e-9, tag + ": " + name + " weight of graph");
        };
        verify(solve_mrbn(h, w, MrbnStrategy::Brute), "scc+brute");
        verify(solve_mrbn(h, w, MrbnStrategy::Separator), "scc+separator");
        verify(solve_mrbn(h, w, MrbnStrategy::ClusterTree), "scc+cluster tree");

        std::vector<int> all(n);
        for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<int>(v);
        if (auto split = find_separator(h, all)) {
            ++separator_direct;
            verify(separator_solve(h, w, all, split->separator), "separator_solve");
        }
        DpStats stats;
        const ClusterTree ct = build_cluster_tree(h);
        c.expect(validate_cluster_tree(h, ct).empty(), tag + ": cluster tree valid");
        verify(cluster_tree_dp(h, w, ct, 8, &stats), "cluster_tree_dp");
        // Work ceiling: complete orders <= sum |U_j|!, and every lookup sits on
        // a node of the per-cluster permutation trees (< e * |U_j|! nodes).
        c.expect(stats.orders_visited <= stats.order_ceiling, tag + ": order count ceiling");
        c.expect(stats.family_lookups <= 3 * stats.order_ceiling, tag + ": lookup ceiling");
    }
    return "200 instances, " + std::to_string(cyclic) + " with cyclic H, " + std::to_string(separator_direct) +
           " with a whole-graph separator";
}

std::string criterion2(Check& c) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BayesianNetwork truth = random_network({5, 3, {{2, 1.0}, {3, 1.0}, {4, 1.0}}, 0.02, 900 + seed});
        const Dataset d = forward_sample(truth, 500 + 100 * seed, seed);
        StatsCache cache(d);
        Rng rng(seed);
        const int i = static_cast<int>(rng.below(5));
        const int j = (i + 1 + static_cast<int>(rng.below(4))) % 5;
        const int pair[2] = {i, j};
        const std::string tag = "seed " + std::to_string(seed);
        c.expect(std::abs(mutual_information(cache.counts(pair)) - oracle::mi(d, {i}, {j})) <= 1e-12, tag + ": MI");

        std::vector<int> z;
        for (int v = 0; v < 5; ++v) {
            if (v != i && v != j && z.size() < 2) z.push_back(v);
        }
        std::vector<int> scope = z;
        scope.push_back(i);
        scope.push_back(j);
        c.expect(std::abs(conditional_mutual_information(cache.counts(scope), i, j) - oracle::cmi(d, i, j, z)) <= 1e-12,
                 tag + ": CMI");

        std::vector<double> p(12), q(12);
        double sp = 0, sq = 0;
        for (int t = 0; t < 12; ++t) {
            p[t] = t % 5 == 0 ? 0.0 : rng.uniform();
            q[t] = rng.uniform() + 1e-3;
            sp += p[t];
            sq += q[t];
        }
        for (int t = 0; t < 12; ++t) {
            p[t] /= sp;
            q[t] /= sq;
        }
        c.expect(std::abs(kl_discrete(p, q) - oracle::kl(p, q)) <= 1e-12, tag + ": KL");

        const BayesianNetwork empty = fit_parameters(Dag(5), cache, 0.0);
        c.expect(std::abs(m_disc(i, j, empty, cache, {DiscMode::Exact}) - mutual_information(cache.counts(pair))) <= 1e-9,
                 tag + ": discrepancy against the empty network");

        // I(X; Xj, Pa) - I(X; Pa) = I(X; Xj | Pa).
        std::vector<int> pa_scope = z;
        pa_scope.push_back(i);
        const double lhs = m_shield(i, j, z, cache) - mutual_information_split(cache.counts(pa_scope), i);
        c.expect(std::abs(lhs - oracle::cmi(d, i, j, z)) <= 1e-9, tag + ": chain rule");
    }
    return "20 randomized tables";
}

std::string criterion3(Check& c) {
    Rng rng(77);
    std::size_t pairs = 0;
    while (pairs < 100) {
        const std::size_t n = 3 + rng.below(4);
        const Dataset d = testing_util::random_dataset(n, 100 + rng.below(300), 3000 + pairs, 3);
        StatsCache cache(d);
        Scorer s(ScoreConfig{pairs % 2 ? ScoreKind::MDL : ScoreKind::BDe, 1.0 + static_cast<double>(pairs % 10)}, cache);
        const Dag g = testing_util::random_dag(n, 0.4, rng);
        double sum = 0.0;
        for (int v = 0; v < static_cast<int>(n); ++v) {
            sum += pairs % 2 ? oracle::mdl(d, v, g.parents(v))
                             : oracle::bde(d, v, g.parents(v), 1.0 + static_cast<double>(pairs % 10));
        }
        const auto moves = legal_moves(g, {});
        if (moves.empty()) continue;
        const Move m = moves[rng.below(moves.size())];
        const std::string tag = "pair " + std::to_string(pairs);
        c.expect(std::abs(s.network(g) - sum) <= 1e-9, tag + ": network score vs family oracle sum");
        c.expect(std::abs(s.delta(g, m) - (s.network(apply_move(g, m)) - s.network(g))) <= 1e-9,
                 tag + ": move delta vs rescore (" + to_string(m) + ")");
        ++pairs;
    }
    return "100 (structure, move) pairs";
}

std::string criterion4(Check& c) {
    std::vector<Dataset> sets;
    std::vector<BayesianNetwork> truths;
    for (std::uint64_t seed : {1, 2, 3}) {
        truths.push_back(random_network({12, 3, {{2, 13.0}, {3, 22.0}, {4, 2.0}}, 0.02, 60 + seed}));
        sets.push_back(forward_sample(truths.back(), 1500, seed));
    }
    sets.push_back(testing_util::random_dataset(8, 800, 5, 3));
    std::size_t runs = 0, max_iters = 0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (MeasureKind m : {MeasureKind::Disc, MeasureKind::Shield, MeasureKind::Score}) {
            for (std::size_t k : {2, 3, 5}) {
                StatsCache cache(sets[s]);
                RunConfig cfg;
                cfg.measure = m;
                cfg.k = k;
                const RunResult r = run_sparse_candidate(sets[s], cfg, cache);
                const std::string tag = "set " + std::to_string(s) + " k " + std::to_string(k) + " measure " +
                                        std::to_string(static_cast<int>(m));
                for (std::size_t t = 1; t < r.reports.size(); ++t) {
                    c.expect(r.reports[t].score_per_instance >= r.reports[t - 1].score_per_instance - 1e-9,
                             tag + ": score decreased at iteration " + std::to_string(t + 1));
                }
                c.expect(r.stop_reason == "score unchanged" && r.reports.size() <= cfg.max_iterations,
                         tag + ": stopped by " + r.stop_reason);
                max_iters = std::max(max_iters, r.reports.size());
                ++runs;
            }
        }
    }
    return std::to_string(runs) + " runs, longest " + std::to_string(max_iters) + " iterations";
}

std::string criterion5(Check& c) {
    const BayesianNetwork net = testing_util::scenario_network(0.1, true);
    constexpr int B = 0, C = 1, D = 2, A = 3;
    const double ac = mutual_information(exact_pairwise_joint(net, A, C));
    const double ad = mutual_information(exact_pairwise_joint(net, A, D));
    const double ab = mutual_information(exact_pairwise_joint(net, A, B));
    c.expect(ac > ad && ad > ab && ab > 0, "exact I(A;C) > I(A;D) > I(A;B) > 0");

    const Dataset d = forward_sample(net, 4000, 41);
    std::string detail = "I(A;C)=" + fmt(ac, 4) + " I(A;D)=" + fmt(ad, 4) + " I(A;B)=" + fmt(ab, 4);
    for (MeasureKind m : {MeasureKind::Disc, MeasureKind::Shield}) {
        StatsCache cache(d);
        RunConfig cfg;
        cfg.measure = m;
        cfg.k = 2;
        cfg.disc.mode = DiscMode::Exact;
        const RunResult r = run_sparse_candidate(d, cfg, cache);
        const std::string name = m == MeasureKind::Disc ? "disc" : "shield";
        c.expect(r.reports.front().candidates[A] == std::vector<int>{C, D}, name + ": iteration 1 candidates of A are {C, D}");
        bool has_b = false;
        for (std::size_t t = 1; t < std::min<std::size_t>(2, r.reports.size()); ++t) {
            const auto& ca = r.reports[t].candidates[A];
            has_b = has_b || std::binary_search(ca.begin(), ca.end(), B);
        }
        c.expect(has_b, name + ": B among A's candidates in iteration 2");
        c.expect(r.reports.back().score_per_instance >= r.reports.front().score_per_instance - 1e-9,
                 name + ": final score >= iteration-1 score");
        c.expect(std::binary_search(r.dag.parents(A).begin(), r.dag.parents(A).end(), B), name + ": B -> A learned");
        detail += "; " + name + " " + std::to_string(r.reports.size()) + " iterations";
    }
    return detail;
}

std::string criterion6(Check& c) {
    const BayesianNetwork truth = random_network({37, 4, {{2, 13.0}, {3, 22.0}, {4, 2.0}}, 0.02, 1});
    const Dataset d = forward_sample(truth, 10000, 7);

    RunConfig cfg;
    cfg.measure = MeasureKind::Score;
    cfg.k = 10;
    cfg.reference = &truth;
    cfg.kl_samples = 50000;
    cfg.kl_seed = 99;

    StatsCache greedy_cache(d);
    const RunResult greedy = run_greedy(d, cfg, greedy_cache);
    StatsCache sc_cache(d);
    const RunResult sc = run_sparse_candidate(d, cfg, sc_cache);

    const double g = greedy.reports.back().score_per_instance;
    const double s = sc.reports.back().score_per_instance;
    const double rel = std::abs(s - g) / std::abs(g);
    c.expect(rel <= 0.01, "(a) score/N within 1%: sc " + fmt(s) + " greedy " + fmt(g));
    c.expect(sc.reports.back().stats < greedy.reports.back().stats,
             "(b) fresh statistics: sc " + std::to_string(sc.reports.back().stats) + " greedy " +
                 std::to_string(greedy.reports.back().stats));
    std::size_t upticks = 0;
    bool big_uptick = false;
    std::string kls;
    for (std::size_t t = 0; t < sc.reports.size(); ++t) {
        kls += (t ? "," : "") + fmt(*sc.reports[t].kl, 4);
        if (t == 0) continue;
        const double prev = *sc.reports[t - 1].kl, cur = *sc.reports[t].kl;
        if (cur > prev) {
            ++upticks;
            big_uptick = big_uptick || cur > prev * 1.05;
        }
    }
    c.expect(upticks <= 1 && !big_uptick, "(c) KL non-increasing with at most one 5% uptick: " + kls);
    return "score/N sc " + fmt(s) + " vs greedy " + fmt(g) + " (rel " + fmt(rel, 3) + "), stats " +
           std::to_string(sc.reports.back().stats) + " vs " + std::to_string(greedy.reports.back().stats) + ", KL " +
           kls + " (greedy " + fmt(*greedy.reports.back().kl, 4) + ")";
}

std::string criterion7(Check& c) {
    std::istringstream text("var A a0 a1\n"
                            "var B b0 b1 b2\n"
                            "var C c0 c1\n"
                            "var D d0 d1 d2\n"
                            "parents A\ncpt A 0.35 0.65\n"
                            "parents B A\ncpt B 0.2 0.5 0.3\ncpt B 0.6 0.1 0.3\n"
                            "parents C A B\ncpt C 0.9 0.1\ncpt C 0.4 0.6\ncpt C 0.25 0.75\n"
                            "cpt C 0.5 0.5\ncpt C 0.15 0.85\ncpt C 0.7 0.3\n"
                            "parents D C\ncpt D 0.1 0.3 0.6\ncpt D 0.45 0.45 0.1\n");
    const BayesianNetwork b = read_network(text);
    const Dataset d = forward_sample(b, 200000, 12345);
    StatsCache cache(d);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const JointTable exact = exact_pairwise_joint(b, i, j);
            const int pair[2] = {i, j};
            const JointTable emp = empirical_joint(cache.counts(pair), i, j);
            double tv = 0.0;
            for (std::size_t t = 0; t < exact.p.size(); ++t) tv += std::abs(exact.p[t] - emp.p[t]);
            tv /= 2;
            worst = std::max(worst, tv);
            c.expect(tv <= 0.01, "pair (" + std::to_string(i) + "," + std::to_string(j) + ") TV " + fmt(tv));
        }
    }
    return "max total variation " + fmt(worst, 3) + " over 6 pairs";
}

int call_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "sparsecand");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string criterion8(Check& c) {
    // Network and dataset write -> parse -> write.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const BayesianNetwork b = random_network({10, 3, {{2, 1.0}, {3, 1.0}, {4, 1.0}}, 0.02, seed});
        std::ostringstream first;
        write_network(first, b);
        std::istringstream in(first.str());
        const BayesianNetwork parsed = read_network(in);
        std::ostringstream second;
        write_network(second, parsed);
        c.expect(first.str() == second.str(), "network round trip, seed " + std::to_string(seed));
        c.expect(parsed.same_cpts(b, 1e-9), "network parameters preserved, seed " + std::to_string(seed));

        const Dataset d = forward_sample(b, 300, seed);
        std::ostringstream dfirst;
        write_dataset(dfirst, d);
        std::istringstream din(dfirst.str());
        std::ostringstream dsecond;
        write_dataset(dsecond, load_dataset(din));
        c.expect(dfirst.str() == dsecond.str(), "dataset round trip, seed " + std::to_string(seed));
    }
    // CLI determinism under fixed seeds.
    testing_util::TempDir dir;
    for (int t = 0; t < 2; ++t) {
        const std::string s = std::to_string(t);
        c.expect(call_cli({"synth", "--vars", "10", "--max-parents", "3", "--seed", "5", "--n", "1000", "--net",
                           dir.file("g" + s + ".net"), "--out", dir.file("d" + s + ".tsv")}) == 0,
                 "synth exit 0");
        c.expect(call_cli({"sample", "--net", dir.file("g0.net"), "--n", "500", "--seed", "7", "--out",
                           dir.file("s" + s + ".tsv")}) == 0,
                 "sample exit 0");
        c.expect(call_cli({"learn", "--data", dir.file("d0.tsv"), "--measure", "disc", "--k", "3", "--seed", "4", "--out",
                           dir.file("l" + s + ".net"), "--report", dir.file("r" + s + ".tsv")}) == 0,
                 "learn exit 0");
    }
    c.expect(slurp(dir.file("g0.net")) == slurp(dir.file("g1.net")), "synth network identical");
    c.expect(slurp(dir.file("d0.tsv")) == slurp(dir.file("d1.tsv")), "synth dataset identical");
    c.expect(slurp(dir.file("s0.tsv")) == slurp(dir.file("s1.tsv")), "sample output identical");
    c.expect(slurp(dir.file("l0.net")) == slurp(dir.file("l1.net")), "learned network identical");
    const BayesianNetwork learned = read_network_file(dir.file("l0.net"));
    std::ostringstream again;
    write_network(again, learned);
    c.expect(again.str() == slurp(dir.file("l0.net")), "learned network re-parses identically");
    return "10 networks, 10 datasets, CLI synth/sample/learn twice";
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<std::string(Check&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "exact-solver oracle equivalence", 60, criterion1},
        {2, "measure correctness", 10, criterion2},
        {3, "score decomposability", 10, criterion3},
        {4, "monotone scores and SCORE-rule termination", 120, criterion4},
        {5, "weak-parent recovery scenario", 10, criterion5},
        {6, "37-variable sparse candidate vs greedy", 120, criterion6},
        {7, "sampling fidelity", 10, criterion7},
        {8, "format round trips and CLI determinism", 5, criterion8},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        try {
            detail = cr.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
            detail = "aborted";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = check.ok();
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << cr.id << ": " << cr.name << " -- " << detail << " ["
                  << check.checks() - check.failures() << "/" << check.checks() << " checks, " << fmt(secs, 3)
                  << " s, budget " << cr.budget_s << " s]" << std::endl;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - static_cast<std::size_t>(failed) << "/"
              << criteria.size() << std::endl;
    return failed ? 1 : 0;
}
