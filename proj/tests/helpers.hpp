#pragma once

#include "sparsecand/dag.hpp"
#include "sparsecand/dataset.hpp"
#include "sparsecand/decompose.hpp"
#include "sparsecand/network.hpp"
#include "sparsecand/rng.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <string>
#include <unistd.h>
#include <vector>

namespace testing_util {

using namespace sparsecand;

// Uniform random data, independent columns.
inline Dataset random_dataset(std::size_t vars, std::size_t rows, std::uint64_t seed, std::size_t max_card = 3) {
    Rng rng(seed);
    std::vector<VariableDecl> decls(vars);
    for (std::size_t v = 0; v < vars; ++v) {
        decls[v].name = "V" + std::to_string(v);
        const std::size_t card = 2 + rng.below(max_card - 1);
        for (std::size_t s = 0; s < card; ++s) decls[v].states.push_back(std::to_string(s));
    }
    Dataset d(decls, rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t v = 0; v < vars; ++v) d.set(r, v, static_cast<State>(rng.below(decls[v].cardinality())));
    }
    return d;
}

// Random DAG: arcs only from lower to higher positions of a random order.
inline Dag random_dag(std::size_t n, double density, Rng& rng, std::size_t max_parents = 3) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t t = n; t > 1; --t) std::swap(order[t - 1], order[rng.below(t)]);
    Dag g(n);
    for (std::size_t b = 1; b < n; ++b) {
        for (std::size_t a = 0; a < b; ++a) {
            if (g.parents(order[b]).size() < max_parents && rng.uniform() < density) g.add_edge(order[a], order[b]);
        }
    }
    return g;
}

inline CandidateSets random_candidates(std::size_t n, std::size_t k, Rng& rng) {
    CandidateSets c(n);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t size = rng.below(std::min(k, n - 1) + 1);
        std::vector<int> pool;
        for (std::size_t u = 0; u < n; ++u) {
            if (u != v) pool.push_back(static_cast<int>(u));
        }
        for (std::size_t t = 0; t < size; ++t) std::swap(pool[t], pool[t + rng.below(pool.size() - t)]);
        c[v].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
        std::sort(c[v].begin(), c[v].end());
    }
    return c;
}

inline FamilyWeights random_weights(const CandidateGraph& h, Rng& rng, double forbid_prob = 0.0) {
    FamilyWeights w(h);
    for (int v = 0; v < static_cast<int>(h.size()); ++v) {
        for (std::uint32_t m = 0; m < w.subsets(v); ++m) {
            w.at(v, m) = m != 0 && rng.uniform() < forbid_prob ? -INFINITY : 10.0 * rng.uniform() - 3.0;
        }
    }
    return w;
}

// Network for the four-variable scenario: D -> C -> A <- B with A depending
// mostly on C and weakly on B, so I(A;C) > I(A;D) > I(A;B) > 0.
// Indices: B = 0, C = 1, D = 2, A = 3. With `b_children`, B also gets two
// noisy copies E = 4 and F = 5; they outrank A among B's candidates, so the
// A-B dependence cannot be learned through an A -> B arc in the first round.
inline BayesianNetwork scenario_network(double b_effect = 0.1, bool b_children = false) {
    auto binary = [](const std::string& name) { return VariableDecl{name, {"0", "1"}}; };
    std::vector<VariableDecl> vars{binary("B"), binary("C"), binary("D"), binary("A")};
    std::vector<Cpt> cpts(4);
    if (b_children) {
        vars.push_back(binary("E"));
        vars.push_back(binary("F"));
        cpts.push_back({{0}, {0.9, 0.1, 0.1, 0.9}});
        cpts.push_back({{0}, {0.85, 0.15, 0.15, 0.85}});
    }
    cpts[0] = {{}, {0.5, 0.5}};
    cpts[2] = {{}, {0.5, 0.5}};
    cpts[1] = {{2}, {0.9, 0.1, 0.1, 0.9}};
    std::vector<double> a;
    for (int b = 0; b < 2; ++b) {
        for (int c = 0; c < 2; ++c) {
            const double p1 = 0.15 + 0.7 * c + b_effect * (2 * b - 1);
            a.push_back(1 - p1);
            a.push_back(p1);
        }
    }
    cpts[3] = {{0, 1}, a};
    return BayesianNetwork(vars, cpts);
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("sparsecand_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace testing_util
