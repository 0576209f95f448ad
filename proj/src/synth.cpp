#include "sparsecand/synth.hpp"

#include "sparsecand/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sparsecand {

namespace {

std::size_t weighted_pick(Rng& rng, const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = rng.uniform() * total;
    for (std::size_t t = 0; t < weights.size(); ++t) {
        if (u < weights[t]) return t;
        u -= weights[t];
    }
    return weights.size() - 1;
}

} // namespace

BayesianNetwork random_network(const SynthConfig& cfg) {
    if (cfg.num_vars < 1) throw std::invalid_argument("need at least one variable");
    if (cfg.cardinalities.empty()) throw std::invalid_argument("no cardinalities to draw from");
    for (auto [card, weight] : cfg.cardinalities) {
        if (card < 2 || weight < 0) throw std::invalid_argument("cardinalities must be >= 2 with non-negative weights");
    }
    if (cfg.min_prob < 0 || cfg.min_prob * 4 >= 1) throw std::invalid_argument("min_prob out of range");
    Rng rng(cfg.seed);
    const std::size_t n = cfg.num_vars;

    std::vector<double> card_weights;
    for (auto [card, weight] : cfg.cardinalities) card_weights.push_back(weight);
    std::vector<VariableDecl> vars(n);
    for (std::size_t v = 0; v < n; ++v) {
        vars[v].name = "X" + std::to_string(v);
        const std::size_t card = cfg.cardinalities[weighted_pick(rng, card_weights)].first;
        for (std::size_t s = 0; s < card; ++s) vars[v].states.push_back("s" + std::to_string(s));
    }

    // Random topological order (Fisher-Yates).
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t t = n; t > 1; --t) std::swap(order[t - 1], order[rng.below(t)]);

    std::vector<Cpt> cpts(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const int v = order[pos];
        const std::size_t limit = std::min(cfg.max_parents, pos);
        std::vector<double> kw;
        for (std::size_t k = 0; k <= limit; ++k) kw.push_back(static_cast<double>(cfg.max_parents + 1 - k));
        const std::size_t k = weighted_pick(rng, kw);

        std::vector<int> pool(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
        std::vector<int> parents;
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t pick = t + rng.below(pool.size() - t);
            std::swap(pool[t], pool[pick]);
            parents.push_back(pool[t]);
        }
        std::sort(parents.begin(), parents.end());

        std::size_t configs = 1;
        for (int p : parents) configs *= vars[p].cardinality();
        const std::size_t r = vars[v].cardinality();
        std::vector<double> table;
        for (std::size_t c = 0; c < configs; ++c) {
            // Squared exponential draws give peakier rows than a flat Dirichlet.
            std::vector<double> row(r);
            for (auto& x : row) {
                const double e = -std::log(1.0 - rng.uniform());
                x = e * e;
            }
            double sum = std::accumulate(row.begin(), row.end(), 0.0);
            if (sum <= 0) std::fill(row.begin(), row.end(), sum = 1.0);
            for (auto& x : row) x = std::max(x / sum, cfg.min_prob);
            sum = std::accumulate(row.begin(), row.end(), 0.0);
            for (auto& x : row) table.push_back(x / sum);
        }
        cpts[v] = {std::move(parents), std::move(table)};
    }
    return BayesianNetwork(std::move(vars), std::move(cpts));
}

} // namespace sparsecand
