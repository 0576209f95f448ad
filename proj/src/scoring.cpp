#include "sparsecand/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sparsecand {

double bde_family_score(const ContingencyTable& t, int child, double ess) {
    if (!(ess > 0)) throw std::invalid_argument("BDe equivalent sample size must be positive");
    const std::size_t r = t.dims()[t.axis_of(child)];
    const std::size_t q = t.size() / r;
    const double a_x = ess / static_cast<double>(r * q);
    const double a_pa = ess / static_cast<double>(q);
    const double lg_a_x = std::lgamma(a_x);
    const double lg_a_pa = std::lgamma(a_pa);

    std::vector<Count> n_pa(q, 0);
    double score = 0.0;
    for_each_family_cell(t, child, [&](std::size_t pa, std::size_t, Count n) {
        n_pa[pa] += n;
        if (n) score += std::lgamma(a_x + static_cast<double>(n)) - lg_a_x;
    });
    for (Count n : n_pa) {
        if (n) score += lg_a_pa - std::lgamma(a_pa + static_cast<double>(n));
    }
    return score / std::numbers::ln2;
}

double mdl_family_score(const ContingencyTable& t, int child) {
    const std::size_t r = t.dims()[t.axis_of(child)];
    const std::size_t q = t.size() / r;
    std::vector<Count> n_pa(q, 0);
    for_each_family_cell(t, child, [&](std::size_t pa, std::size_t, Count n) { n_pa[pa] += n; });
    double loglik = 0.0;
    for_each_family_cell(t, child, [&](std::size_t pa, std::size_t, Count n) {
        if (n) loglik += static_cast<double>(n) * std::log2(static_cast<double>(n) / static_cast<double>(n_pa[pa]));
    });
    const double total = static_cast<double>(t.total());
    const double penalty = total > 0 ? 0.5 * std::log2(total) * static_cast<double>((r - 1) * q) : 0.0;
    return loglik - penalty;
}

double family_score(const ScoreConfig& cfg, const ContingencyTable& t, int child) {
    return cfg.kind == ScoreKind::BDe ? bde_family_score(t, child, cfg.ess) : mdl_family_score(t, child);
}

std::size_t Scorer::KeyHash::operator()(const std::vector<int>& k) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int v : k) {
        h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

Scorer::Scorer(ScoreConfig cfg, StatsCache& stats) : cfg_(cfg), stats_(stats) {
    if (cfg_.kind == ScoreKind::BDe && !(cfg_.ess > 0)) {
        throw std::invalid_argument("BDe equivalent sample size must be positive");
    }
}

double Scorer::family(int child, std::span<const int> parents) {
    std::vector<int> key;
    key.reserve(parents.size() + 1);
    key.push_back(child);
    key.insert(key.end(), parents.begin(), parents.end());
    std::sort(key.begin() + 1, key.end());
    if (std::find(key.begin() + 1, key.end(), child) != key.end()) {
        throw std::invalid_argument("variable " + std::to_string(child) + " listed as its own parent");
    }
    if (std::adjacent_find(key.begin() + 1, key.end()) != key.end()) {
        throw std::invalid_argument("duplicate parent");
    }
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const ContingencyTable& t = stats_.counts(key);
    double s = family_score(cfg_, t, child);
    memo_.emplace(std::move(key), s);
    return s;
}

double Scorer::network(const ParentSets& parents) {
    double total = 0.0;
    for (std::size_t v = 0; v < parents.size(); ++v) total += family(static_cast<int>(v), parents[v]);
    return total;
}

double Scorer::network(const Dag& g) { return network(g.parent_sets()); }

namespace {

std::vector<int> with(const std::vector<int>& ps, int v) {
    std::vector<int> out = ps;
    out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

std::vector<int> without(const std::vector<int>& ps, int v) {
    std::vector<int> out = ps;
    out.erase(std::find(out.begin(), out.end(), v));
    return out;
}

} // namespace

double Scorer::delta(const Dag& g, const Move& m) {
    const auto& pa_to = g.parents(m.to);
    switch (m.kind) {
    case MoveKind::Add:
        if (m.from == m.to || g.has_edge(m.from, m.to) || g.reaches(m.to, m.from)) {
            throw std::invalid_argument("inapplicable move: " + to_string(m));
        }
        return family(m.to, with(pa_to, m.from)) - family(m.to, pa_to);
    case MoveKind::Delete:
        if (!g.has_edge(m.from, m.to)) throw std::invalid_argument("inapplicable move: " + to_string(m));
        return family(m.to, without(pa_to, m.from)) - family(m.to, pa_to);
    case MoveKind::Reverse: {
        if (!g.has_edge(m.from, m.to)) throw std::invalid_argument("inapplicable move: " + to_string(m));
        Dag probe = g;
        probe.remove_edge(m.from, m.to);
        if (probe.reaches(m.from, m.to)) throw std::invalid_argument("inapplicable move: " + to_string(m));
        const auto& pa_from = g.parents(m.from);
        return family(m.to, without(pa_to, m.from)) - family(m.to, pa_to) +
               family(m.from, with(pa_from, m.to)) - family(m.from, pa_from);
    }
    }
    throw std::invalid_argument("unknown move kind");
}

} // namespace sparsecand
