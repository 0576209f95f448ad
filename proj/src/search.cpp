#include "sparsecand/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sparsecand {

namespace {

constexpr double kTieTolerance = 1e-9;

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Descendant bitsets: reach[v] has bit u set when a path v -> ... -> u exists.
std::vector<std::vector<std::uint64_t>> descendants(const Dag& g) {
    const std::size_t n = g.size(), words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> reach(n, std::vector<std::uint64_t>(words, 0));
    auto kids = g.children();
    auto order = g.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        for (int c : kids[v]) {
            reach[v][c / 64] |= std::uint64_t{1} << (c % 64);
            for (std::size_t w = 0; w < words; ++w) reach[v][w] |= reach[c][w];
        }
    }
    return reach;
}

bool test_bit(const std::vector<std::uint64_t>& bits, int v) { return (bits[v / 64] >> (v % 64)) & 1U; }

bool is_candidate(const SearchConfig& cfg, int child, int parent) {
    if (!cfg.candidates) return true;
    const auto& c = (*cfg.candidates)[child];
    return std::binary_search(c.begin(), c.end(), parent);
}

bool is_frozen(const SearchConfig& cfg, int v) { return !cfg.frozen.empty() && cfg.frozen[v]; }

bool room_for_parent(const SearchConfig& cfg, const Dag& g, int v) {
    return !cfg.max_in_degree || g.parents(v).size() < *cfg.max_in_degree;
}

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

std::uint64_t family_hash(int child, const std::vector<int>& parents) {
    std::uint64_t h = mix(static_cast<std::uint64_t>(child) + 1);
    for (int p : parents) h = mix(h ^ static_cast<std::uint64_t>(p));
    return h;
}

std::uint64_t structure_fingerprint(const ParentSets& parents) {
    std::uint64_t h = 0;
    for (std::size_t v = 0; v < parents.size(); ++v) h ^= family_hash(static_cast<int>(v), parents[v]);
    return h;
}

void TabuList::push(const ParentSets& g, std::uint64_t fingerprint) {
    if (capacity_ == 0) return;
    if (items_.size() == capacity_) {
        auto it = counts_.find(items_.front().first);
        if (--it->second == 0) counts_.erase(it);
        items_.pop_front();
    }
    items_.emplace_back(fingerprint, g);
    ++counts_[fingerprint];
}

bool TabuList::contains(const ParentSets& g, std::uint64_t fingerprint) const {
    if (!maybe_contains(fingerprint)) return false;
    return std::any_of(items_.begin(), items_.end(),
                       [&](const auto& item) { return item.first == fingerprint && item.second == g; });
}

std::vector<Move> legal_moves(const Dag& g, const SearchConfig& cfg) {
    const int n = static_cast<int>(g.size());
    if (cfg.candidates && cfg.candidates->size() != g.size()) {
        throw std::invalid_argument("candidate sets do not match the structure size");
    }
    auto reach = descendants(g);
    std::vector<Move> moves;
    // Add: from -> to is legal unless `to` already reaches `from`.
    for (int from = 0; from < n; ++from) {
        for (int to = 0; to < n; ++to) {
            if (from == to || is_frozen(cfg, to) || g.has_edge(from, to)) continue;
            if (!is_candidate(cfg, to, from) || !room_for_parent(cfg, g, to)) continue;
            if (test_bit(reach[to], from)) continue;
            moves.push_back({MoveKind::Add, from, to});
        }
    }
    for (int from = 0; from < n; ++from) {
        for (int to = 0; to < n; ++to) {
            if (from != to && !is_frozen(cfg, to) && g.has_edge(from, to)) moves.push_back({MoveKind::Delete, from, to});
        }
    }
    // Reverse: legal unless another path from -> ... -> to exists, i.e. `from`
    // reaches some other parent of `to`.
    for (int from = 0; from < n; ++from) {
        for (int to = 0; to < n; ++to) {
            if (from == to || !g.has_edge(from, to)) continue;
            if (is_frozen(cfg, to) || is_frozen(cfg, from)) continue;
            if (!is_candidate(cfg, from, to) || !room_for_parent(cfg, g, from)) continue;
            bool other_path = false;
            for (int p : g.parents(to)) {
                if (p != from && test_bit(reach[from], p)) {
                    other_path = true;
                    break;
                }
            }
            if (!other_path) moves.push_back({MoveKind::Reverse, from, to});
        }
    }
    return moves;
}

Dag apply_move(const Dag& g, const Move& m) {
    Dag out = g;
    switch (m.kind) {
    case MoveKind::Add: out.add_edge(m.from, m.to); break;
    case MoveKind::Delete: out.remove_edge(m.from, m.to); break;
    case MoveKind::Reverse: out.reverse_edge(m.from, m.to); break;
    }
    return out;
}

SearchResult greedy_hill_climb(const Dag& initial, const SearchConfig& cfg, Scorer& scorer) {
    const std::size_t n = initial.size();
    if (n != scorer.data().num_variables()) throw std::invalid_argument("structure and dataset sizes differ");
    if (cfg.patience < 1) throw std::invalid_argument("patience must be at least 1");
    if (cfg.candidates) {
        for (std::size_t v = 0; v < n; ++v) {
            for (int p : initial.parents(static_cast<int>(v))) {
                if (!is_candidate(cfg, static_cast<int>(v), p)) {
                    throw std::invalid_argument("initial structure violates the candidate sets");
                }
            }
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    // Per-family gains, valid until that family's parent set changes.
    std::vector<std::vector<double>> add_gain(n, std::vector<double>(n, nan));
    std::vector<std::vector<double>> del_gain(n, std::vector<double>(n, nan));
    auto gain_add = [&](const Dag& g, int child, int parent) {
        double& slot = add_gain[child][parent];
        if (std::isnan(slot)) {
            const auto& ps = g.parents(child);
            slot = scorer.family(child, with(ps, parent)) - scorer.family(child, ps);
        }
        return slot;
    };
    auto gain_del = [&](const Dag& g, int child, int parent) {
        double& slot = del_gain[child][parent];
        if (std::isnan(slot)) {
            const auto& ps = g.parents(child);
            slot = scorer.family(child, without(ps, parent)) - scorer.family(child, ps);
        }
        return slot;
    };
    auto invalidate = [&](int v) {
        std::fill(add_gain[v].begin(), add_gain[v].end(), nan);
        std::fill(del_gain[v].begin(), del_gain[v].end(), nan);
    };

    Dag current = initial;
    double score = scorer.network(current);
    std::uint64_t fingerprint = structure_fingerprint(current.parent_sets());
    TabuList tabu(cfg.tabu_capacity);
    tabu.push(current.parent_sets(), fingerprint);

    SearchResult result{current, score, {}};
    std::size_t since_improvement = 0;

    for (std::size_t step = 1;; ++step) {
        const auto moves = legal_moves(current, cfg);
        const Move* chosen = nullptr;
        double chosen_delta = -std::numeric_limits<double>::infinity();
        std::uint64_t chosen_fp = 0;

        for (const Move& m : moves) {
            double delta = 0.0;
            std::uint64_t fp = fingerprint ^ family_hash(m.to, current.parents(m.to));
            switch (m.kind) {
            case MoveKind::Add:
                delta = gain_add(current, m.to, m.from);
                fp ^= family_hash(m.to, with(current.parents(m.to), m.from));
                break;
            case MoveKind::Delete:
                delta = gain_del(current, m.to, m.from);
                fp ^= family_hash(m.to, without(current.parents(m.to), m.from));
                break;
            case MoveKind::Reverse:
                delta = gain_del(current, m.to, m.from) + gain_add(current, m.from, m.to);
                fp ^= family_hash(m.to, without(current.parents(m.to), m.from));
                fp ^= family_hash(m.from, current.parents(m.from));
                fp ^= family_hash(m.from, with(current.parents(m.from), m.to));
                break;
            }
            if (chosen && !(delta > chosen_delta + kTieTolerance)) continue;
            if (tabu.maybe_contains(fp) && tabu.contains(apply_move(current, m).parent_sets(), fp)) continue;
            chosen = &m;
            chosen_delta = delta;
            chosen_fp = fp;
        }

        if (!chosen) break;
        if (cfg.tabu_capacity == 0 && chosen_delta <= kTieTolerance) break;

        const Move m = *chosen;
        current = apply_move(current, m);
        invalidate(m.to);
        if (m.kind == MoveKind::Reverse) invalidate(m.from);
        score += chosen_delta;
        fingerprint = chosen_fp;
        tabu.push(current.parent_sets(), fingerprint);

        result.trace.push_back({step, m, chosen_delta, score, scorer.stats().report().fresh_computations});
        if (score > result.score + kTieTolerance) {
            result.dag = current;
            result.score = score;
            since_improvement = 0;
        } else if (++since_improvement >= cfg.patience) {
            break;
        }
    }
    // Re-derive the returned score from the families to shed accumulated rounding.
    result.score = scorer.network(result.dag);
    return result;
}

void write_trace(std::ostream& out, const std::vector<TraceRow>& trace, const std::vector<VariableDecl>& variables,
                 std::size_t rows) {
    out << "step\tmove\tfrom\tto\tdelta\tscore_per_instance\tstats\n";
    for (const auto& r : trace) {
        out << r.step << '\t' << to_string(r.move.kind) << '\t' << variables[r.move.from].name << '\t'
            << variables[r.move.to].name << '\t' << r.delta << '\t' << r.score / static_cast<double>(rows) << '\t'
            << r.fresh_stats << '\n';
    }
}

} // namespace sparsecand
