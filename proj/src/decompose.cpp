#include "sparsecand/decompose.hpp"

#include "sparsecand/cluster_tree.hpp"
#include "sparsecand/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sparsecand {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> sorted_copy(std::span<const int> s) {
    std::vector<int> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

bool contains(const std::vector<int>& sorted, int v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

} // namespace

CandidateGraph::CandidateGraph(CandidateSets candidates) : c_(std::move(candidates)) {
    const int n = static_cast<int>(c_.size());
    for (int v = 0; v < n; ++v) {
        const auto& c = c_[v];
        for (std::size_t p = 0; p < c.size(); ++p) {
            if (c[p] < 0 || c[p] >= n) throw std::invalid_argument("candidate index out of range");
            if (c[p] == v) throw std::invalid_argument("variable listed as its own candidate");
            if (p > 0 && c[p - 1] >= c[p]) throw std::invalid_argument("candidate sets must be sorted and unique");
        }
    }
}

std::size_t CandidateGraph::max_in_degree() const {
    std::size_t k = 0;
    for (const auto& c : c_) k = std::max(k, c.size());
    return k;
}

bool CandidateGraph::has_arc(int from, int to) const { return position(to, from) >= 0; }

int CandidateGraph::position(int child, int parent) const {
    const auto& c = c_[child];
    auto it = std::lower_bound(c.begin(), c.end(), parent);
    return it != c.end() && *it == parent ? static_cast<int>(it - c.begin()) : -1;
}

FamilyWeights::FamilyWeights(const CandidateGraph& h) : w_(h.size()) {
    for (std::size_t v = 0; v < h.size(); ++v) {
        const std::size_t k = h.candidates(static_cast<int>(v)).size();
        if (k > kMaxCandidates) {
            throw LimitError("candidate set of size " + std::to_string(k) + " exceeds the weight table limit of " +
                             std::to_string(kMaxCandidates));
        }
        w_[v].assign(std::size_t{1} << k, 0.0);
    }
}

std::size_t FamilyWeights::entries() const {
    std::size_t total = 0;
    for (const auto& row : w_) total += row.size();
    return total;
}

std::vector<int> mask_to_parents(const CandidateGraph& h, int v, std::uint32_t mask) {
    std::vector<int> out;
    const auto& c = h.candidates(v);
    for (std::size_t p = 0; p < c.size(); ++p) {
        if (mask >> p & 1U) out.push_back(c[p]);
    }
    return out;
}

std::uint32_t parents_to_mask(const CandidateGraph& h, int v, std::span<const int> parents) {
    std::uint32_t mask = 0;
    for (int p : parents) {
        const int pos = h.position(v, p);
        if (pos < 0) throw std::invalid_argument("parent is not a candidate of its child");
        mask |= std::uint32_t{1} << pos;
    }
    return mask;
}

FamilyWeights weights_from_score(const CandidateGraph& h, Scorer& scorer, std::optional<std::size_t> max_in_degree) {
    FamilyWeights w(h);
    for (int v = 0; v < static_cast<int>(h.size()); ++v) {
        for (std::uint32_t mask = 0; mask < w.subsets(v); ++mask) {
            if (max_in_degree && static_cast<std::size_t>(std::popcount(mask)) > *max_in_degree) {
                w.at(v, mask) = kNegInf;
                continue;
            }
            const auto ps = mask_to_parents(h, v, mask);
            w.at(v, mask) = scorer.family(v, ps);
        }
    }
    return w;
}

double total_weight(const CandidateGraph& h, const FamilyWeights& w, const ParentSets& g) {
    if (g.size() != h.size()) throw std::invalid_argument("structure and candidate graph sizes differ");
    double total = 0.0;
    for (int v = 0; v < static_cast<int>(g.size()); ++v) total += w.at(v, parents_to_mask(h, v, g[v]));
    return total;
}

namespace detail {

std::optional<MrbnSolution> exhaustive_solve(const CandidateGraph& h, const FamilyWeights& w,
                                             std::span<const int> local, std::span<const int> decide,
                                             std::span<const int> scope,
                                             std::span<const std::pair<int, int>> forbid) {
    const std::size_t m = local.size();
    if (m > 32) throw LimitError("exhaustive solve over more than 32 vertices");
    const std::vector<int> scope_sorted = sorted_copy(scope);
    std::vector<int> index(h.size(), -1);
    for (std::size_t l = 0; l < m; ++l) index[local[l]] = static_cast<int>(l);

    struct Option {
        std::uint32_t mask;       // over C_i positions
        std::uint32_t local_mask; // parents inside the scope, as local bits
        double weight;
    };
    const std::size_t d = decide.size();
    std::vector<std::vector<Option>> options(d);
    std::vector<int> self(d);
    for (std::size_t t = 0; t < d; ++t) {
        const int v = decide[t];
        if (index[v] < 0) throw std::invalid_argument("decided vertex outside the local set");
        self[t] = index[v];
        const auto& c = h.candidates(v);
        std::vector<int> bit_of(c.size(), -1);
        for (std::size_t p = 0; p < c.size(); ++p) {
            if (!contains(scope_sorted, c[p])) continue; // outside the scope: free
            if (index[c[p]] < 0) throw std::logic_error("candidate inside the scope but outside the local set");
            bit_of[p] = index[c[p]];
        }
        for (std::uint32_t mask = 0; mask < w.subsets(v); ++mask) {
            const double x = w.at(v, mask);
            if (x == kNegInf) continue;
            std::uint32_t lm = 0;
            for (std::size_t p = 0; p < c.size(); ++p) {
                if ((mask >> p & 1U) && bit_of[p] >= 0) lm |= std::uint32_t{1} << bit_of[p];
            }
            options[t].push_back({mask, lm, x});
        }
        if (options[t].empty()) return std::nullopt;
        std::stable_sort(options[t].begin(), options[t].end(),
                         [](const Option& a, const Option& b) { return a.weight > b.weight; });
    }

    std::vector<std::uint32_t> forbid_mask(m, 0);
    for (auto [a, b] : forbid) {
        if (index[a] < 0 || index[b] < 0) throw std::invalid_argument("order constraint outside the local set");
        forbid_mask[index[a]] |= std::uint32_t{1} << index[b];
    }

    std::vector<double> suffix(d + 1, 0.0);
    for (std::size_t t = d; t-- > 0;) suffix[t] = suffix[t + 1] + options[t].front().weight;

    std::array<std::uint32_t, 32> desc{}; // desc[u]: local vertices reachable from u
    std::vector<std::size_t> pick(d, 0), best_pick;
    double best = kNegInf;

    std::function<void(std::size_t, double)> dfs = [&](std::size_t t, double cur) {
        if (t == d) {
            if (cur > best) {
                best = cur;
                best_pick = pick;
            }
            return;
        }
        if (best != kNegInf && cur + suffix[t] < best - 1e-9 * std::max(1.0, std::abs(best))) return;
        const int li = self[t];
        const std::uint32_t me = std::uint32_t{1} << li;
        for (std::size_t o = 0; o < options[t].size(); ++o) {
            const Option& opt = options[t][o];
            const std::uint32_t ps = opt.local_mask;
            if (ps & (desc[li] | me)) continue; // would close a cycle
            const auto saved = desc;
            const std::uint32_t add = me | desc[li];
            bool violated = false;
            for (std::size_t u = 0; u < m; ++u) {
                if ((ps >> u & 1U) || (desc[u] & ps)) desc[u] |= add;
                if (desc[u] & forbid_mask[u]) violated = true;
            }
            if (!violated) {
                pick[t] = o;
                dfs(t + 1, cur + opt.weight);
            }
            desc = saved;
        }
    };
    dfs(0, 0.0);
    if (best_pick.empty() && d > 0) return std::nullopt;

    MrbnSolution sol{ParentSets(h.size()), best == kNegInf ? 0.0 : best};
    for (std::size_t t = 0; t < d; ++t) sol.parents[decide[t]] = mask_to_parents(h, decide[t], options[t][best_pick[t]].mask);
    return sol;
}

} // namespace detail

MrbnSolution brute_force_mrbn(const CandidateGraph& h, const FamilyWeights& w, const SolverLimits& limits) {
    if (h.size() > limits.brute_max_vertices) {
        throw LimitError("brute force limited to " + std::to_string(limits.brute_max_vertices) + " vertices, got " +
                         std::to_string(h.size()));
    }
    std::vector<int> all(h.size());
    std::iota(all.begin(), all.end(), 0);
    auto sol = detail::exhaustive_solve(h, w, all, all, all, {});
    if (!sol) return {ParentSets(h.size()), kNegInf};
    return *sol;
}

std::vector<std::vector<int>> scc_decompose(const CandidateGraph& h) {
    const int n = static_cast<int>(h.size());
    std::vector<std::vector<int>> out_arcs(n);
    for (int v = 0; v < n; ++v) {
        for (int p : h.candidates(v)) out_arcs[p].push_back(v);
    }
    // Iterative Tarjan; components come out sinks first.
    std::vector<int> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::vector<int>> comps;
    int counter = 0;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<int, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next < out_arcs[v].size()) {
                const int u = out_arcs[v][next++];
                if (index[u] < 0) {
                    index[u] = low[u] = counter++;
                    stack.push_back(u);
                    on_stack[u] = true;
                    call.emplace_back(u, 0);
                } else if (on_stack[u]) {
                    low[v] = std::min(low[v], index[u]);
                }
                continue;
            }
            const int done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<int> comp;
                int u;
                do {
                    u = stack.back();
                    stack.pop_back();
                    on_stack[u] = false;
                    comp.push_back(u);
                } while (u != done);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::reverse(comps.begin(), comps.end());
    return comps;
}

bool respects_order(const Dag& g, std::span<const int> order) {
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            if (g.reaches(order[b], order[a])) return false;
        }
    }
    return true;
}

SeparatorCheck check_separator(const CandidateGraph& h, std::span<const int> component, std::span<const int> s) {
    const std::vector<int> comp = sorted_copy(component);
    const std::vector<int> sep = sorted_copy(s);
    if (std::adjacent_find(sep.begin(), sep.end()) != sep.end()) return {std::nullopt, "separator lists a vertex twice"};
    for (int v : sep) {
        if (!contains(comp, v)) return {std::nullopt, "separator vertex " + std::to_string(v) + " is outside the component"};
    }
    std::vector<int> rest;
    std::set_difference(comp.begin(), comp.end(), sep.begin(), sep.end(), std::back_inserter(rest));

    // Condition 1: H' minus S falls apart.
    const int n = static_cast<int>(h.size());
    std::vector<int> part(n, -1);
    std::vector<std::vector<int>> undirected(n);
    for (int v : rest) {
        for (int p : h.candidates(v)) {
            if (contains(rest, p)) {
                undirected[v].push_back(p);
                undirected[p].push_back(v);
            }
        }
    }
    int parts = 0;
    for (int v : rest) {
        if (part[v] >= 0) continue;
        std::vector<int> todo{v};
        part[v] = parts;
        while (!todo.empty()) {
            const int u = todo.back();
            todo.pop_back();
            for (int x : undirected[u]) {
                if (part[x] < 0) {
                    part[x] = parts;
                    todo.push_back(x);
                }
            }
        }
        ++parts;
    }
    if (parts < 2) return {std::nullopt, "condition 1 failed: removing the separator does not disconnect the component"};

    // Condition 2: each family lies inside one side. Parts touched by a single
    // family must share a side.
    std::vector<int> group(parts);
    std::iota(group.begin(), group.end(), 0);
    std::function<int(int)> find = [&](int x) { return group[x] == x ? x : group[x] = find(group[x]); };
    std::vector<int> touched_by(n, -1);
    for (int v : comp) {
        int first = -1;
        auto touch = [&](int u) {
            if (part[u] < 0) return;
            if (first < 0) first = part[u];
            else group[find(part[u])] = find(first);
        };
        touch(v);
        for (int p : h.candidates(v)) {
            if (contains(comp, p)) touch(p);
        }
        touched_by[v] = first;
    }
    std::vector<int> roots;
    for (int p = 0; p < parts; ++p) {
        if (find(p) == p) roots.push_back(p);
    }
    if (roots.size() < 2) {
        return {std::nullopt, "condition 2 failed: no split into two sides keeps every family on one side"};
    }

    // Largest groups first, each to the lighter side.
    std::vector<std::size_t> group_size(parts, 0);
    for (int v : rest) ++group_size[find(part[v])];
    std::stable_sort(roots.begin(), roots.end(), [&](int a, int b) { return group_size[a] > group_size[b]; });
    std::vector<int> side_of_group(parts, 0);
    std::size_t load[2] = {0, 0};
    for (int r : roots) {
        const int side = load[1] < load[0] ? 1 : 0;
        side_of_group[r] = side;
        load[side] += group_size[r];
    }

    SeparatorSplit split;
    split.separator = sep;
    for (int v : rest) split.side[side_of_group[find(part[v])]].push_back(v);
    for (int v : comp) {
        int side;
        if (touched_by[v] >= 0) {
            side = side_of_group[find(touched_by[v])];
        } else {
            side = split.assigned[1].size() < split.assigned[0].size() ? 1 : 0;
        }
        split.assigned[side].push_back(v);
    }
    return {std::move(split), ""};
}

std::optional<SeparatorSplit> find_separator(const CandidateGraph& h, std::span<const int> component) {
    const std::vector<int> comp = sorted_copy(component);
    const std::size_t m = comp.size();
    if (m < 3) return std::nullopt;
    for (std::size_t size = 0; size + 2 <= m; ++size) {
        std::optional<SeparatorSplit> best;
        std::size_t best_balance = 0;
        std::vector<bool> chosen(m, false);
        std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<int> s;
            for (std::size_t t = 0; t < m; ++t) {
                if (chosen[t]) s.push_back(comp[t]);
            }
            auto check = check_separator(h, comp, s);
            if (!check.split) continue;
            const std::size_t balance = std::max(check.split->side[0].size(), check.split->side[1].size());
            if (!best || balance < best_balance) {
                best = std::move(check.split);
                best_balance = balance;
            }
        } while (std::prev_permutation(chosen.begin(), chosen.end()));
        if (best) return best;
    }
    return std::nullopt;
}

namespace {

MrbnSolution solve_split(const CandidateGraph& h, const FamilyWeights& w, std::span<const int> component,
                         const SeparatorSplit& split, SeparatorStats* stats) {
    std::vector<int> local[2];
    for (int j = 0; j < 2; ++j) {
        local[j] = split.side[j];
        local[j].insert(local[j].end(), split.separator.begin(), split.separator.end());
        std::sort(local[j].begin(), local[j].end());
        if (local[j].size() > 32) throw LimitError("separator side over 32 vertices");
    }
    MrbnSolution best{ParentSets(h.size()), kNegInf};
    bool found = false;
    std::vector<int> sigma = split.separator;
    do {
        if (stats) ++stats->orders;
        // Respecting sigma: a later vertex must not reach an earlier one.
        std::vector<std::pair<int, int>> forbid;
        for (std::size_t a = 0; a < sigma.size(); ++a) {
            for (std::size_t b = a + 1; b < sigma.size(); ++b) forbid.emplace_back(sigma[b], sigma[a]);
        }
        auto g1 = detail::exhaustive_solve(h, w, local[0], split.assigned[0], component, forbid);
        if (!g1) continue;
        auto g2 = detail::exhaustive_solve(h, w, local[1], split.assigned[1], component, forbid);
        if (!g2) continue;
        ParentSets merged = g1->parents;
        for (int v : split.assigned[1]) merged[v] = g2->parents[v];
        if (!is_acyclic(merged)) throw std::logic_error("union of order-respecting side solutions is cyclic");
        const double weight = g1->weight + g2->weight;
        if (!found || weight > best.weight) {
            best = {std::move(merged), weight};
            found = true;
        }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return best;
}

} // namespace

MrbnSolution separator_solve(const CandidateGraph& h, const FamilyWeights& w, std::span<const int> component,
                             std::span<const int> s, SeparatorStats* stats) {
    auto check = check_separator(h, component, s);
    if (!check.split) throw std::invalid_argument("not a separator: " + check.error);
    return solve_split(h, w, component, *check.split, stats);
}

bool PartialMrbn::complete() const {
    return std::all_of(component_solved.begin(), component_solved.end(), [](bool b) { return b; });
}

PartialMrbn solve_mrbn_partial(const CandidateGraph& h, const FamilyWeights& w, MrbnStrategy strategy,
                               const SolverLimits& limits) {
    PartialMrbn out;
    out.parents.assign(h.size(), {});
    out.vertex_solved.assign(h.size(), false);
    out.components = scc_decompose(h);
    for (const auto& comp : out.components) {
        std::optional<MrbnSolution> sol;
        bool tried = false;
        const bool brute_ok = comp.size() <= std::max<std::size_t>(limits.brute_max_vertices, 1);
        auto brute = [&] {
            tried = true;
            sol = detail::exhaustive_solve(h, w, comp, comp, comp, {});
        };
        switch (strategy) {
        case MrbnStrategy::Brute:
            if (brute_ok) brute();
            break;
        case MrbnStrategy::Separator:
            if (comp.size() <= limits.separator_max_vertices) {
                if (auto split = find_separator(h, comp)) {
                    tried = true;
                    sol = solve_split(h, w, comp, *split, nullptr);
                } else if (brute_ok) {
                    brute();
                }
            }
            break;
        case MrbnStrategy::ClusterTree: {
            const ClusterTree ct = build_cluster_tree(h, comp);
            if (ct.max_cluster_size() <= limits.max_cluster) {
                tried = true;
                sol = cluster_tree_dp(h, w, ct, limits.max_cluster);
            }
            break;
        }
        }
        if (!tried) {
            out.component_solved.push_back(false);
            continue;
        }
        out.component_solved.push_back(true);
        if (!sol) {
            out.weight = kNegInf; // every choice forbidden
        } else {
            out.weight += sol->weight;
            for (int v : comp) out.parents[v] = sol->parents[v];
        }
        for (int v : comp) out.vertex_solved[v] = true;
    }
    return out;
}

MrbnSolution solve_mrbn(const CandidateGraph& h, const FamilyWeights& w, MrbnStrategy strategy,
                        const SolverLimits& limits) {
    PartialMrbn p = solve_mrbn_partial(h, w, strategy, limits);
    for (std::size_t c = 0; c < p.components.size(); ++c) {
        if (!p.component_solved[c]) {
            throw LimitError("strongly connected component of " + std::to_string(p.components[c].size()) +
                             " vertices is over the solver limits");
        }
    }
    return {std::move(p.parents), p.weight};
}

void write_decomposition(std::ostream& out, const CandidateGraph& h) {
    out << "component\tsize\tmax_cluster\tvertices\n";
    const auto comps = scc_decompose(h);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const ClusterTree ct = build_cluster_tree(h, comps[c]);
        out << c << '\t' << comps[c].size() << '\t' << ct.max_cluster_size() << '\t';
        for (std::size_t t = 0; t < comps[c].size(); ++t) out << (t ? "," : "") << comps[c][t];
        out << '\n';
    }
}

} // namespace sparsecand
