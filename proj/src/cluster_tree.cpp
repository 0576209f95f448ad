#include "sparsecand/cluster_tree.hpp"

#include "sparsecand/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsecand {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool contains(const std::vector<int>& sorted, int v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

std::size_t factorial(std::size_t n) {
    std::size_t f = 1;
    for (std::size_t t = 2; t <= n; ++t) f *= t;
    return f;
}

// {v} plus the candidates of v inside the component.
std::vector<int> family_in(const CandidateGraph& h, int v, const std::vector<int>& comp) {
    std::vector<int> fam{v};
    for (int p : h.candidates(v)) {
        if (contains(comp, p)) fam.push_back(p);
    }
    std::sort(fam.begin(), fam.end());
    return fam;
}

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::size_t intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t count = 0;
    for (int v : a) count += contains(b, v);
    return count;
}

void assign_families(const CandidateGraph& h, ClusterTree& ct) {
    ct.assignment.assign(h.size(), -1);
    for (int v : ct.vertices) {
        const auto fam = family_in(h, v, ct.vertices);
        int best = -1;
        for (std::size_t j = 0; j < ct.clusters.size(); ++j) {
            if (!is_subset(fam, ct.clusters[j])) continue;
            if (best < 0 || ct.clusters[j].size() < ct.clusters[best].size()) best = static_cast<int>(j);
        }
        ct.assignment[v] = best;
    }
}

ClusterTree single_cluster(const CandidateGraph& h, const std::vector<int>& comp) {
    ClusterTree ct;
    ct.vertices = comp;
    ct.clusters = {comp};
    assign_families(h, ct);
    return ct;
}

// Rank of a permutation of 0..s-1 in lexicographic order.
std::size_t lehmer_rank(const std::vector<int>& perm) {
    const std::size_t s = perm.size();
    std::size_t rank = 0;
    std::uint32_t used = 0;
    for (std::size_t t = 0; t < s; ++t) {
        const std::uint32_t below = (std::uint32_t{1} << perm[t]) - 1;
        const auto smaller_unused = static_cast<std::size_t>(std::popcount(below & ~used));
        rank += smaller_unused * factorial(s - 1 - t);
        used |= std::uint32_t{1} << perm[t];
    }
    return rank;
}

// Rank of the order that `pos` (position of each cluster slot in the order)
// induces on the given slots.
std::size_t restricted_rank(const std::vector<int>& slots, const std::vector<int>& pos) {
    std::vector<int> idx(slots.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return pos[slots[a]] < pos[slots[b]]; });
    return lehmer_rank(idx);
}

} // namespace

std::size_t ClusterTree::max_cluster_size() const {
    std::size_t c = 0;
    for (const auto& u : clusters) c = std::max(c, u.size());
    return c;
}

std::vector<int> ClusterTree::assigned(int j) const {
    std::vector<int> out;
    for (int v : vertices) {
        if (assignment[v] == j) out.push_back(v);
    }
    return out;
}

ClusterTree build_cluster_tree(const CandidateGraph& h) {
    std::vector<int> all(h.size());
    std::iota(all.begin(), all.end(), 0);
    return build_cluster_tree(h, all);
}

ClusterTree build_cluster_tree(const CandidateGraph& h, std::span<const int> component) {
    std::vector<int> comp(component.begin(), component.end());
    std::sort(comp.begin(), comp.end());
    const std::size_t m = comp.size();
    if (m == 0) return {};

    std::vector<int> local(h.size(), -1);
    for (std::size_t l = 0; l < m; ++l) local[comp[l]] = static_cast<int>(l);
    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    for (int v : comp) {
        const auto fam = family_in(h, v, comp);
        for (int a : fam) {
            for (int b : fam) {
                if (a != b) adj[local[a]][local[b]] = true;
            }
        }
    }

    // Min-fill elimination; ties by degree, then index.
    std::vector<bool> gone(m, false);
    std::vector<std::vector<int>> cliques;
    for (std::size_t step = 0; step < m; ++step) {
        int pick = -1;
        std::size_t pick_fill = 0, pick_degree = 0;
        for (std::size_t v = 0; v < m; ++v) {
            if (gone[v]) continue;
            std::vector<std::size_t> nb;
            for (std::size_t u = 0; u < m; ++u) {
                if (!gone[u] && adj[v][u]) nb.push_back(u);
            }
            std::size_t fill = 0;
            for (std::size_t a = 0; a < nb.size(); ++a) {
                for (std::size_t b = a + 1; b < nb.size(); ++b) fill += !adj[nb[a]][nb[b]];
            }
            if (pick < 0 || fill < pick_fill || (fill == pick_fill && nb.size() < pick_degree)) {
                pick = static_cast<int>(v);
                pick_fill = fill;
                pick_degree = nb.size();
            }
        }
        std::vector<int> clique{comp[pick]};
        std::vector<std::size_t> nb;
        for (std::size_t u = 0; u < m; ++u) {
            if (!gone[u] && adj[pick][u]) {
                nb.push_back(u);
                clique.push_back(comp[u]);
            }
        }
        for (std::size_t a : nb) {
            for (std::size_t b : nb) {
                if (a != b) adj[a][b] = true;
            }
        }
        gone[pick] = true;
        std::sort(clique.begin(), clique.end());
        cliques.push_back(std::move(clique));
    }

    ClusterTree ct;
    ct.vertices = comp;
    for (std::size_t a = 0; a < cliques.size(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < cliques.size() && !dominated; ++b) {
            if (a == b || !is_subset(cliques[a], cliques[b])) continue;
            // Equal cliques: keep the earlier copy.
            dominated = cliques[a].size() < cliques[b].size() || b < a;
        }
        if (!dominated) ct.clusters.push_back(cliques[a]);
    }

    // Maximum-weight spanning tree on intersection sizes (Kruskal).
    struct Candidate {
        std::size_t weight;
        int a, b;
    };
    std::vector<Candidate> cand;
    for (std::size_t a = 0; a < ct.clusters.size(); ++a) {
        for (std::size_t b = a + 1; b < ct.clusters.size(); ++b) {
            cand.push_back({intersection_size(ct.clusters[a], ct.clusters[b]), static_cast<int>(a), static_cast<int>(b)});
        }
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) { return x.weight > y.weight; });
    std::vector<int> uf(ct.clusters.size());
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    for (const auto& c : cand) {
        const int ra = find(c.a), rb = find(c.b);
        if (ra == rb) continue;
        uf[ra] = rb;
        ct.edges.emplace_back(c.a, c.b);
    }
    assign_families(h, ct);

    if (!validate_cluster_tree(h, ct).empty()) return single_cluster(h, comp);
    return ct;
}

std::string validate_cluster_tree(const CandidateGraph& h, const ClusterTree& ct) {
    const std::size_t nc = ct.clusters.size();
    if (ct.vertices.empty()) return nc == 0 ? "" : "clusters without vertices";
    if (nc == 0) return "no clusters";
    if (ct.assignment.size() != h.size()) return "assignment size differs from the graph size";
    for (const auto& u : ct.clusters) {
        if (!std::is_sorted(u.begin(), u.end()) || std::adjacent_find(u.begin(), u.end()) != u.end()) {
            return "cluster not sorted or has duplicates";
        }
        for (int v : u) {
            if (!contains(ct.vertices, v)) return "cluster vertex outside the component";
        }
    }
    // Tree shape.
    if (ct.edges.size() != nc - 1) return "edge count does not form a tree";
    std::vector<int> uf(nc);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    for (auto [a, b] : ct.edges) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= nc || static_cast<std::size_t>(b) >= nc) {
            return "edge endpoint out of range";
        }
        const int ra = find(a), rb = find(b);
        if (ra == rb) return "edges contain a cycle";
        uf[ra] = rb;
    }
    // Coverage and partition.
    for (std::size_t v = 0; v < h.size(); ++v) {
        const int j = ct.assignment[v];
        if (!contains(ct.vertices, static_cast<int>(v))) {
            if (j != -1) return "vertex outside the component is assigned";
            continue;
        }
        if (j < 0 || static_cast<std::size_t>(j) >= nc) return "vertex " + std::to_string(v) + " is unassigned";
        if (!is_subset(family_in(h, static_cast<int>(v), ct.vertices), ct.clusters[j])) {
            return "family of vertex " + std::to_string(v) + " not covered by its cluster";
        }
    }
    // Running intersection: clusters holding v induce a connected subtree.
    for (int v : ct.vertices) {
        std::size_t nodes = 0, links = 0;
        for (const auto& u : ct.clusters) nodes += contains(u, v);
        for (auto [a, b] : ct.edges) links += contains(ct.clusters[a], v) && contains(ct.clusters[b], v);
        if (nodes == 0) return "vertex " + std::to_string(v) + " appears in no cluster";
        if (links != nodes - 1) return "running intersection fails for vertex " + std::to_string(v);
    }
    return "";
}

MrbnSolution cluster_tree_dp(const CandidateGraph& h, const FamilyWeights& w, const ClusterTree& ct,
                             std::size_t max_cluster, DpStats* stats) {
    if (auto err = validate_cluster_tree(h, ct); !err.empty()) throw std::invalid_argument("invalid cluster tree: " + err);
    if (ct.max_cluster_size() > max_cluster) {
        throw LimitError("cluster of " + std::to_string(ct.max_cluster_size()) + " vertices exceeds the limit of " +
                         std::to_string(max_cluster));
    }
    DpStats local_stats;
    DpStats& st = stats ? *stats : local_stats;
    st = {};
    MrbnSolution out{ParentSets(h.size()), 0.0};
    const std::size_t nc = ct.clusters.size();
    if (nc == 0) return out;

    std::vector<std::vector<int>> assigned(nc);
    for (int v : ct.vertices) assigned[ct.assignment[v]].push_back(v);
    std::size_t root = 0;
    for (std::size_t j = 1; j < nc; ++j) {
        if (assigned[j].size() > assigned[root].size()) root = j;
    }
    st.root = root;

    // Root the tree.
    std::vector<std::vector<int>> nbrs(nc), children(nc);
    for (auto [a, b] : ct.edges) {
        nbrs[a].push_back(b);
        nbrs[b].push_back(a);
    }
    std::vector<int> parent(nc, -1), order{static_cast<int>(root)};
    std::vector<bool> seen(nc, false);
    seen[root] = true;
    for (std::size_t t = 0; t < order.size(); ++t) {
        const int j = order[t];
        std::sort(nbrs[j].begin(), nbrs[j].end());
        for (int c : nbrs[j]) {
            if (seen[c]) continue;
            seen[c] = true;
            parent[c] = j;
            children[j].push_back(c);
            order.push_back(c);
        }
    }

    // Best parent set of each vertex among allowed candidate positions.
    const std::size_t n = h.size();
    std::vector<std::vector<double>> best(n);
    std::vector<std::vector<std::uint32_t>> arg(n);
    for (int v : ct.vertices) {
        const std::size_t k = h.candidates(v).size();
        best[v].resize(w.subsets(v));
        arg[v].resize(w.subsets(v));
        for (std::uint32_t m = 0; m < w.subsets(v); ++m) {
            best[v][m] = w.at(v, m);
            arg[v][m] = m;
        }
        for (std::size_t b = 0; b < k; ++b) {
            const std::uint32_t bit = std::uint32_t{1} << b;
            for (std::uint32_t m = 0; m < w.subsets(v); ++m) {
                if (!(m & bit)) continue;
                const std::uint32_t sub = m ^ bit;
                if (best[v][sub] > best[v][m] || (best[v][sub] == best[v][m] && arg[v][sub] < arg[v][m])) {
                    best[v][m] = best[v][sub];
                    arg[v][m] = arg[v][sub];
                }
            }
        }
    }

    // Slot layout per cluster: separator slots, child separator slots and,
    // per assigned vertex, the slot of each candidate (-1 when external).
    struct Layout {
        std::vector<int> sep_slots;
        std::vector<std::vector<int>> child_slots;
        std::vector<int> vertex_slot;            // slot of each assigned vertex
        std::vector<std::vector<int>> cand_slot; // per assigned vertex, per candidate position
        std::vector<std::uint32_t> ext_mask;     // candidate positions outside the component
    };
    std::vector<Layout> layout(nc);
    std::vector<std::vector<double>> table(nc);
    std::vector<std::vector<std::vector<int>>> back(nc);
    auto slot_of = [&](std::size_t j, int v) {
        const auto& u = ct.clusters[j];
        auto it = std::lower_bound(u.begin(), u.end(), v);
        return it != u.end() && *it == v ? static_cast<int>(it - u.begin()) : -1;
    };
    for (std::size_t j = 0; j < nc; ++j) {
        Layout& L = layout[j];
        if (parent[j] >= 0) {
            for (int v : ct.clusters[j]) {
                if (contains(ct.clusters[parent[j]], v)) L.sep_slots.push_back(slot_of(j, v));
            }
        }
        for (int c : children[j]) {
            std::vector<int> slots;
            for (int v : ct.clusters[c]) {
                if (contains(ct.clusters[j], v)) slots.push_back(slot_of(j, v));
            }
            L.child_slots.push_back(std::move(slots));
        }
        for (int v : assigned[j]) {
            L.vertex_slot.push_back(slot_of(j, v));
            std::vector<int> cs;
            std::uint32_t ext = 0;
            const auto& c = h.candidates(v);
            for (std::size_t p = 0; p < c.size(); ++p) {
                if (!contains(ct.vertices, c[p])) {
                    ext |= std::uint32_t{1} << p;
                    cs.push_back(-1);
                } else {
                    cs.push_back(slot_of(j, c[p]));
                }
            }
            L.cand_slot.push_back(std::move(cs));
            L.ext_mask.push_back(ext);
        }
        table[j].assign(factorial(L.sep_slots.size()), kNegInf);
        back[j].resize(table[j].size());
        st.table_entries += table[j].size();
        st.order_ceiling += factorial(ct.clusters[j].size());
    }

    // Allowed candidate mask of the a-th assigned vertex given placed slots.
    auto allowed_mask = [&](const Layout& L, std::size_t a, std::uint32_t placed) {
        std::uint32_t allowed = L.ext_mask[a];
        const auto& cs = L.cand_slot[a];
        for (std::size_t p = 0; p < cs.size(); ++p) {
            if (cs[p] >= 0 && (placed >> cs[p] & 1U)) allowed |= std::uint32_t{1} << p;
        }
        return allowed;
    };

    // Bottom-up: children before parents.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int j = *it;
        const Layout& L = layout[j];
        const std::size_t u = ct.clusters[j].size();
        std::vector<int> slot_owner(u, -1); // index into assigned[j]
        for (std::size_t a = 0; a < L.vertex_slot.size(); ++a) slot_owner[L.vertex_slot[a]] = static_cast<int>(a);

        std::vector<int> perm, pos(u, 0);
        std::function<void(std::uint32_t, double)> extend = [&](std::uint32_t placed, double acc) {
            if (perm.size() == u) {
                ++st.orders_visited;
                double total = acc;
                for (std::size_t c = 0; c < children[j].size(); ++c) {
                    const double x = table[children[j][c]][restricted_rank(L.child_slots[c], pos)];
                    if (x == kNegInf) return;
                    total += x;
                }
                const std::size_t key = restricted_rank(L.sep_slots, pos);
                if (total > table[j][key]) {
                    table[j][key] = total;
                    back[j][key] = perm;
                }
                return;
            }
            for (std::size_t q = 0; q < u; ++q) {
                if (placed >> q & 1U) continue;
                double gain = 0.0;
                if (slot_owner[q] >= 0) {
                    const auto a = static_cast<std::size_t>(slot_owner[q]);
                    ++st.family_lookups;
                    gain = best[assigned[j][a]][allowed_mask(L, a, placed)];
                    if (gain == kNegInf) continue; // no admissible family at this position
                }
                pos[q] = static_cast<int>(perm.size());
                perm.push_back(static_cast<int>(q));
                extend(placed | std::uint32_t{1} << q, acc + gain);
                perm.pop_back();
            }
        };
        extend(0, 0.0);
    }
    if (st.orders_visited > st.order_ceiling) throw std::logic_error("cluster-tree DP visited more orders than exist");

    out.weight = table[root][0];
    if (out.weight == kNegInf) return out;

    // Back-trace from the root.
    std::vector<std::pair<int, std::size_t>> todo{{static_cast<int>(root), 0}};
    while (!todo.empty()) {
        auto [j, key] = todo.back();
        todo.pop_back();
        const Layout& L = layout[j];
        const auto& perm = back[j][key];
        std::vector<int> pos(perm.size());
        for (std::size_t t = 0; t < perm.size(); ++t) pos[perm[t]] = static_cast<int>(t);
        for (std::size_t a = 0; a < assigned[j].size(); ++a) {
            std::uint32_t placed = 0;
            for (std::size_t q = 0; q < perm.size(); ++q) {
                if (pos[q] < pos[L.vertex_slot[a]]) placed |= std::uint32_t{1} << q;
            }
            const int v = assigned[j][a];
            out.parents[v] = mask_to_parents(h, v, arg[v][allowed_mask(L, a, placed)]);
        }
        for (std::size_t c = 0; c < children[j].size(); ++c) {
            todo.emplace_back(children[j][c], restricted_rank(L.child_slots[c], pos));
        }
    }
    return out;
}

} // namespace sparsecand
