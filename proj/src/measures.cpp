#include "sparsecand/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sparsecand {

namespace {

double xlog2(double num, double den) { return num > 0 ? std::log2(num / den) : 0.0; }

} // namespace

double mutual_information_split(const ContingencyTable& t, int var) {
    if (t.total() == 0) throw std::invalid_argument("mutual information of an empty table");
    const std::size_t r = t.dims()[t.axis_of(var)];
    const std::size_t q = t.size() / r;
    std::vector<double> n_x(r, 0.0), n_rest(q, 0.0);
    for_each_family_cell(t, var, [&](std::size_t pa, std::size_t x, Count n) {
        n_x[x] += static_cast<double>(n);
        n_rest[pa] += static_cast<double>(n);
    });
    const double total = static_cast<double>(t.total());
    double mi = 0.0;
    for_each_family_cell(t, var, [&](std::size_t pa, std::size_t x, Count n) {
        if (n) {
            const double c = static_cast<double>(n);
            mi += c / total * xlog2(c * total, n_x[x] * n_rest[pa]);
        }
    });
    return std::max(mi, 0.0);
}

double mutual_information(const ContingencyTable& t) {
    if (t.arity() != 2) throw std::invalid_argument("mutual information needs a two-variable table");
    return mutual_information_split(t, t.scope()[0]);
}

double mutual_information(const JointTable& p) {
    std::vector<double> px(p.rows, 0.0), py(p.cols, 0.0);
    for (std::size_t a = 0; a < p.rows; ++a) {
        for (std::size_t b = 0; b < p.cols; ++b) {
            px[a] += p.at(a, b);
            py[b] += p.at(a, b);
        }
    }
    double mi = 0.0;
    for (std::size_t a = 0; a < p.rows; ++a) {
        for (std::size_t b = 0; b < p.cols; ++b) {
            if (p.at(a, b) > 0) mi += p.at(a, b) * std::log2(p.at(a, b) / (px[a] * py[b]));
        }
    }
    return std::max(mi, 0.0);
}

double conditional_mutual_information(const ContingencyTable& t, int x, int y) {
    if (x == y) throw std::invalid_argument("conditional MI needs two distinct variables");
    if (t.total() == 0) throw std::invalid_argument("conditional MI of an empty table");
    const std::size_t ax = t.axis_of(x), ay = t.axis_of(y);
    const std::size_t rx = t.dims()[ax], ry = t.dims()[ay];
    const std::size_t nz = t.size() / (rx * ry);
    // z index over the remaining axes, last fastest.
    std::vector<std::size_t> z_stride(t.arity(), 0);
    for (std::size_t a = t.arity(), s = 1; a-- > 0;) {
        if (a == ax || a == ay) continue;
        z_stride[a] = s;
        s *= t.dims()[a];
    }
    std::vector<double> n_xz(nz * rx, 0.0), n_yz(nz * ry, 0.0), n_z(nz, 0.0);
    std::vector<std::size_t> state(t.arity(), 0);
    auto visit = [&](auto&& f) {
        std::fill(state.begin(), state.end(), 0);
        for (std::size_t flat = 0; flat < t.size(); ++flat) {
            std::size_t z = 0;
            for (std::size_t a = 0; a < t.arity(); ++a) z += state[a] * z_stride[a];
            f(z, state[ax], state[ay], t[flat]);
            for (std::size_t a = t.arity(); a-- > 0;) {
                if (++state[a] < t.dims()[a]) break;
                state[a] = 0;
            }
        }
    };
    visit([&](std::size_t z, std::size_t vx, std::size_t vy, Count n) {
        const double c = static_cast<double>(n);
        n_xz[z * rx + vx] += c;
        n_yz[z * ry + vy] += c;
        n_z[z] += c;
    });
    const double total = static_cast<double>(t.total());
    double cmi = 0.0;
    visit([&](std::size_t z, std::size_t vx, std::size_t vy, Count n) {
        if (!n) return;
        const double c = static_cast<double>(n);
        cmi += c / total * std::log2(c * n_z[z] / (n_xz[z * rx + vx] * n_yz[z * ry + vy]));
    });
    return std::max(cmi, 0.0);
}

double kl_discrete(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("KL: distributions differ in shape");
    double kl = 0.0;
    for (std::size_t e = 0; e < p.size(); ++e) {
        if (p[e] <= 0) continue;
        if (q[e] <= 0) throw std::domain_error("KL: q is zero where p is positive");
        kl += p[e] * std::log2(p[e] / q[e]);
    }
    return std::max(kl, 0.0);
}

double kl_discrete(const JointTable& p, const JointTable& q) {
    if (p.rows != q.rows || p.cols != q.cols) throw std::invalid_argument("KL: distributions differ in shape");
    return kl_discrete(std::span<const double>(p.p), std::span<const double>(q.p));
}

JointTable empirical_joint(const ContingencyTable& t, int i, int j) {
    if (t.arity() != 2) throw std::invalid_argument("empirical joint needs a two-variable table");
    if (t.total() == 0) throw std::invalid_argument("empirical joint of an empty table");
    const std::size_t ai = t.axis_of(i), aj = t.axis_of(j);
    JointTable out{t.dims()[ai], t.dims()[aj], {}};
    out.p.assign(out.rows * out.cols, 0.0);
    const double total = static_cast<double>(t.total());
    for (std::size_t a = 0; a < out.rows; ++a) {
        for (std::size_t b = 0; b < out.cols; ++b) {
            out.p[a * out.cols + b] = static_cast<double>(t[a * t.stride(ai) + b * t.stride(aj)]) / total;
        }
    }
    return out;
}

PairwiseModel::PairwiseModel(const BayesianNetwork& b, DiscOptions opts) : b_(b), opts_(opts) {}

JointTable PairwiseModel::joint(int i, int j) {
    bool exact = opts_.mode == DiscMode::Exact;
    if (opts_.mode == DiscMode::Auto) {
        const int pair[2] = {i, j};
        exact = assignment_count(b_, ancestral_set(b_, pair)) <= opts_.exact_limit;
    }
    if (exact) return exact_pairwise_joint(b_, i, j);
    if (!mc_) mc_ = std::make_unique<PairwiseJoints>(mc_pairwise_joints(b_, opts_.mc_samples, opts_.seed));
    JointTable t = mc_->get(i, j);
    const double m = static_cast<double>(opts_.mc_samples);
    const double alpha = 1.0 / static_cast<double>(t.p.size());
    for (double& p : t.p) p = (p * m + alpha) / (m + 1.0);
    return t;
}

double m_disc(int i, int j, PairwiseModel& model, StatsCache& stats) {
    if (i == j) throw std::invalid_argument("m_disc needs two distinct variables");
    const int pair[2] = {i, j};
    JointTable empirical = empirical_joint(stats.counts(pair), i, j);
    return kl_discrete(empirical, model.joint(i, j));
}

double m_disc(int i, int j, const BayesianNetwork& b, StatsCache& stats, DiscOptions opts) {
    PairwiseModel model(b, opts);
    return m_disc(i, j, model, stats);
}

namespace {

std::vector<int> family_scope(int i, int j, std::span<const int> parents) {
    if (i == j) throw std::invalid_argument("measure needs two distinct variables");
    if (std::find(parents.begin(), parents.end(), j) != parents.end()) {
        throw std::invalid_argument("candidate is already a parent");
    }
    std::vector<int> scope(parents.begin(), parents.end());
    scope.push_back(i);
    scope.push_back(j);
    return scope;
}

} // namespace

double m_shield(int i, int j, std::span<const int> parents_of_i, StatsCache& stats) {
    return mutual_information_split(stats.counts(family_scope(i, j, parents_of_i)), i);
}

double m_shield_conditional(int i, int j, std::span<const int> parents_of_i, StatsCache& stats) {
    return conditional_mutual_information(stats.counts(family_scope(i, j, parents_of_i)), i, j);
}

double m_score(int i, int j, std::span<const int> parents_of_i, Scorer& scorer) {
    std::vector<int> ps = family_scope(i, j, parents_of_i);
    ps.erase(ps.end() - 2); // drop i
    return scorer.family(i, ps);
}

Restrictor::Restrictor(RestrictOptions opts, Scorer& scorer) : opts_(std::move(opts)), scorer_(scorer) {}

CandidateSets Restrictor::restrict(const BayesianNetwork& b) {
    const int n = static_cast<int>(b.size());
    StatsCache& stats = scorer_.stats();
    if (b.size() != stats.data().num_variables()) throw std::invalid_argument("network and dataset sizes differ");
    for (int i = 0; i < n; ++i) {
        if (b.dag().parents(i).size() > opts_.k) {
            throw std::invalid_argument("k = " + std::to_string(opts_.k) + " is smaller than the parent set of '" +
                                        b.variable(i).name + "'");
        }
    }

    const bool filtering = opts_.mi_floor.has_value() && !measures_.empty();
    if (opts_.mi_floor && first_mi_.empty()) {
        first_mi_.assign(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const int pair[2] = {i, j};
                first_mi_[i][j] = first_mi_[j][i] = mutual_information(stats.counts(pair));
            }
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> next(n, std::vector<double>(n, nan));
    std::unique_ptr<PairwiseModel> model;
    if (opts_.kind == MeasureKind::Disc) model = std::make_unique<PairwiseModel>(b, opts_.disc);
    skipped_ = 0;

    CandidateSets out(n);
    for (int i = 0; i < n; ++i) {
        const auto& pa = b.dag().parents(i);
        std::vector<int> others;
        for (int j = 0; j < n; ++j) {
            if (j == i || std::binary_search(pa.begin(), pa.end(), j)) continue;
            others.push_back(j);
            if (filtering && first_mi_[i][j] < *opts_.mi_floor && !std::isnan(measures_[i][j])) {
                next[i][j] = measures_[i][j];
                ++skipped_;
                continue;
            }
            switch (opts_.kind) {
            case MeasureKind::Disc: next[i][j] = m_disc(i, j, *model, stats); break;
            case MeasureKind::Shield: next[i][j] = m_shield(i, j, pa, stats); break;
            case MeasureKind::Score: next[i][j] = m_score(i, j, pa, scorer_); break;
            }
        }
        std::stable_sort(others.begin(), others.end(), [&](int a, int c) {
            if (next[i][a] != next[i][c]) return next[i][a] > next[i][c];
            return a < c;
        });
        const std::size_t take = std::min(opts_.k - pa.size(), others.size());
        std::vector<int> c(pa.begin(), pa.end());
        c.insert(c.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take));
        std::sort(c.begin(), c.end());
        out[i] = std::move(c);
    }
    measures_ = std::move(next);
    return out;
}

CandidateSets restrict_step(const BayesianNetwork& b, Scorer& scorer, const RestrictOptions& opts) {
    Restrictor r(opts, scorer);
    return r.restrict(b);
}

void write_candidates(std::ostream& out, const std::vector<VariableDecl>& variables, const CandidateSets& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        out << "candidates " << variables[i].name;
        for (int j : c[i]) out << ' ' << variables[j].name;
        out << '\n';
    }
}

} // namespace sparsecand
