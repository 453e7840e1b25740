#pragma once

// Pipelines on top of the CE estimators: variable selection, time-lag
// estimation, system identification and Chow-Liu dependence trees.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "cetk/ce.hpp"
#include "cetk/dataset.hpp"
#include "cetk/error.hpp"

namespace cetk {

// ---------------------------------------------------------------------------
// Variable selection

struct ScoredVariable {
    std::string name;
    int column = 0;
    double score = 0.0;  // |CE with target|, nats
};

struct SelectionRanking {
    std::string target;
    std::vector<ScoredVariable> ranking;  // non-increasing score
};

inline SelectionRanking select_variables(const Dataset& d, int target, const EntropyConfig& cfg = {},
                                         const TiePolicy& tp = {}) {
    d.check_column(target);
    if (d.cols() < 2) {
        throw DimensionError("variable selection needs a target and at least one candidate");
    }
    cfg.validate(d.rows());
    const auto pobs = pseudo_observations(d, tp);
    SelectionRanking out;
    out.target = d.names()[static_cast<std::size_t>(target)];
    for (int j = 0; j < d.cols(); ++j) {
        if (j == target) {
            continue;
        }
        const int pair[2] = {std::min(j, target), std::max(j, target)};
        out.ranking.push_back(
            {d.names()[static_cast<std::size_t>(j)], j, std::abs(copula_entropy_of(pobs, pair, cfg))});
    }
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [](const ScoredVariable& a, const ScoredVariable& b) { return a.score > b.score; });
    return out;
}

inline nlohmann::json to_json(const SelectionRanking& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& v : s.ranking) {
        rows.push_back({{"name", v.name}, {"column", v.column}, {"score", v.score}});
    }
    return {{"target", s.target}, {"ranking", rows}};
}

// ---------------------------------------------------------------------------
// Time lag

struct LagProfile {
    std::vector<int> lags;
    std::vector<double> te;
    int best_lag = 0;
};

/// TE from source to target at every lag 1..max_lag; the estimate is the
/// first lag attaining the maximum.
inline LagProfile estimate_time_lag(const Eigen::Ref<const Vector>& source,
                                    const Eigen::Ref<const Vector>& target, int max_lag,
                                    const EntropyConfig& cfg = {}, const TiePolicy& tp = {},
                                    LagEmbedding embedding = LagEmbedding::target_ahead) {
    if (max_lag < 1) {
        throw ConfigError("max_lag must be >= 1");
    }
    LagProfile p;
    for (int l = 1; l <= max_lag; ++l) {
        p.lags.push_back(l);
        p.te.push_back(transfer_entropy(source, target, l, cfg, tp, embedding));
    }
    const auto best = std::max_element(p.te.begin(), p.te.end()) - p.te.begin();
    p.best_lag = p.lags[static_cast<std::size_t>(best)];
    return p;
}

inline nlohmann::json to_json(const LagProfile& p) {
    return {{"lags", p.lags}, {"te", p.te}, {"best_lag", p.best_lag}};
}

// ---------------------------------------------------------------------------
// System identification

struct SystemRelevance {
    /// values(i, j): relevance of state j to the derivative of state i.
    Matrix values;
    std::vector<std::string> states;
    std::vector<std::string> candidates;
    double dt = 1.0;
};

/// Candidate regressors: the raw states, optionally extended by pairwise
/// products (x_i x_j, i <= j) when augment is set.
inline SystemRelevance identify_system(const Dataset& states, double dt, const EntropyConfig& cfg = {},
                                       const TiePolicy& tp = {}, bool augment = false) {
    if (!(dt > 0.0)) {
        throw ConfigError("sampling step dt must be positive");
    }
    if (states.rows() < cfg.k + 3) {
        throw LengthError("system identification needs at least k + 3 = " +
                          std::to_string(cfg.k + 3) + " samples");
    }
    const auto m = states.cols();
    const auto t = states.rows() - 1;
    std::vector<Vector> candidates;
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < m; ++j) {
        candidates.push_back(states.values().col(j).head(t));
        names.push_back(states.names()[static_cast<std::size_t>(j)]);
    }
    if (augment) {
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = a; b < m; ++b) {
                candidates.push_back(candidates[static_cast<std::size_t>(a)].cwiseProduct(
                    candidates[static_cast<std::size_t>(b)]));
                names.push_back(states.names()[static_cast<std::size_t>(a)] + "*" +
                                states.names()[static_cast<std::size_t>(b)]);
            }
        }
    }
    const auto c = static_cast<Eigen::Index>(candidates.size());
    // columns: candidates, then forward-difference derivatives
    Matrix joint(t, c + m);
    for (Eigen::Index j = 0; j < c; ++j) {
        joint.col(j) = candidates[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto x = states.values().col(i);
        joint.col(c + i) = (x.tail(t) - x.head(t)) / dt;
    }
    const auto pobs = pseudo_observations(Dataset(std::move(joint)), tp);
    SystemRelevance out;
    out.values.resize(m, c);
    out.states = states.names();
    out.candidates = names;
    out.dt = dt;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < c; ++j) {
            const int pair[2] = {j, static_cast<int>(c) + i};
            out.values(i, j) = std::abs(copula_entropy_of(pobs, pair, cfg));
        }
    }
    return out;
}

inline nlohmann::json to_json(const SystemRelevance& s) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
        rows.emplace_back();
        for (Eigen::Index j = 0; j < s.values.cols(); ++j) {
            rows.back().push_back(s.values(i, j));
        }
    }
    return {{"states", s.states}, {"candidates", s.candidates}, {"dt", s.dt}, {"relevance", rows}};
}

// ---------------------------------------------------------------------------
// Chow-Liu tree

struct TreeEdge {
    int i = 0;
    int j = 0;  // i < j
    double weight = 0.0;  // MI = -CE
};

struct DependenceTree {
    int nodes = 0;
    std::vector<std::string> names;
    std::vector<TreeEdge> edges;

    double total_weight() const {
        double w = 0.0;
        for (const auto& e : edges) {
            w += e.weight;
        }
        return w;
    }
};

/// Maximum-weight spanning tree by Kruskal's algorithm. Edges are visited by
/// decreasing weight, ties broken by lexicographic (i, j).
inline DependenceTree maximum_spanning_tree(const Matrix& weights, std::vector<std::string> names = {}) {
    const int n = static_cast<int>(weights.rows());
    if (n < 2 || weights.cols() != n) {
        throw DimensionError("spanning tree needs a square weight matrix with n >= 2");
    }
    std::vector<TreeEdge> candidates;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            candidates.push_back({i, j, weights(i, j)});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const TreeEdge& a, const TreeEdge& b) {
        if (a.weight != b.weight) {
            return a.weight > b.weight;
        }
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    DependenceTree tree;
    tree.nodes = n;
    tree.names = names.empty() ? default_names(n) : std::move(names);
    for (const auto& e : candidates) {
        const int ri = find(e.i);
        const int rj = find(e.j);
        if (ri != rj) {
            parent[static_cast<std::size_t>(ri)] = rj;
            tree.edges.push_back(e);
            if (static_cast<int>(tree.edges.size()) == n - 1) {
                break;
            }
        }
    }
    return tree;
}

inline DependenceTree chow_liu_tree(const Dataset& d, const EntropyConfig& cfg = {},
                                    const TiePolicy& tp = {}) {
    const auto m = ce_matrix(d, cfg, tp);
    return maximum_spanning_tree(m.values, m.names);
}

/// One "i<TAB>j<TAB>weight" line per edge, 1-based node ids.
inline void write_edge_list(std::ostream& out, const DependenceTree& t) {
    std::ostringstream w;
    w.precision(17);
    for (const auto& e : t.edges) {
        w.str("");
        w << e.weight;
        out << (e.i + 1) << '\t' << (e.j + 1) << '\t' << w.str() << '\n';
    }
}

/// Graphviz description of the tree.
inline void write_dot(std::ostream& out, const DependenceTree& t) {
    out << "graph dependence_tree {\n";
    for (int i = 0; i < t.nodes; ++i) {
        out << "  n" << (i + 1) << " [label=\"" << t.names[static_cast<std::size_t>(i)] << "\"];\n";
    }
    for (const auto& e : t.edges) {
        out << "  n" << (e.i + 1) << " -- n" << (e.j + 1) << " [weight=" << e.weight << "];\n";
    }
    out << "}\n";
}

inline nlohmann::json to_json(const DependenceTree& t) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : t.edges) {
        edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"weight", e.weight}});
    }
    return {{"nodes", t.nodes}, {"names", t.names}, {"edges", edges}, {"total_weight", t.total_weight()}};
}

}  // namespace cetk
