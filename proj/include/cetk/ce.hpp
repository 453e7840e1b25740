#pragma once

// Nonparametric copula entropy and the quantities built from it. Copula
// entropy is estimated in two steps: rank-transform every margin to the
// empirical copula sample, then apply the kNN entropy estimator to it.
// Mutual information is its negative; CMI and TE are signed sums of CE terms.

#include <algorithm>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cetk/dataset.hpp"
#include "cetk/error.hpp"
#include "cetk/knn.hpp"

namespace cetk {

struct CEResult {
    double ce = 0.0;  // nats, <= 0 in theory
    double mi = 0.0;  // = -ce
    EntropyConfig config;
    TiePolicy tie_policy;
    Eigen::Index T = 0;
    Eigen::Index dims = 0;
};

/// Pairwise MI (= -CE) with a zero diagonal.
struct DependenceMatrix {
    Matrix values;
    std::vector<std::string> names;
};

using ColumnGroup = std::vector<int>;
using VectorPartition = std::vector<ColumnGroup>;

/// CE of the selected columns of an existing empirical copula sample. A
/// single column has CE 0 by definition and is not estimated.
inline double copula_entropy_of(const PseudoObservations& pobs, std::span<const int> cols,
                                const EntropyConfig& cfg) {
    if (cols.size() < 2) {
        return 0.0;
    }
    Matrix sub(pobs.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        sub.col(static_cast<Eigen::Index>(j)) = pobs.values.col(cols[j]);
    }
    return ksg_entropy(sub, cfg).value;
}

inline CEResult copula_entropy(const Dataset& d, const EntropyConfig& cfg = {},
                               const TiePolicy& tp = {}) {
    if (d.cols() < 2) {
        throw DimensionError("copula entropy needs at least 2 variables, got " +
                             std::to_string(d.cols()));
    }
    cfg.validate(d.rows());
    const auto pobs = pseudo_observations(d, tp);
    std::vector<int> all(static_cast<std::size_t>(d.cols()));
    std::iota(all.begin(), all.end(), 0);
    CEResult r;
    try {
        r.ce = copula_entropy_of(pobs, all, cfg);
    } catch (const EstimatorError& e) {
        throw EstimatorError(std::string(e.what()) +
                             (pobs.degenerate() ? " (constant column present)" : ""));
    }
    r.mi = -r.ce;
    r.config = cfg;
    r.tie_policy = tp;
    r.T = d.rows();
    r.dims = d.cols();
    return r;
}

inline DependenceMatrix ce_matrix(const Dataset& d, const EntropyConfig& cfg = {},
                                  const TiePolicy& tp = {}) {
    const auto n = d.cols();
    if (n < 2) {
        throw DimensionError("ce_matrix needs at least 2 variables");
    }
    cfg.validate(d.rows());
    const auto pobs = pseudo_observations(d, tp);
    DependenceMatrix out{Matrix::Zero(n, n), d.names()};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int pair[2] = {i, j};
            double mi = 0.0;
            try {
                mi = -copula_entropy_of(pobs, pair, cfg);
            } catch (const EstimatorError& e) {
                throw EstimatorError(std::string(e.what()) + " [pair " +
                                     d.names()[static_cast<std::size_t>(i)] + ", " +
                                     d.names()[static_cast<std::size_t>(j)] + "]");
            }
            out.values(i, j) = mi;
            out.values(j, i) = mi;
        }
    }
    return out;
}

namespace detail {

inline void check_groups(const Dataset& d, const std::vector<const ColumnGroup*>& groups) {
    std::set<int> seen;
    for (const auto* g : groups) {
        if (g->empty()) {
            throw PartitionError("column groups must be nonempty");
        }
        for (const int c : *g) {
            d.check_column(c);
            if (!seen.insert(c).second) {
                throw PartitionError("column " + std::to_string(c) + " appears in more than one group");
            }
        }
    }
}

inline std::vector<int> sorted_union(std::initializer_list<const ColumnGroup*> groups) {
    std::vector<int> out;
    for (const auto* g : groups) {
        out.insert(out.end(), g->begin(), g->end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Association among random vectors: CE of all selected columns minus the
/// sum of within-group CEs. 0 under mutual independence of the groups,
/// negative otherwise.
inline double vector_association(const Dataset& d, const VectorPartition& parts,
                                 const EntropyConfig& cfg = {}, const TiePolicy& tp = {}) {
    if (parts.size() < 2) {
        throw PartitionError("vector association needs at least 2 groups");
    }
    std::vector<const ColumnGroup*> ptrs;
    std::vector<int> all;
    for (const auto& g : parts) {
        ptrs.push_back(&g);
        all.insert(all.end(), g.begin(), g.end());
    }
    detail::check_groups(d, ptrs);
    cfg.validate(d.rows());
    std::sort(all.begin(), all.end());
    const auto pobs = pseudo_observations(d, tp);
    double value = copula_entropy_of(pobs, all, cfg);
    for (const auto& g : parts) {
        ColumnGroup sorted = g;
        std::sort(sorted.begin(), sorted.end());
        value -= copula_entropy_of(pobs, sorted, cfg);
    }
    return value;
}

/// I(x; y | z) = H_c(x,z) + H_c(y,z) - H_c(x,y,z) - H_c(z). The last term
/// vanishes for a single conditioning column.
inline double conditional_mi_from(const PseudoObservations& pobs, const ColumnGroup& x,
                                  const ColumnGroup& y, const ColumnGroup& z,
                                  const EntropyConfig& cfg) {
    const auto xz = detail::sorted_union({&x, &z});
    const auto yz = detail::sorted_union({&y, &z});
    const auto xyz = detail::sorted_union({&x, &y, &z});
    const auto zz = detail::sorted_union({&z});
    return copula_entropy_of(pobs, xz, cfg) + copula_entropy_of(pobs, yz, cfg) -
           copula_entropy_of(pobs, xyz, cfg) - copula_entropy_of(pobs, zz, cfg);
}

inline double conditional_mi(const Dataset& d, const ColumnGroup& x, const ColumnGroup& y,
                             const ColumnGroup& z, const EntropyConfig& cfg = {},
                             const TiePolicy& tp = {}) {
    if (z.empty()) {
        throw ContractError("conditioning set is empty; use copula_entropy for unconditional MI");
    }
    detail::check_groups(d, {&x, &y, &z});
    cfg.validate(d.rows());
    const auto pobs = pseudo_observations(d, tp);
    return conditional_mi_from(pobs, x, y, z, cfg);
}

/// How the lag enters the (future, history, source) triple. The default
/// keeps the one-step form and moves the target future out to t + l.
enum class LagEmbedding {
    /// (y_{t+l}, y_t, x_t)
    target_ahead,
    /// (y_{t+1}, y_t, x_{t-l+1})
    source_behind,
};

/// Rows of the (target future, target history, source) triple for a lag.
inline Dataset transfer_triple(const Eigen::Ref<const Vector>& source,
                               const Eigen::Ref<const Vector>& target, int lag,
                               LagEmbedding embedding = LagEmbedding::target_ahead) {
    const auto t = source.size();
    const auto rows = t - lag;
    Matrix m(rows, 3);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (embedding == LagEmbedding::target_ahead) {
            m(i, 0) = target[i + lag];
            m(i, 1) = target[i];
            m(i, 2) = source[i];
        } else {
            // t runs over lag-1 .. T-2
            const Eigen::Index now = i + lag - 1;
            m(i, 0) = target[now + 1];
            m(i, 1) = target[now];
            m(i, 2) = source[now - lag + 1];
        }
    }
    return Dataset(std::move(m), {"target_future", "target_history", "source"});
}

inline double transfer_entropy(const Eigen::Ref<const Vector>& source,
                               const Eigen::Ref<const Vector>& target, int lag,
                               const EntropyConfig& cfg = {}, const TiePolicy& tp = {},
                               LagEmbedding embedding = LagEmbedding::target_ahead) {
    if (source.size() != target.size()) {
        throw LengthError("source and target series must have equal length");
    }
    if (lag < 1) {
        throw ConfigError("lag must be >= 1");
    }
    const auto minimum = static_cast<Eigen::Index>(lag) + cfg.k + 2;
    if (source.size() < minimum) {
        throw LengthError("series too short for lag " + std::to_string(lag) + ": need at least " +
                          std::to_string(minimum) + " points, got " +
                          std::to_string(source.size()));
    }
    const auto triple = transfer_triple(source, target, lag, embedding);
    return conditional_mi(triple, {0}, {2}, {1}, cfg, tp);
}

}  // namespace cetk
