#pragma once

// Copula-entropy hypothesis tests: multivariate normality, copula goodness
// of fit, two-sample, change-point detection (single and multiple),
// symmetry, and permutation p-values for the resampling-friendly ones.

#include <bit>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cetk/ce.hpp"
#include "cetk/copula.hpp"
#include "cetk/dataset.hpp"
#include "cetk/error.hpp"
#include "cetk/knn.hpp"
#include "cetk/parallel.hpp"
#include "cetk/rng.hpp"

namespace cetk {

/// Label tie-break draws averaged by the two-sample family of statistics.
inline constexpr int kDefaultLabelDraws = 10;

enum class TestKind { mvn, copula_gof, two_sample, change_point, symmetry };

inline const char* to_string(TestKind k) {
    switch (k) {
        case TestKind::mvn: return "mvn";
        case TestKind::copula_gof: return "copula_gof";
        case TestKind::two_sample: return "two_sample";
        case TestKind::change_point: return "change_point";
        case TestKind::symmetry: return "symmetry";
    }
    return "?";
}

enum class Decision { none, reject, retain };

inline const char* to_string(Decision d) {
    switch (d) {
        case Decision::none: return "none";
        case Decision::reject: return "reject";
        case Decision::retain: return "retain";
    }
    return "?";
}

struct TestReport {
    TestKind test = TestKind::mvn;
    double statistic = 0.0;  // nats
    std::optional<double> threshold;
    std::optional<double> p_value;
    Decision decision = Decision::none;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> warnings;

    /// Rejects when the statistic exceeds the threshold.
    void decide_by_threshold(double t) {
        threshold = t;
        decision = statistic > t ? Decision::reject : Decision::retain;
    }

    void decide_by_p_value(double p, double level = 0.05) {
        p_value = p;
        config["level"] = level;
        decision = p < level ? Decision::reject : Decision::retain;
    }
};

inline nlohmann::json to_json(const TestReport& r) {
    nlohmann::json j;
    j["test"] = to_string(r.test);
    j["statistic"] = r.statistic;
    if (r.p_value) {
        j["p_value"] = *r.p_value;
    }
    if (r.threshold) {
        j["threshold"] = *r.threshold;
    }
    if (r.decision != Decision::none) {
        j["decision"] = to_string(r.decision);
    }
    j["config"] = r.config;
    if (!r.warnings.empty()) {
        j["warnings"] = r.warnings;
    }
    return j;
}

inline nlohmann::json config_json(const EntropyConfig& cfg, const TiePolicy& tp) {
    return {{"k", cfg.k},
            {"norm", to_string(cfg.norm)},
            {"tie_mode", to_string(tp.mode)},
            {"tie_seed", tp.seed}};
}

// ---------------------------------------------------------------------------
// Multivariate normality

struct MomentSummary {
    Vector mean;
    Matrix cov;
    Matrix corr;
    Vector sd;
};

inline MomentSummary moment_summary(const Dataset& d) {
    MomentSummary m;
    m.mean = d.values().colwise().mean().transpose();
    const Matrix centered = d.values().rowwise() - m.mean.transpose();
    m.cov = centered.transpose() * centered / static_cast<double>(d.rows() - 1);
    m.sd = m.cov.diagonal().cwiseSqrt();
    const Vector inv = m.sd.cwiseInverse();
    m.corr = inv.asDiagonal() * m.cov * inv.asDiagonal();
    m.corr = 0.5 * (m.corr + m.corr.transpose());
    m.corr.diagonal().setOnes();
    return m;
}

namespace detail {

inline double half_log_det_corr(const Dataset& d) {
    const auto m = moment_summary(d);
    if ((m.sd.array() <= 0.0).any()) {
        throw DimensionError("constant column: correlation matrix is rank deficient");
    }
    Eigen::LLT<Matrix> llt(m.corr);
    if (llt.info() != Eigen::Success) {
        throw DimensionError("correlation matrix is singular (rank deficient)");
    }
    const Matrix l = llt.matrixL();
    const double half_log_det = l.diagonal().array().log().sum();
    if (!std::isfinite(half_log_det) || half_log_det < -0.5 * std::log(1e12)) {
        throw DimensionError("correlation matrix is numerically singular (rank deficient)");
    }
    return half_log_det;
}

inline double mvn_statistic(const Dataset& d, const EntropyConfig& cfg, const TiePolicy& tp) {
    return half_log_det_corr(d) - copula_entropy(d, cfg, tp).ce;
}

}  // namespace detail

/// 1/2 log|R| - H_c(x) with R the sample correlation matrix: about 0 for
/// Gaussian data and growing with non-Gaussian dependence.
inline TestReport mvn_test(const Dataset& d, const EntropyConfig& cfg = {}, const TiePolicy& tp = {}) {
    if (d.cols() < 2) {
        throw DimensionError("normality test needs at least 2 variables");
    }
    TestReport r;
    r.test = TestKind::mvn;
    r.statistic = detail::mvn_statistic(d, cfg, tp);
    r.config = config_json(cfg, tp);
    r.config["T"] = d.rows();
    r.config["dims"] = d.cols();
    if (d.rows() < 50) {
        r.warnings.push_back("fewer than 50 observations");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Copula goodness of fit

struct GofResult {
    TestReport report;
    FitReport fit;
};

/// Parametric CE of the fitted family minus the nonparametric CE; about 0
/// when the family is right.
inline GofResult copula_gof_test(const Dataset& d, CopulaFamily family,
                                 const EntropyConfig& cfg = {}, const TiePolicy& tp = {}) {
    const auto pobs = pseudo_observations(d, tp);
    GofResult out;
    out.fit = fit_copula(pobs, family);
    const double nonparametric = copula_entropy(d, cfg, tp).ce;
    out.report.test = TestKind::copula_gof;
    out.report.statistic = parametric_ce(pobs, out.fit.model) - nonparametric;
    out.report.config = config_json(cfg, tp);
    out.report.config["family"] = to_string(family);
    out.report.config["model"] = to_json(out.fit.model);
    out.report.warnings = out.fit.warnings;
    return out;
}

// ---------------------------------------------------------------------------
// Two-sample machinery

namespace detail {

/// Per-row tie-break key for the label columns, a function of the row's
/// contents and the seed only. Swapping the two samples therefore mirrors
/// the group-label column exactly and leaves the constant-label column's
/// point set unchanged.
inline std::vector<double> label_keys(const Matrix& pool, std::uint64_t seed) {
    std::vector<double> keys(static_cast<std::size_t>(pool.rows()));
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
        std::uint64_t h = mix64(seed ^ 0x6C6162656C6B6579ull);
        for (Eigen::Index j = 0; j < pool.cols(); ++j) {
            h = mix64(h ^ std::bit_cast<std::uint64_t>(pool(i, j) + 0.0));
        }
        keys[static_cast<std::size_t>(i)] = static_cast<double>(h >> 11) * 0x1.0p-53;
    }
    return keys;
}

/// Two-sample statistic on a pooled sample whose margins are already
/// rank-transformed: rows [0, m) form the first sample, [m, N) the second.
/// Constant labels y0 are ranked by key; group labels y1 rank the first
/// group ascending by key and the second descending.
class TwoSampleKernel {
public:
    TwoSampleKernel(Matrix pool_pobs, std::vector<double> keys, EntropyConfig cfg)
        : x_(std::move(pool_pobs)), keys_(std::move(keys)), cfg_(cfg) {
        const auto n = x_.rows();
        // y0 ranks are independent of the split.
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return keys_[static_cast<std::size_t>(a)] < keys_[static_cast<std::size_t>(b)];
        });
        y0_.resize(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            y0_[order[static_cast<std::size_t>(r)]] = static_cast<double>(r + 1) / static_cast<double>(n);
        }
        ce_y0_ = ce_with_label(y0_);
    }

    /// Statistic for the split after the first m rows.
    double statistic(Eigen::Index m) const { return ce_y0_ - ce_with_label(group_labels(m)); }

    Eigen::Index size() const noexcept { return x_.rows(); }

private:
    Vector group_labels(Eigen::Index m) const {
        const auto n = x_.rows();
        std::vector<Eigen::Index> first(static_cast<std::size_t>(m));
        std::vector<Eigen::Index> second(static_cast<std::size_t>(n - m));
        std::iota(first.begin(), first.end(), Eigen::Index{0});
        std::iota(second.begin(), second.end(), m);
        const auto by_key = [&](Eigen::Index a, Eigen::Index b) {
            return keys_[static_cast<std::size_t>(a)] < keys_[static_cast<std::size_t>(b)];
        };
        std::stable_sort(first.begin(), first.end(), by_key);
        std::stable_sort(second.begin(), second.end(), [&](Eigen::Index a, Eigen::Index b) {
            return by_key(b, a);
        });
        Vector y(n);
        Eigen::Index r = 0;
        for (const auto i : first) {
            y[i] = static_cast<double>(++r) / static_cast<double>(n);
        }
        for (const auto i : second) {
            y[i] = static_cast<double>(++r) / static_cast<double>(n);
        }
        return y;
    }

    double ce_with_label(const Vector& label) const {
        Matrix joint(x_.rows(), x_.cols() + 1);
        joint.leftCols(x_.cols()) = x_;
        joint.col(x_.cols()) = label;
        return ksg_entropy(joint, cfg_).value;
    }

    Matrix x_;
    std::vector<double> keys_;
    EntropyConfig cfg_;
    Vector y0_;
    double ce_y0_ = 0.0;
};

/// Averages the kernel over several independent label tie-break draws. The
/// tie-break is arbitrary, so a single draw adds noise without information.
/// Draw 0 uses the seed itself.
class AveragedTwoSampleKernel {
public:
    AveragedTwoSampleKernel(const Matrix& pool_pobs, const Matrix& pool, std::uint64_t seed, int draws,
                            const EntropyConfig& cfg) {
        if (draws < 1) {
            throw ConfigError("label_draws must be >= 1");
        }
        for (int r = 0; r < draws; ++r) {
            const auto s = r == 0 ? seed : derive_stream(seed, static_cast<std::uint64_t>(r));
            kernels_.emplace_back(pool_pobs, label_keys(pool, s), cfg);
        }
    }

    double statistic(Eigen::Index m) const {
        double sum = 0.0;
        for (const auto& k : kernels_) {
            sum += k.statistic(m);
        }
        return sum / static_cast<double>(kernels_.size());
    }

private:
    std::vector<TwoSampleKernel> kernels_;
};

inline Matrix stack_rows(const Matrix& a, const Matrix& b) {
    Matrix pool(a.rows() + b.rows(), a.cols());
    pool.topRows(a.rows()) = a;
    pool.bottomRows(b.rows()) = b;
    return pool;
}

inline double two_sample_statistic(const Matrix& a, const Matrix& b, const EntropyConfig& cfg,
                                   const TiePolicy& tp, std::uint64_t seed, int draws) {
    const Matrix pool = stack_rows(a, b);
    const auto pobs = pseudo_observations(Dataset(pool), tp);
    const AveragedTwoSampleKernel kernel(pobs.values, pool, seed, draws, cfg);
    return kernel.statistic(a.rows());
}

inline void check_two_sample(const Matrix& a, const Matrix& b, const EntropyConfig& cfg) {
    if (a.cols() != b.cols()) {
        throw DimensionError("two-sample test needs samples of equal dimension (" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    }
    if (a.rows() < cfg.k + 2 || b.rows() < cfg.k + 2) {
        throw LengthError("each sample needs at least k + 2 = " + std::to_string(cfg.k + 2) +
                          " observations");
    }
}

}  // namespace detail

/// H_c(x, y0) - H_c(x, y1): pooled sample with a constant label y0 and the
/// group label y1. Small when both samples share a distribution.
inline TestReport two_sample_test(const Dataset& a, const Dataset& b, const EntropyConfig& cfg = {},
                                  const TiePolicy& tp = {}, std::uint64_t seed = 1,
                                  int label_draws = kDefaultLabelDraws) {
    detail::check_two_sample(a.values(), b.values(), cfg);
    TestReport r;
    r.test = TestKind::two_sample;
    r.statistic = detail::two_sample_statistic(a.values(), b.values(), cfg, tp, seed, label_draws);
    r.config = config_json(cfg, tp);
    r.config["m"] = a.rows();
    r.config["n"] = b.rows();
    r.config["seed"] = seed;
    r.config["label_draws"] = label_draws;
    return r;
}

// ---------------------------------------------------------------------------
// Change points

struct SplitProfile {
    /// Absolute 0-based row where the examined segment starts, and its end.
    Eigen::Index begin = 0;
    Eigen::Index end = 0;
    /// splits[i] = number of segment rows before the candidate change.
    std::vector<Eigen::Index> splits;
    std::vector<double> statistics;

    Eigen::Index argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < statistics.size(); ++i) {
            if (statistics[i] > statistics[best]) {
                best = i;
            }
        }
        return splits[best];
    }

    double max() const { return *std::max_element(statistics.begin(), statistics.end()); }
};

struct SingleChangePoint {
    /// Position (1-based) of the last observation before the change.
    Eigen::Index index = 0;
    double statistic = 0.0;
    SplitProfile profile;
};

namespace detail {

inline SplitProfile split_profile(const Matrix& segment, Eigen::Index offset, int min_segment,
                                  const EntropyConfig& cfg, const TiePolicy& tp, std::uint64_t seed,
                                  int draws) {
    const auto n = segment.rows();
    SplitProfile p;
    p.begin = offset;
    p.end = offset + n;
    const auto pobs = pseudo_observations(Dataset(segment), tp);
    const AveragedTwoSampleKernel kernel(pobs.values, segment, seed, draws, cfg);
    for (Eigen::Index t = min_segment; t <= n - min_segment; ++t) {
        p.splits.push_back(t);
    }
    p.statistics.resize(p.splits.size());
    parallel_for(
        p.splits.size(), [&](std::size_t i) { p.statistics[i] = kernel.statistic(p.splits[i]); }, 2);
    return p;
}

inline void check_min_segment(int min_segment, const EntropyConfig& cfg) {
    if (min_segment < cfg.k + 2) {
        throw ConfigError("min_segment must be at least k + 2 = " + std::to_string(cfg.k + 2));
    }
}

}  // namespace detail

/// Evaluates the two-sample statistic at every split with both sides at
/// least min_segment long and returns the first maximiser.
inline SingleChangePoint single_change_point(const Dataset& series, const EntropyConfig& cfg = {},
                                             const TiePolicy& tp = {}, int min_segment = 15,
                                             std::uint64_t seed = 1, int label_draws = kDefaultLabelDraws) {
    detail::check_min_segment(min_segment, cfg);
    if (series.rows() < 2 * static_cast<Eigen::Index>(min_segment)) {
        throw LengthError("series of length " + std::to_string(series.rows()) +
                          " is shorter than 2 * min_segment = " + std::to_string(2 * min_segment));
    }
    SingleChangePoint out;
    out.profile = detail::split_profile(series.values(), 0, min_segment, cfg, tp, seed, label_draws);
    out.index = out.profile.argmax();
    out.statistic = out.profile.max();
    return out;
}

struct ChangePointResult {
    /// Sorted positions (1-based) of the last observation before each change.
    std::vector<Eigen::Index> indices;
    std::vector<SplitProfile> profiles;
    double threshold = 0.0;
    int min_segment = 0;
};

/// Binary segmentation with a FIFO queue: a segment is split at its profile
/// maximum when that maximum exceeds the threshold; both halves are queued.
inline ChangePointResult multi_change_point(const Dataset& series, double threshold = 0.1,
                                            int min_segment = 15, const EntropyConfig& cfg = {},
                                            const TiePolicy& tp = {}, std::uint64_t seed = 1,
                                            int label_draws = kDefaultLabelDraws) {
    if (!(threshold > 0.0)) {
        throw ConfigError("change-point threshold must be positive");
    }
    detail::check_min_segment(min_segment, cfg);
    ChangePointResult out;
    out.threshold = threshold;
    out.min_segment = min_segment;
    std::deque<std::pair<Eigen::Index, Eigen::Index>> queue{{0, series.rows()}};
    while (!queue.empty()) {
        const auto [begin, end] = queue.front();
        queue.pop_front();
        if (end - begin < 2 * static_cast<Eigen::Index>(min_segment)) {
            continue;
        }
        const std::uint64_t segment_seed =
            derive_stream(seed, static_cast<std::uint64_t>(begin) << 32 | static_cast<std::uint64_t>(end));
        auto profile = detail::split_profile(series.values().middleRows(begin, end - begin), begin,
                                             min_segment, cfg, tp, segment_seed, label_draws);
        const double peak = profile.max();
        const Eigen::Index split = profile.argmax();
        out.profiles.push_back(std::move(profile));
        if (peak > threshold) {
            out.indices.push_back(begin + split);
            queue.emplace_back(begin, begin + split);
            queue.emplace_back(begin + split, end);
        }
    }
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

inline nlohmann::json to_json(const SplitProfile& p) {
    return {{"begin", p.begin}, {"end", p.end}, {"splits", p.splits}, {"statistics", p.statistics}};
}

inline nlohmann::json to_json(const ChangePointResult& r) {
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& p : r.profiles) {
        profiles.push_back(to_json(p));
    }
    return {{"indices", r.indices},
            {"threshold", r.threshold},
            {"min_segment", r.min_segment},
            {"profiles", profiles}};
}

// ---------------------------------------------------------------------------
// Symmetry

/// Two-sample statistic between the mean-centred sample and its mirror.
inline TestReport symmetry_test(const Eigen::Ref<const Vector>& x, const EntropyConfig& cfg = {},
                                const TiePolicy& tp = {}, std::uint64_t seed = 1,
                                int label_draws = kDefaultLabelDraws) {
    if (x.size() < 2 * (cfg.k + 2)) {
        throw LengthError("symmetry test needs at least 2 * (k + 2) = " +
                          std::to_string(2 * (cfg.k + 2)) + " observations");
    }
    const Vector centred = x.array() - x.mean();
    const Matrix a = centred;
    const Matrix b = -centred;
    TestReport r;
    r.test = TestKind::symmetry;
    r.statistic = detail::two_sample_statistic(a, b, cfg, tp, seed, label_draws);
    r.config = config_json(cfg, tp);
    r.config["T"] = x.size();
    r.config["seed"] = seed;
    r.config["label_draws"] = label_draws;
    return r;
}

// ---------------------------------------------------------------------------
// Permutation p-values

struct MvnInputs {
    Dataset data;
};
struct TwoSampleInputs {
    Dataset a;
    Dataset b;
};
struct SymmetryInputs {
    Vector x;
};
using PermutationInputs = std::variant<MvnInputs, TwoSampleInputs, SymmetryInputs>;

namespace detail {

inline double permuted_two_sample(const Matrix& pool, Eigen::Index m, const EntropyConfig& cfg,
                                  const TiePolicy& tp, std::uint64_t seed, int draws, Rng& rng) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pool.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    shuffle(order.begin(), order.end(), rng);
    Matrix permuted(pool.rows(), pool.cols());
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
        permuted.row(i) = pool.row(order[static_cast<std::size_t>(i)]);
    }
    return two_sample_statistic(permuted.topRows(m), permuted.bottomRows(pool.rows() - m), cfg, tp,
                                seed, draws);
}

}  // namespace detail

/// p = (1 + #{permuted >= observed}) / (B + 1). Two-sample and symmetry
/// inputs permute group labels; normality inputs shuffle each column
/// independently. Replicate b draws from stream (seed, b).
inline double permutation_pvalue(TestKind test, const PermutationInputs& inputs, int replicates,
                                 std::uint64_t seed, const EntropyConfig& cfg = {},
                                 const TiePolicy& tp = {}, int label_draws = kDefaultLabelDraws) {
    if (replicates < 99) {
        throw ContractError("permutation test needs at least 99 replicates, got " +
                            std::to_string(replicates));
    }
    const auto b_count = static_cast<std::size_t>(replicates);
    std::vector<double> stats(b_count);
    double observed = 0.0;
    const auto stream_rng = [&](std::size_t b) {
        return Rng(seed, derive_stream(0x7065726D75746521ull, b));
    };
    if (test == TestKind::two_sample || test == TestKind::symmetry) {
        Matrix pool;
        Eigen::Index m = 0;
        if (test == TestKind::two_sample) {
            const auto* in = std::get_if<TwoSampleInputs>(&inputs);
            if (!in) {
                throw ContractError("two-sample permutation needs TwoSampleInputs");
            }
            detail::check_two_sample(in->a.values(), in->b.values(), cfg);
            pool = detail::stack_rows(in->a.values(), in->b.values());
            m = in->a.rows();
        } else {
            const auto* in = std::get_if<SymmetryInputs>(&inputs);
            if (!in) {
                throw ContractError("symmetry permutation needs SymmetryInputs");
            }
            const Vector c = in->x.array() - in->x.mean();
            pool = detail::stack_rows(Matrix(c), Matrix(-c));
            m = c.size();
        }
        observed = detail::two_sample_statistic(pool.topRows(m), pool.bottomRows(pool.rows() - m),
                                                cfg, tp, seed, label_draws);
        parallel_for(
            b_count,
            [&](std::size_t b) {
                Rng rng = stream_rng(b);
                stats[b] = detail::permuted_two_sample(pool, m, cfg, tp, seed, label_draws, rng);
            },
            2);
    } else if (test == TestKind::mvn) {
        const auto* in = std::get_if<MvnInputs>(&inputs);
        if (!in) {
            throw ContractError("normality permutation needs MvnInputs");
        }
        observed = detail::mvn_statistic(in->data, cfg, tp);
        parallel_for(
            b_count,
            [&](std::size_t b) {
                Rng rng = stream_rng(b);
                Matrix shuffled = in->data.values();
                for (Eigen::Index j = 0; j < shuffled.cols(); ++j) {
                    std::vector<double> col(shuffled.col(j).data(),
                                            shuffled.col(j).data() + shuffled.rows());
                    shuffle(col.begin(), col.end(), rng);
                    shuffled.col(j) = Eigen::Map<const Vector>(col.data(), shuffled.rows());
                }
                stats[b] = detail::mvn_statistic(Dataset(std::move(shuffled)), cfg, tp);
            },
            2);
    } else {
        throw ContractError(std::string("permutation p-values are not supported for ") +
                            to_string(test));
    }
    std::size_t exceed = 0;
    for (const double s : stats) {
        exceed += s >= observed;
    }
    return static_cast<double>(1 + exceed) / static_cast<double>(b_count + 1);
}

}  // namespace cetk
