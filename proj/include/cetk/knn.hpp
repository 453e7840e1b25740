#pragma once

// Kozachenko-Leonenko / Kraskov k-nearest-neighbour entropy estimation.
//
//   H = psi(T) - psi(k) + log c_d + (d / T) * sum_t log r_t
//
// with r_t the distance from point t to its k-th neighbour and c_d the
// volume of the unit ball of the chosen norm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "cetk/dataset.hpp"
#include "cetk/error.hpp"
#include "cetk/parallel.hpp"
#include "cetk/special.hpp"

namespace cetk {

enum class Norm { chebyshev, euclidean };

inline const char* to_string(Norm n) { return n == Norm::chebyshev ? "chebyshev" : "euclidean"; }

inline Norm parse_norm(const std::string& s) {
    if (s == "chebyshev" || s == "max") {
        return Norm::chebyshev;
    }
    if (s == "euclidean") {
        return Norm::euclidean;
    }
    throw ConfigError("unknown norm '" + s + "'");
}

/// brute is the O(T^2) reference; tree must reproduce it exactly.
enum class NeighborSearch { automatic, brute, tree };

struct EntropyConfig {
    int k = 3;
    Norm norm = Norm::chebyshev;
    NeighborSearch search = NeighborSearch::automatic;

    void validate(Eigen::Index sample_size) const {
        if (k < 1 || k > sample_size - 1) {
            throw ConfigError("k = " + std::to_string(k) + " out of range [1, " +
                              std::to_string(sample_size - 1) + "] for T = " +
                              std::to_string(sample_size));
        }
    }
};

struct EntropyEstimate {
    double value = 0.0;  // nats
    int k = 0;
    Norm norm = Norm::chebyshev;
    Eigen::Index sample_size = 0;
    Eigen::Index dims = 0;
};

/// Row-major copy of a point set; the layout the neighbour search wants.
class PointCloud {
public:
    explicit PointCloud(const Eigen::Ref<const Matrix>& m)
        : n_(static_cast<std::size_t>(m.rows())), d_(static_cast<std::size_t>(m.cols())),
          data_(n_ * d_) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < d_; ++j) {
                data_[i * d_ + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dims() const noexcept { return d_; }
    const double* point(std::size_t i) const noexcept { return data_.data() + i * d_; }

private:
    std::size_t n_;
    std::size_t d_;
    std::vector<double> data_;
};

namespace detail {

/// Chebyshev distance, or squared Euclidean distance (rooted by the caller).
inline double raw_distance(const double* a, const double* b, std::size_t d, Norm norm) {
    double acc = 0.0;
    if (norm == Norm::chebyshev) {
        for (std::size_t j = 0; j < d; ++j) {
            acc = std::max(acc, std::abs(a[j] - b[j]));
        }
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = a[j] - b[j];
            acc += diff * diff;
        }
    }
    return acc;
}

inline double finish_distance(double raw, Norm norm) {
    return norm == Norm::chebyshev ? raw : std::sqrt(raw);
}

inline double brute_kth(const PointCloud& pts, std::size_t i, int k, Norm norm,
                        std::vector<double>& scratch) {
    scratch.clear();
    const double* q = pts.point(i);
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j != i) {
            scratch.push_back(raw_distance(q, pts.point(j), pts.dims(), norm));
        }
    }
    const auto kth = scratch.begin() + (k - 1);
    std::nth_element(scratch.begin(), kth, scratch.end());
    return *kth;
}

/// Static kd-tree over a PointCloud, median split on the widest dimension.
class KdTree {
public:
    KdTree(const PointCloud& pts, Norm norm) : pts_(pts), norm_(norm), index_(pts.size()) {
        std::iota(index_.begin(), index_.end(), std::size_t{0});
        nodes_.reserve(2 * pts.size() / kLeafSize + 2);
        build(0, pts.size());
    }

    /// Raw (unrooted) distance to the k-th neighbour of point i, self excluded.
    double kth(std::size_t i, int k) const {
        std::priority_queue<double> heap;
        search(0, pts_.point(i), i, static_cast<std::size_t>(k), heap);
        return heap.top();
    }

private:
    static constexpr std::size_t kLeafSize = 12;

    struct Node {
        std::size_t begin;
        std::size_t end;
        std::size_t dim = 0;
        double split = 0.0;
        int left = -1;
        int right = -1;
    };

    int build(std::size_t begin, std::size_t end) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{begin, end});
        if (end - begin <= kLeafSize) {
            return id;
        }
        const std::size_t d = pts_.dims();
        std::size_t best_dim = 0;
        double best_spread = -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            double lo = pts_.point(index_[begin])[j];
            double hi = lo;
            for (std::size_t p = begin + 1; p < end; ++p) {
                const double v = pts_.point(index_[p])[j];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                best_dim = j;
            }
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                         index_.begin() + static_cast<std::ptrdiff_t>(mid),
                         index_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) {
                             return pts_.point(a)[best_dim] < pts_.point(b)[best_dim];
                         });
        nodes_[static_cast<std::size_t>(id)].dim = best_dim;
        nodes_[static_cast<std::size_t>(id)].split = pts_.point(index_[mid])[best_dim];
        const int l = build(begin, mid);
        const int r = build(mid, end);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    void search(int id, const double* q, std::size_t self, std::size_t k,
                std::priority_queue<double>& heap) const {
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.left < 0) {
            for (std::size_t p = node.begin; p < node.end; ++p) {
                const std::size_t j = index_[p];
                if (j == self) {
                    continue;
                }
                const double dist = raw_distance(q, pts_.point(j), pts_.dims(), norm_);
                if (heap.size() < k) {
                    heap.push(dist);
                } else if (dist < heap.top()) {
                    heap.pop();
                    heap.push(dist);
                }
            }
            return;
        }
        // Points equal to the split value can sit on either side of the
        // median, so the plane gap is a lower bound only for the far side.
        const double gap = q[node.dim] - node.split;
        const int near = gap < 0.0 ? node.left : node.right;
        const int far = gap < 0.0 ? node.right : node.left;
        search(near, q, self, k, heap);
        const double bound = norm_ == Norm::chebyshev ? std::abs(gap) : gap * gap;
        if (heap.size() < k || bound <= heap.top()) {
            search(far, q, self, k, heap);
        }
    }

    const PointCloud& pts_;
    Norm norm_;
    std::vector<std::size_t> index_;
    std::vector<Node> nodes_;
};

}  // namespace detail

struct KnnRadii {
    std::vector<double> radii;
    /// Set when some point has k coincident neighbours (radius 0).
    bool has_zero = false;
};

inline KnnRadii knn_radii(const PointCloud& pts, int k, Norm norm,
                          NeighborSearch search = NeighborSearch::automatic) {
    const auto n = pts.size();
    if (k < 1 || static_cast<std::size_t>(k) + 1 > n) {
        throw ConfigError("knn_radii needs 1 <= k <= T - 1 (k = " + std::to_string(k) +
                          ", T = " + std::to_string(n) + ")");
    }
    if (search == NeighborSearch::automatic) {
        search = n > 64 ? NeighborSearch::tree : NeighborSearch::brute;
    }
    KnnRadii out;
    out.radii.resize(n);
    if (search == NeighborSearch::brute) {
        parallel_for(n, [&](std::size_t i) {
            thread_local std::vector<double> scratch;
            out.radii[i] = detail::finish_distance(detail::brute_kth(pts, i, k, norm, scratch), norm);
        });
    } else {
        const detail::KdTree tree(pts, norm);
        parallel_for(n, [&](std::size_t i) {
            out.radii[i] = detail::finish_distance(tree.kth(i, k), norm);
        });
    }
    out.has_zero = std::any_of(out.radii.begin(), out.radii.end(), [](double r) { return r == 0.0; });
    return out;
}

inline KnnRadii knn_radii(const Eigen::Ref<const Matrix>& points, int k, Norm norm,
                          NeighborSearch search = NeighborSearch::automatic) {
    if (!points.allFinite()) {
        throw DomainError("knn_radii: points must be finite");
    }
    return knn_radii(PointCloud(points), k, norm, search);
}

inline EntropyEstimate ksg_entropy(const PointCloud& pts, const EntropyConfig& cfg = {}) {
    const auto t = static_cast<Eigen::Index>(pts.size());
    cfg.validate(t);
    const auto radii = knn_radii(pts, cfg.k, cfg.norm, cfg.search);
    if (radii.has_zero) {
        throw EstimatorError(
            "kNN radius is zero (tied points); use the random tie policy to break ties");
    }
    const int d = static_cast<int>(pts.dims());
    double log_sum = 0.0;
    for (const double r : radii.radii) {
        log_sum += std::log(r);
    }
    const double log_ball =
        cfg.norm == Norm::chebyshev ? log_unit_ball_chebyshev(d) : log_unit_ball_euclidean(d);
    EntropyEstimate est;
    est.value = digamma(static_cast<double>(t)) - digamma(static_cast<double>(cfg.k)) + log_ball +
                static_cast<double>(d) * log_sum / static_cast<double>(t);
    est.k = cfg.k;
    est.norm = cfg.norm;
    est.sample_size = t;
    est.dims = d;
    return est;
}

inline EntropyEstimate ksg_entropy(const Eigen::Ref<const Matrix>& points,
                                   const EntropyConfig& cfg = {}) {
    if (!points.allFinite()) {
        throw DomainError("ksg_entropy: points must be finite");
    }
    return ksg_entropy(PointCloud(points), cfg);
}

}  // namespace cetk
