#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cetk/error.hpp"
#include "cetk/rng.hpp"

namespace cetk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline std::vector<std::string> default_names(Eigen::Index n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        names.push_back("v" + std::to_string(i + 1));
    }
    return names;
}

/// T observations (rows) of n named variables (columns). Construction
/// validates shape, finiteness and label uniqueness.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(Matrix values) : Dataset(values, default_names(values.cols())) {}

    Dataset(Matrix values, std::vector<std::string> names)
        : values_(std::move(values)), names_(std::move(names)) {
        validate();
    }

    Eigen::Index rows() const noexcept { return values_.rows(); }
    Eigen::Index cols() const noexcept { return values_.cols(); }
    const Matrix& values() const noexcept { return values_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    Vector column(Eigen::Index i) const { return values_.col(i); }

    Eigen::Index index_of(std::string_view name) const {
        const auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) {
            throw DimensionError("no column named '" + std::string(name) + "'");
        }
        return it - names_.begin();
    }

    Dataset select(std::span<const int> cols) const {
        Matrix out(rows(), static_cast<Eigen::Index>(cols.size()));
        std::vector<std::string> names;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            check_column(cols[j]);
            out.col(static_cast<Eigen::Index>(j)) = values_.col(cols[j]);
            names.push_back(names_[static_cast<std::size_t>(cols[j])]);
        }
        return Dataset(std::move(out), std::move(names));
    }

    Dataset rows_range(Eigen::Index begin, Eigen::Index end) const {
        return Dataset(values_.middleRows(begin, end - begin), names_);
    }

    void check_column(int c) const {
        if (c < 0 || c >= cols()) {
            throw DimensionError("column index " + std::to_string(c) + " out of range [0, " +
                                 std::to_string(cols()) + ")");
        }
    }

private:
    void validate() const {
        if (values_.rows() < 2) {
            throw ShapeError("dataset needs at least 2 observations, got " +
                             std::to_string(values_.rows()));
        }
        if (values_.cols() < 1) {
            throw ShapeError("dataset needs at least one variable");
        }
        if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
            throw ShapeError("column label count does not match column count");
        }
        if (!values_.allFinite()) {
            throw DomainError("dataset contains NaN or infinite entries");
        }
        std::unordered_set<std::string> seen;
        for (const auto& n : names_) {
            if (!seen.insert(n).second) {
                throw ShapeError("duplicate column label '" + n + "'");
            }
        }
    }

    Matrix values_;
    std::vector<std::string> names_;
};

/// Column-concatenation helper for building datasets from series.
inline Dataset make_dataset(std::initializer_list<Vector> columns) {
    const auto t = columns.begin()->size();
    Matrix m(t, static_cast<Eigen::Index>(columns.size()));
    Eigen::Index j = 0;
    for (const auto& c : columns) {
        if (c.size() != t) {
            throw ShapeError("columns have different lengths");
        }
        m.col(j++) = c;
    }
    return Dataset(std::move(m));
}

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
    bool has_header = false;
    char delimiter = ',';
};

namespace detail {

inline std::vector<std::string> split_record(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace detail

/// Parses CSV text. Rows and columns in error messages are 1-based and
/// count the header line.
inline Dataset parse_csv(std::istream& in, const CsvOptions& opt = {}) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) {
            continue;
        }
        auto fields = detail::split_record(line, opt.delimiter);
        if (opt.has_header && names.empty() && rows.empty()) {
            for (const auto& f : fields) {
                names.emplace_back(detail::trim(f));
            }
            width = names.size();
            continue;
        }
        if (width == 0) {
            width = fields.size();
        }
        if (fields.size() != width) {
            throw ShapeError("ragged row " + std::to_string(lineno) + ": expected " +
                             std::to_string(width) + " fields, found " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const auto cell = detail::trim(fields[c]);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw ParseError("non-numeric cell '" + std::string(cell) + "'", lineno, c + 1);
            }
            if (!std::isfinite(v)) {
                throw ParseError("non-finite cell '" + std::string(cell) + "'", lineno, c + 1);
            }
            row[c] = v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw EmptyInputError("CSV input has no data rows");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    if (names.empty()) {
        return Dataset(std::move(m));
    }
    return Dataset(std::move(m), std::move(names));
}

inline Dataset load_csv(const std::string& path, const CsvOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return parse_csv(in, opt);
}

inline Dataset load_csv(const std::string& path, bool has_header) {
    return load_csv(path, CsvOptions{has_header, ','});
}

/// Writes with 17 significant digits so a reload is exact.
inline void write_csv(std::ostream& out, const Dataset& d, bool header = true, char delim = ',') {
    if (header) {
        for (std::size_t j = 0; j < d.names().size(); ++j) {
            out << (j ? std::string(1, delim) : "") << d.names()[j];
        }
        out << '\n';
    }
    std::ostringstream cell;
    cell.precision(17);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            cell.str("");
            cell << d.values()(i, j);
            out << (j ? std::string(1, delim) : "") << cell.str();
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Rank transform

enum class TieMode { average, random };

struct TiePolicy {
    TieMode mode = TieMode::average;
    /// Jitter amplitude relative to the column range (random mode only).
    double jitter_scale = 0.0;
    std::uint64_t seed = 1;

    static TiePolicy average() { return {}; }
    static TiePolicy random(std::uint64_t seed, double scale = 1e-10) {
        return {TieMode::random, scale, seed};
    }

    void validate() const {
        if (jitter_scale < 0.0 || !std::isfinite(jitter_scale)) {
            throw ConfigError("jitter scale must be finite and non-negative");
        }
        if (mode == TieMode::average && jitter_scale != 0.0) {
            throw ConfigError("jitter scale must be 0 for the average tie mode");
        }
    }
};

inline const char* to_string(TieMode m) { return m == TieMode::average ? "average" : "random"; }

/// Empirical copula sample: entry (t, i) = rank of x_t^i in column i over T,
/// so values lie in (0, 1].
struct PseudoObservations {
    Matrix values;
    TiePolicy tie_policy;
    Eigen::Index source_dims = 0;
    /// Columns that were constant under the average tie mode.
    std::vector<int> degenerate_columns;

    Eigen::Index rows() const noexcept { return values.rows(); }
    Eigen::Index cols() const noexcept { return values.cols(); }
    bool degenerate() const noexcept { return !degenerate_columns.empty(); }

    PseudoObservations select(std::span<const int> cols) const {
        PseudoObservations out;
        out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out.values.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
            if (std::find(degenerate_columns.begin(), degenerate_columns.end(), cols[j]) !=
                degenerate_columns.end()) {
                out.degenerate_columns.push_back(static_cast<int>(j));
            }
        }
        out.tie_policy = tie_policy;
        out.source_dims = static_cast<Eigen::Index>(cols.size());
        return out;
    }

    /// Rescales rank/T to rank/(T+1) so every coordinate is strictly inside
    /// the unit cube, as parametric densities require.
    Matrix interior() const {
        const double t = static_cast<double>(values.rows());
        return values * (t / (t + 1.0));
    }
};

/// Ranks of one column (1-based, averaged over ties) in the order given.
inline Vector average_ranks(const Eigen::Ref<const Vector>& x) {
    const auto n = x.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
    Vector ranks(n);
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i + 1;
        while (j < n && x[order[static_cast<std::size_t>(j)]] == x[order[static_cast<std::size_t>(i)]]) {
            ++j;
        }
        const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
        for (Eigen::Index k = i; k < j; ++k) {
            ranks[order[static_cast<std::size_t>(k)]] = r;
        }
        i = j;
    }
    return ranks;
}

/// Ranks with ties broken by a per-row key (lexicographic on (x, key)).
inline Vector tiebroken_ranks(const Eigen::Ref<const Vector>& x, std::span<const double> key) {
    const auto n = x.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (x[a] != x[b]) {
            return x[a] < x[b];
        }
        return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)];
    });
    Vector ranks(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        ranks[order[static_cast<std::size_t>(k)]] = static_cast<double>(k + 1);
    }
    return ranks;
}

inline PseudoObservations pseudo_observations(const Dataset& d, const TiePolicy& tp = {}) {
    tp.validate();
    if (d.rows() < 2) {
        throw ShapeError("pseudo-observations need T >= 2");
    }
    const auto t = d.rows();
    const double inv_t = 1.0 / static_cast<double>(t);
    PseudoObservations out;
    out.values.resize(t, d.cols());
    out.tie_policy = tp;
    out.source_dims = d.cols();
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
        const Vector col = d.values().col(j);
        if (tp.mode == TieMode::average) {
            if (col.maxCoeff() == col.minCoeff()) {
                out.degenerate_columns.push_back(static_cast<int>(j));
            }
            out.values.col(j) = average_ranks(col) * inv_t;
            continue;
        }
        Rng rng(tp.seed, derive_stream(0x7469657300000000ull, static_cast<std::uint64_t>(j)));
        double range = col.maxCoeff() - col.minCoeff();
        if (range == 0.0) {
            range = std::max(1.0, std::abs(col[0]));
        }
        const double amp = tp.jitter_scale * range;
        Vector jittered(t);
        std::vector<double> key(static_cast<std::size_t>(t));
        for (Eigen::Index i = 0; i < t; ++i) {
            jittered[i] = col[i] + amp * (rng.uniform() - 0.5);
            key[static_cast<std::size_t>(i)] = rng.uniform();
        }
        out.values.col(j) = tiebroken_ranks(jittered, key) * inv_t;
    }
    return out;
}

}  // namespace cetk
