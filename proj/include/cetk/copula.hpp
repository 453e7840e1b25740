#pragma once

// Parametric copulas: densities, Kendall's tau, maximum-likelihood fitting,
// parametric copula entropy H_c = -E log c(u) and the copula log-likelihood.
//
// The Archimedean densities are the mixed second derivatives of the CDFs
//   Clayton  C(u,v) = (u^-a + v^-a - 1)^(-1/a)
//   Frank    C(u,v) = -(1/a) log(1 + (e^{-au} - 1)(e^{-av} - 1) / (e^{-a} - 1))
//   Gumbel   C(u,v) = exp(-[(-ln u)^a + (-ln v)^a]^(1/a))
// and are checked against finite differences of these CDFs in the tests.

#include <algorithm>
#include <utility>
#include <cmath>
#include <span>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "cetk/dataset.hpp"
#include "cetk/error.hpp"
#include "cetk/special.hpp"

namespace cetk {

enum class CopulaFamily { gaussian, gumbel, frank, clayton };

inline constexpr CopulaFamily kAllFamilies[] = {CopulaFamily::gaussian, CopulaFamily::gumbel,
                                                CopulaFamily::frank, CopulaFamily::clayton};

inline const char* to_string(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::gaussian: return "gaussian";
        case CopulaFamily::gumbel: return "gumbel";
        case CopulaFamily::frank: return "frank";
        case CopulaFamily::clayton: return "clayton";
    }
    return "?";
}

inline CopulaFamily parse_family(const std::string& s) {
    for (const auto f : kAllFamilies) {
        if (s == to_string(f)) {
            return f;
        }
    }
    throw ConfigError("unknown copula family '" + s + "'");
}

struct CopulaModel {
    CopulaFamily family = CopulaFamily::gaussian;
    Matrix rho;          // gaussian only
    double alpha = 0.0;  // archimedean only
    int dims = 2;

    static CopulaModel gaussian(Matrix rho) {
        CopulaModel m;
        m.family = CopulaFamily::gaussian;
        m.dims = static_cast<int>(rho.rows());
        m.rho = std::move(rho);
        m.validate();
        return m;
    }

    static CopulaModel gaussian2(double r) {
        Matrix rho(2, 2);
        rho << 1.0, r, r, 1.0;
        return gaussian(std::move(rho));
    }

    static CopulaModel independence(int dims) { return gaussian(Matrix::Identity(dims, dims)); }

    static CopulaModel archimedean(CopulaFamily family, double alpha) {
        CopulaModel m;
        m.family = family;
        m.alpha = alpha;
        m.dims = 2;
        m.validate();
        return m;
    }

    void validate() const {
        switch (family) {
            case CopulaFamily::gaussian: {
                if (rho.rows() != rho.cols() || rho.rows() < 2 || rho.rows() != dims) {
                    throw ModelError("gaussian copula needs a square correlation matrix, d >= 2");
                }
                if (!rho.allFinite() || (rho - rho.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
                    throw ModelError("correlation matrix must be finite and symmetric");
                }
                if ((rho.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) {
                    throw ModelError("correlation matrix must have a unit diagonal");
                }
                Eigen::LLT<Matrix> llt(rho);
                if (llt.info() != Eigen::Success) {
                    throw ModelError("correlation matrix is not positive definite");
                }
                break;
            }
            case CopulaFamily::gumbel:
                if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
                    throw ModelError("gumbel copula needs alpha >= 1");
                }
                break;
            case CopulaFamily::clayton:
                if (!(alpha > 0.0) || !std::isfinite(alpha)) {
                    throw ModelError("clayton copula needs alpha > 0");
                }
                break;
            case CopulaFamily::frank:
                if (alpha == 0.0 || !std::isfinite(alpha)) {
                    throw ModelError("frank copula needs a finite alpha != 0");
                }
                break;
        }
        if (family != CopulaFamily::gaussian && dims != 2) {
            throw ModelError("archimedean copulas are bivariate only");
        }
    }
};

namespace detail {

inline double log_clayton(double a, double u, double v) {
    const double lu = std::log(u);
    const double lv = std::log(v);
    // log(u^-a + v^-a - 1) = big + log1p(e^(small - big) (1 - e^-small)), p, q >= 0
    const double p = -a * lu;
    const double q = -a * lv;
    const double big = std::max(p, q);
    const double small = std::min(p, q);
    const double s = big + std::log1p(std::exp(small - big) * -std::expm1(-small));
    return std::log1p(a) - (1.0 + a) * (lu + lv) - (2.0 + 1.0 / a) * s;
}

inline double log_frank(double a, double u, double v) {
    if (a < 0.0) {
        return log_frank(-a, u, 1.0 - v);
    }
    if (u > v) {
        std::swap(u, v);
    }
    // denominator / e^{-a u}: two nonnegative terms, no cancellation
    const double inner = -std::expm1(-a * v) + std::exp(-a * (v - u)) * -std::expm1(-a * (1.0 - v));
    const double log_denom = -a * u + std::log(inner);
    return std::log(a) + std::log(-std::expm1(-a)) - a * (u + v) - 2.0 * log_denom;
}

inline double log_gumbel(double a, double u, double v) {
    const double x = -std::log(u);
    const double y = -std::log(v);
    const double lx = std::log(x);
    const double ly = std::log(y);
    // A = x^a + y^a, computed in log space
    const double la = std::max(a * lx, a * ly) +
                      std::log1p(std::exp(std::min(a * lx, a * ly) - std::max(a * lx, a * ly)));
    const double w = std::exp(la / a);  // A^{1/a}
    return -w + x + y + (a - 1.0) * (lx + ly) + (2.0 / a - 2.0) * la +
           std::log1p((a - 1.0) / w);
}

inline void check_interior(std::span<const double> u) {
    for (const double x : u) {
        if (!(x > 0.0 && x < 1.0)) {
            throw DomainError("copula density needs u strictly inside (0,1)^d");
        }
    }
}

}  // namespace detail

/// Evaluates log c(u) for one model, caching the Gaussian factorisation.
class CopulaDensity {
public:
    explicit CopulaDensity(const CopulaModel& m) : model_(m) {
        m.validate();
        if (m.family == CopulaFamily::gaussian) {
            Eigen::LLT<Matrix> llt(m.rho);
            const Matrix l = llt.matrixL();
            log_det_ = 2.0 * l.diagonal().array().log().sum();
            precision_minus_identity_ = llt.solve(Matrix::Identity(m.dims, m.dims)) -
                                        Matrix::Identity(m.dims, m.dims);
        }
    }

    double log_density(std::span<const double> u) const {
        if (static_cast<int>(u.size()) != model_.dims) {
            throw DimensionError("point dimension does not match the copula");
        }
        detail::check_interior(u);
        switch (model_.family) {
            case CopulaFamily::gaussian: {
                Vector z(model_.dims);
                for (int i = 0; i < model_.dims; ++i) {
                    z[i] = normal_quantile(u[static_cast<std::size_t>(i)]);
                }
                return -0.5 * log_det_ - 0.5 * z.dot(precision_minus_identity_ * z);
            }
            case CopulaFamily::clayton: return detail::log_clayton(model_.alpha, u[0], u[1]);
            case CopulaFamily::frank: return detail::log_frank(model_.alpha, u[0], u[1]);
            case CopulaFamily::gumbel: return detail::log_gumbel(model_.alpha, u[0], u[1]);
        }
        return 0.0;
    }

    double density(std::span<const double> u) const { return std::exp(log_density(u)); }

private:
    CopulaModel model_;
    double log_det_ = 0.0;
    Matrix precision_minus_identity_;
};

inline double copula_density(const CopulaModel& m, std::span<const double> u) {
    return CopulaDensity(m).density(u);
}

inline double copula_density(const CopulaModel& m, std::initializer_list<double> u) {
    return copula_density(m, std::span<const double>(u.begin(), u.size()));
}

/// Bivariate CDFs of the Archimedean families.
inline double copula_cdf(const CopulaModel& m, double u, double v) {
    const double a = m.alpha;
    switch (m.family) {
        case CopulaFamily::clayton:
            return std::pow(std::max(std::pow(u, -a) + std::pow(v, -a) - 1.0, 0.0), -1.0 / a);
        case CopulaFamily::frank:
            return -std::log1p(std::expm1(-a * u) * std::expm1(-a * v) / std::expm1(-a)) / a;
        case CopulaFamily::gumbel:
            return std::exp(-std::pow(std::pow(-std::log(u), a) + std::pow(-std::log(v), a), 1.0 / a));
        case CopulaFamily::gaussian: break;
    }
    throw ModelError("copula_cdf is implemented for archimedean families only");
}

// ---------------------------------------------------------------------------
// Kendall's tau

/// Sample Kendall tau-a over the rows of a bivariate sample; O(T^2).
inline double kendall_tau(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
    const auto n = x.size();
    long long score = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = (x[i] - x[j]) * (y[i] - y[j]);
            score += (s > 0.0) - (s < 0.0);
        }
    }
    return 2.0 * static_cast<double>(score) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double frank_tau(double alpha) {
    if (std::abs(alpha) < 1e-8) {
        return alpha / 9.0;
    }
    if (alpha < 0.0) {
        return -frank_tau(-alpha);
    }
    return 1.0 - 4.0 / alpha * (1.0 - debye1(alpha));
}

inline double family_tau(CopulaFamily family, double alpha) {
    switch (family) {
        case CopulaFamily::gumbel: return 1.0 - 1.0 / alpha;
        case CopulaFamily::clayton: return alpha / (alpha + 2.0);
        case CopulaFamily::frank: return frank_tau(alpha);
        case CopulaFamily::gaussian: return 2.0 / std::numbers::pi * std::asin(alpha);
    }
    return 0.0;
}

/// Inverse of the tau(alpha) map, clamped to the family domain.
inline double alpha_from_tau(CopulaFamily family, double tau) {
    tau = std::clamp(tau, -0.99, 0.99);
    switch (family) {
        case CopulaFamily::gumbel: return tau <= 0.0 ? 1.0 : 1.0 / (1.0 - tau);
        case CopulaFamily::clayton: return tau <= 0.0 ? 1e-4 : 2.0 * tau / (1.0 - tau);
        case CopulaFamily::gaussian: return std::sin(std::numbers::pi * tau / 2.0);
        case CopulaFamily::frank: {
            if (std::abs(tau) < 1e-6) {
                return tau >= 0.0 ? 1e-4 : -1e-4;
            }
            const double sign = tau > 0.0 ? 1.0 : -1.0;
            double lo = 1e-6;
            double hi = 1.0;
            while (frank_tau(hi) < std::abs(tau)) {
                hi *= 2.0;
            }
            for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                (frank_tau(mid) < std::abs(tau) ? lo : hi) = mid;
            }
            return sign * 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Likelihood and parametric CE

/// Sum of log c(u_t) over rows of points strictly inside the unit cube.
inline double copula_loglik_interior(const Eigen::Ref<const Matrix>& u, const CopulaModel& m) {
    if (u.cols() != m.dims) {
        throw DimensionError("sample dimension " + std::to_string(u.cols()) +
                             " does not match copula dimension " + std::to_string(m.dims));
    }
    const CopulaDensity density(m);
    double total = 0.0;
    std::vector<double> row(static_cast<std::size_t>(u.cols()));
    for (Eigen::Index t = 0; t < u.rows(); ++t) {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = u(t, j);
        }
        double ld = 0.0;
        try {
            ld = density.log_density(row);
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " (row " + std::to_string(t + 1) + ")");
        }
        if (!std::isfinite(ld)) {
            throw DomainError("copula density is zero or non-finite at row " + std::to_string(t + 1));
        }
        total += ld;
    }
    return total;
}

/// Copula log-likelihood of an empirical copula sample (rescaled to rank/(T+1)).
inline double copula_loglik(const PseudoObservations& pobs, const CopulaModel& m) {
    return copula_loglik_interior(pobs.interior(), m);
}

/// H_c = -(1/T) sum_t log c(u_t) = -copula_loglik / T.
inline double parametric_ce(const PseudoObservations& pobs, const CopulaModel& m) {
    return -copula_loglik(pobs, m) / static_cast<double>(pobs.rows());
}

// ---------------------------------------------------------------------------
// Fitting

struct FitReport {
    CopulaModel model;
    double loglik = 0.0;
    int iterations = 0;
    std::string initializer;
    std::vector<std::string> warnings;
};

/// Symmetric matrix projected to the nearest correlation matrix with all
/// eigenvalues >= floor, then rescaled to a unit diagonal.
inline Matrix nearest_pd_correlation(const Matrix& c, double floor = 1e-8) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (c + c.transpose()));
    Vector lambda = eig.eigenvalues().cwiseMax(floor);
    Matrix out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    const Vector s = out.diagonal().cwiseSqrt().cwiseInverse();
    out = s.asDiagonal() * out * s.asDiagonal();
    out = 0.5 * (out + out.transpose());
    out.diagonal().setOnes();
    return out;
}

/// Pearson correlation matrix of the columns of m.
inline Matrix correlation_matrix(const Eigen::Ref<const Matrix>& m) {
    const Matrix centered = m.rowwise() - m.colwise().mean();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(m.rows() - 1);
    const Vector s = cov.diagonal().cwiseSqrt().cwiseInverse();
    Matrix r = s.asDiagonal() * cov * s.asDiagonal();
    r.diagonal().setOnes();
    return 0.5 * (r + r.transpose());
}

namespace detail {

struct ParamMap {
    CopulaFamily family;
    double sign = 1.0;
    double lower_limit;  // hard limits on the transformed parameter
    double upper_limit;

    double to_alpha(double s) const {
        switch (family) {
            case CopulaFamily::gumbel: return 1.0 + std::exp(s);
            case CopulaFamily::clayton: return std::exp(s);
            default: return sign * std::exp(s);
        }
    }
    double from_alpha(double a) const {
        switch (family) {
            case CopulaFamily::gumbel: return std::log(std::max(a - 1.0, 1e-6));
            case CopulaFamily::clayton: return std::log(std::max(a, 1e-6));
            default: return std::log(std::max(std::abs(a), 1e-6));
        }
    }
};

}  // namespace detail

inline FitReport fit_copula(const PseudoObservations& pobs, CopulaFamily family) {
    FitReport report;
    if (pobs.rows() < 30) {
        report.warnings.push_back("fewer than 30 observations; fit is unreliable");
    }
    const Matrix u = pobs.interior();
    if (family == CopulaFamily::gaussian) {
        if (u.cols() < 2) {
            throw DimensionError("gaussian copula fit needs at least 2 columns");
        }
        Matrix z(u.rows(), u.cols());
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            for (Eigen::Index j = 0; j < u.cols(); ++j) {
                z(i, j) = normal_quantile(u(i, j));
            }
        }
        Matrix rho = correlation_matrix(z);
        if (Eigen::LLT<Matrix>(rho).info() != Eigen::Success ||
            Eigen::SelfAdjointEigenSolver<Matrix>(rho).eigenvalues().minCoeff() < 1e-8) {
            rho = nearest_pd_correlation(rho);
            report.warnings.push_back("correlation of normal scores projected to nearest PD matrix");
        }
        report.model = CopulaModel::gaussian(std::move(rho));
        report.loglik = copula_loglik_interior(u, report.model);
        report.iterations = 0;
        report.initializer = "normal-score correlation";
        return report;
    }
    if (u.cols() != 2) {
        throw DimensionError(std::string(to_string(family)) + " copula fit needs exactly 2 columns");
    }
    const double tau = kendall_tau(u.col(0), u.col(1));
    const double alpha0 = alpha_from_tau(family, tau);
    detail::ParamMap map{family, alpha0 < 0.0 ? -1.0 : 1.0, -10.0,
                         family == CopulaFamily::gumbel ? std::log(99.0) : std::log(200.0)};
    const auto objective = [&](double s) {
        return copula_loglik_interior(u, CopulaModel::archimedean(family, map.to_alpha(s)));
    };
    {
        std::ostringstream init;
        init << "kendall tau inversion (tau = " << tau << ", alpha = " << alpha0 << ")";
        report.initializer = init.str();
    }
    const double s0 = std::clamp(map.from_alpha(alpha0), map.lower_limit, map.upper_limit);
    double lo = std::max(map.lower_limit, s0 - 4.0);
    double hi = std::min(map.upper_limit, s0 + 4.0);
    const double init_loglik = objective(s0);
    std::ostringstream trace;
    constexpr double kInvPhi = 0.6180339887498949;
    constexpr double kTol = 1e-6;
    double best_s = s0;
    double best_f = init_loglik;
    for (int attempt = 0; attempt < 3; ++attempt) {
        double a = lo;
        double b = hi;
        double c = b - kInvPhi * (b - a);
        double d = a + kInvPhi * (b - a);
        double fc = objective(c);
        double fd = objective(d);
        while (b - a > kTol) {
            ++report.iterations;
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - kInvPhi * (b - a);
                fc = objective(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + kInvPhi * (b - a);
                fd = objective(d);
            }
        }
        const double s = 0.5 * (a + b);
        const double f = objective(s);
        trace << "[" << lo << ", " << hi << "] -> s = " << s << " loglik = " << f << "; ";
        if (f > best_f) {
            best_f = f;
            best_s = s;
        }
        const bool at_lo = s - lo < 1e-3 && lo > map.lower_limit;
        const bool at_hi = hi - s < 1e-3 && hi < map.upper_limit;
        if (!at_lo && !at_hi) {
            report.model = CopulaModel::archimedean(family, map.to_alpha(best_s));
            report.loglik = best_f;
            return report;
        }
        if (attempt == 2) {
            break;
        }
        if (at_lo) {
            lo = std::max(map.lower_limit, lo - 4.0);
        }
        if (at_hi) {
            hi = std::min(map.upper_limit, hi + 4.0);
        }
    }
    throw FitError(std::string(to_string(family)) +
                   " fit did not converge after expanding bounds: " + trace.str());
}

// ---------------------------------------------------------------------------
// Serialization: {"family": ..., "params": {...}, "dims": d}

inline nlohmann::json to_json(const CopulaModel& m) {
    nlohmann::json j;
    j["family"] = to_string(m.family);
    j["dims"] = m.dims;
    if (m.family == CopulaFamily::gaussian) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index i = 0; i < m.rho.rows(); ++i) {
            std::vector<double> r;
            for (Eigen::Index k = 0; k < m.rho.cols(); ++k) {
                r.push_back(m.rho(i, k));
            }
            rows.push_back(std::move(r));
        }
        j["params"] = {{"rho", rows}};
    } else {
        j["params"] = {{"alpha", m.alpha}};
    }
    return j;
}

inline CopulaModel copula_from_json(const nlohmann::json& j) {
    const auto family = parse_family(j.at("family").get<std::string>());
    if (family == CopulaFamily::gaussian) {
        const auto rows = j.at("params").at("rho").get<std::vector<std::vector<double>>>();
        Matrix rho(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) {
                throw ModelError("rho must be square");
            }
            for (std::size_t k = 0; k < rows.size(); ++k) {
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
            }
        }
        return CopulaModel::gaussian(std::move(rho));
    }
    return CopulaModel::archimedean(family, j.at("params").at("alpha").get<double>());
}

}  // namespace cetk
