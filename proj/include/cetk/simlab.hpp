#pragma once

// Seeded generators for the simulation designs used by the acceptance suite,
// plus closed-form Gaussian information oracles. Every generator is a pure
// function of its arguments and seed; the RNG is Philox4x32-10 (see rng.hpp).

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "cetk/copula.hpp"
#include "cetk/dataset.hpp"
#include "cetk/error.hpp"
#include "cetk/rng.hpp"
#include "cetk/special.hpp"

namespace cetk::sim {

// ---------------------------------------------------------------------------
// Closed-form oracles

/// Gaussian copula entropy 1/2 log|R|.
inline double gaussian_ce(const Matrix& corr) {
    return 0.5 * std::log(corr.determinant());
}

inline double gaussian_mi(double rho) { return -0.5 * std::log1p(-rho * rho); }

/// I(x; y | z) for a trivariate Gaussian with correlation matrix ordered
/// (x, y, z): 1/2 ln((1 - r_xz^2)(1 - r_yz^2) / |R|).
inline double gaussian_cmi_oracle(const Matrix& corr3) {
    if (corr3.rows() != 3 || corr3.cols() != 3) {
        throw DimensionError("gaussian_cmi_oracle needs a 3x3 correlation matrix");
    }
    const double rxz = corr3(0, 2);
    const double ryz = corr3(1, 2);
    return 0.5 * std::log((1.0 - rxz * rxz) * (1.0 - ryz * ryz) / corr3.determinant());
}

inline Matrix corr3(double rxy, double rxz, double ryz) {
    Matrix r(3, 3);
    r << 1.0, rxy, rxz, rxy, 1.0, ryz, rxz, ryz, 1.0;
    return r;
}

inline Matrix corr2(double rho) {
    Matrix r(2, 2);
    r << 1.0, rho, rho, 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// Margins

struct NormalMargin {
    double mu = 0.0;
    double sigma = 1.0;
};
struct ExponentialMargin {
    double lambda = 1.0;
};
struct UniformMargin {};

using Margin = std::variant<NormalMargin, ExponentialMargin, UniformMargin>;

inline double margin_quantile(const Margin& m, double p) {
    return std::visit(
        [p](const auto& mm) -> double {
            using M = std::decay_t<decltype(mm)>;
            if constexpr (std::is_same_v<M, NormalMargin>) {
                return mm.mu + mm.sigma * normal_quantile(p);
            } else if constexpr (std::is_same_v<M, ExponentialMargin>) {
                return -std::log1p(-p) / mm.lambda;
            } else {
                return p;
            }
        },
        m);
}

/// Maps a copula sample in (0,1)^d through per-column quantile functions.
inline Dataset apply_margins(const Matrix& u, const std::vector<Margin>& margins) {
    if (static_cast<Eigen::Index>(margins.size()) != u.cols()) {
        throw DimensionError("one margin per column required");
    }
    Matrix x(u.rows(), u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            x(i, j) = margin_quantile(margins[static_cast<std::size_t>(j)], u(i, j));
        }
    }
    return Dataset(std::move(x));
}

// ---------------------------------------------------------------------------
// Multivariate normal family

inline Matrix standard_normals(Eigen::Index t, Eigen::Index d, Rng& rng) {
    Matrix z(t, d);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            z(i, j) = rng.normal();
        }
    }
    return z;
}

inline Matrix cholesky_factor(const Matrix& cov) {
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ModelError("covariance matrix must be symmetric");
    }
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw ModelError("covariance matrix is not positive definite");
    }
    return llt.matrixL();
}

/// Rows x_t = mean + L z_t with L the Cholesky factor of cov.
inline Matrix mvn_matrix(const Vector& mean, const Matrix& cov, Eigen::Index t, Rng& rng) {
    if (mean.size() != cov.rows()) {
        throw DimensionError("mean and covariance dimensions differ");
    }
    const Matrix l = cholesky_factor(cov);
    Matrix x = standard_normals(t, cov.rows(), rng) * l.transpose();
    x.rowwise() += mean.transpose();
    return x;
}

inline Dataset sample_mvn(const Vector& mean, const Matrix& cov, Eigen::Index t,
                          std::uint64_t seed) {
    Rng rng(seed);
    return Dataset(mvn_matrix(mean, cov, t, rng));
}

inline Dataset sample_gaussian_copula(const Matrix& rho, const std::vector<Margin>& margins,
                                      Eigen::Index t, std::uint64_t seed) {
    Rng rng(seed);
    Matrix z = mvn_matrix(Vector::Zero(rho.rows()), rho, t, rng);
    Matrix u = z.unaryExpr([](double v) {
        // keep strictly inside (0,1) for the quantile maps
        return std::clamp(normal_cdf(v), 1e-300, 1.0 - 1e-16);
    });
    return apply_margins(u, margins);
}

/// Bivariate Student t: Gaussian rows divided by sqrt(chi2_nu / nu).
inline Dataset sample_student_t(double nu, double rho, Eigen::Index t, std::uint64_t seed) {
    if (!(nu > 0.0)) {
        throw ModelError("degrees of freedom must be positive");
    }
    Rng rng(seed);
    Matrix x = mvn_matrix(Vector::Zero(2), corr2(rho), t, rng);
    for (Eigen::Index i = 0; i < t; ++i) {
        x.row(i) /= std::sqrt(rng.chi_squared(nu) / nu);
    }
    return Dataset(std::move(x));
}

// ---------------------------------------------------------------------------
// Archimedean copulas

/// Positive stable variate with Laplace transform exp(-s^theta), 0 < theta <= 1
/// (Kanter's representation).
inline double positive_stable(double theta, Rng& rng) {
    if (theta == 1.0) {
        return 1.0;
    }
    const double u = std::numbers::pi * rng.uniform();
    const double w = rng.exponential();
    const double a = std::sin(theta * u) / std::pow(std::sin(u), 1.0 / theta);
    const double b = std::pow(std::sin((1.0 - theta) * u) / w, (1.0 - theta) / theta);
    return a * b;
}

/// Exact bivariate copula sample in (0,1)^2. Clayton and Frank use
/// conditional inversion; Gumbel uses the Marshall-Olkin frailty construction
/// with a positive stable mixing variable.
inline PseudoObservations sample_archimedean(CopulaFamily family, double alpha, Eigen::Index t,
                                             std::uint64_t seed) {
    if (family == CopulaFamily::gaussian) {
        throw ModelError("sample_archimedean: gaussian is not archimedean");
    }
    CopulaModel::archimedean(family, alpha);  // domain check
    Rng rng(seed);
    PseudoObservations out;
    out.values.resize(t, 2);
    out.source_dims = 2;
    constexpr double kEps = 1e-15;
    for (Eigen::Index i = 0; i < t; ++i) {
        double u = 0.0;
        double v = 0.0;
        switch (family) {
            case CopulaFamily::clayton: {
                u = rng.uniform();
                const double w = rng.uniform();
                v = std::pow((std::pow(w, -alpha / (1.0 + alpha)) - 1.0) * std::pow(u, -alpha) + 1.0,
                             -1.0 / alpha);
                break;
            }
            case CopulaFamily::frank: {
                u = rng.uniform();
                const double w = rng.uniform();
                v = -std::log1p(w * std::expm1(-alpha) / (w + (1.0 - w) * std::exp(-alpha * u))) /
                    alpha;
                break;
            }
            case CopulaFamily::gumbel: {
                const double s = positive_stable(1.0 / alpha, rng);
                const double e1 = rng.exponential();
                const double e2 = rng.exponential();
                u = std::exp(-std::pow(e1 / s, 1.0 / alpha));
                v = std::exp(-std::pow(e2 / s, 1.0 / alpha));
                break;
            }
            case CopulaFamily::gaussian: break;
        }
        out.values(i, 0) = std::clamp(u, kEps, 1.0 - kEps);
        out.values(i, 1) = std::clamp(v, kEps, 1.0 - kEps);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Piecewise (change-point) series

struct Regime {
    Vector mean;
    Matrix cov;

    static Regime univariate(double mean, double var) {
        return {Vector::Constant(1, mean), Matrix::Constant(1, 1, var)};
    }
    /// Bivariate regime with equal means, unit variances and correlation rho.
    static Regime bivariate(double mean, double rho) {
        return {Vector::Constant(2, mean), corr2(rho)};
    }
};

struct PiecewiseSeries {
    Dataset data;
    /// 1-based positions where a new regime starts (first row of the regime).
    std::vector<int> change_points;
};

inline PiecewiseSeries make_piecewise_series(const std::vector<Regime>& regimes, int len_each,
                                             std::uint64_t seed) {
    if (regimes.empty() || len_each < 1) {
        throw ConfigError("piecewise series needs at least one regime of positive length");
    }
    const auto d = regimes.front().mean.size();
    Matrix all(static_cast<Eigen::Index>(regimes.size()) * len_each, d);
    Rng rng(seed);
    std::vector<int> cps;
    for (std::size_t r = 0; r < regimes.size(); ++r) {
        if (regimes[r].mean.size() != d) {
            throw DimensionError("all regimes must share a dimension");
        }
        all.middleRows(static_cast<Eigen::Index>(r) * len_each, len_each) =
            mvn_matrix(regimes[r].mean, regimes[r].cov, len_each, rng);
        if (r > 0) {
            cps.push_back(static_cast<int>(r) * len_each);
        }
    }
    return {Dataset(std::move(all)), std::move(cps)};
}

/// The four-regime designs for change-point experiments (100 points each in
/// the acceptance runs). Bivariate settings give (mean of both coordinates,
/// correlation) per regime.
enum class ChangeSetting { uni_mean, uni_mean_var, uni_var, bi_mean, bi_mean_var, bi_var };

inline const char* to_string(ChangeSetting s) {
    switch (s) {
        case ChangeSetting::uni_mean: return "univariate-mean";
        case ChangeSetting::uni_mean_var: return "univariate-mean-var";
        case ChangeSetting::uni_var: return "univariate-var";
        case ChangeSetting::bi_mean: return "bivariate-mean";
        case ChangeSetting::bi_mean_var: return "bivariate-mean-var";
        case ChangeSetting::bi_var: return "bivariate-var";
    }
    return "?";
}

inline std::vector<Regime> change_setting(ChangeSetting s) {
    using R = Regime;
    switch (s) {
        case ChangeSetting::uni_mean:
            return {R::univariate(0, 1), R::univariate(5, 1), R::univariate(10, 1), R::univariate(3, 1)};
        case ChangeSetting::uni_mean_var:
            return {R::univariate(0, 1), R::univariate(5, 3), R::univariate(10, 1), R::univariate(3, 10)};
        case ChangeSetting::uni_var:
            return {R::univariate(0, 1), R::univariate(0, 10), R::univariate(0, 5), R::univariate(0, 1)};
        case ChangeSetting::bi_mean:
            return {R::bivariate(0, 0.2), R::bivariate(10, 0.2), R::bivariate(5, 0.2), R::bivariate(1, 0.2)};
        case ChangeSetting::bi_mean_var:
            return {R::bivariate(0, 0.2), R::bivariate(10, 0.8), R::bivariate(5, 0.1), R::bivariate(1, 0.9)};
        case ChangeSetting::bi_var:
            return {R::bivariate(0, 0.2), R::bivariate(0, 0.8), R::bivariate(0, 0.1), R::bivariate(0, 0.9)};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Time-lagged systems

enum class LaggedSystem {
    random_input,
    nonlinear_random_input,
    wiener,
    second_order_wiener,
    nonlinear_second_order_wiener,
};

inline constexpr LaggedSystem kAllLaggedSystems[] = {
    LaggedSystem::random_input, LaggedSystem::nonlinear_random_input, LaggedSystem::wiener,
    LaggedSystem::second_order_wiener, LaggedSystem::nonlinear_second_order_wiener};

inline const char* to_string(LaggedSystem s) {
    switch (s) {
        case LaggedSystem::random_input: return "random_input";
        case LaggedSystem::nonlinear_random_input: return "nonlinear_random_input";
        case LaggedSystem::wiener: return "wiener";
        case LaggedSystem::second_order_wiener: return "second_order_wiener";
        case LaggedSystem::nonlinear_second_order_wiener: return "nonlinear_second_order_wiener";
    }
    return "?";
}

inline LaggedSystem parse_lagged_system(const std::string& s) {
    for (const auto k : kAllLaggedSystems) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown lagged system '" + s + "'");
}

struct LaggedSeries {
    Vector source;
    Vector target;
};

struct LaggedSystemParams {
    double input_var = 0.1;     // xi_1 ~ N(0, 0.1)
    double output_var = 0.001;  // xi_2 ~ N(0, 0.001)
    double alpha = 0.2;
    double beta = 0.8;
    int period = 100;  // m in sin(2 pi i / m)
    int burn_in = 200;
};

/// Simulates source x and target y of one of the lagged systems with lag l:
///   random input            x_i = xi1,                         y_{i+l} = x_i + xi2
///   nonlinear random input  x_i = sin(2 pi i / m) + xi1,       y_{i+l} = x_i + xi2
///   wiener                  x_i = x_{i-1} + xi1,               y_{i+l} = x_i + xi2
///   second order wiener     x_i = a x_{i-1} + b x_{i-l} + xi1, y_i = x_i + xi2
///   nonlinear second order  x_i = a x_{i-1} + b x_{i-l} + xi1, y_i = x_i^2 + sin(x_i) + xi2
inline LaggedSeries make_lagged_system(LaggedSystem kind, int lag, Eigen::Index t,
                                       std::uint64_t seed, const LaggedSystemParams& p = {}) {
    if (lag < 1 || t < 2) {
        throw ConfigError("lagged system needs lag >= 1 and T >= 2");
    }
    Rng rng(seed);
    const double sd1 = std::sqrt(p.input_var);
    const double sd2 = std::sqrt(p.output_var);
    const Eigen::Index pre = p.burn_in + lag;
    const Eigen::Index total = pre + t;
    Vector x = Vector::Zero(total);
    Vector y = Vector::Zero(total);
    for (Eigen::Index i = 0; i < total; ++i) {
        const double xi1 = rng.normal(0.0, sd1);
        switch (kind) {
            case LaggedSystem::random_input: x[i] = xi1; break;
            case LaggedSystem::nonlinear_random_input:
                x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i - pre) / p.period) + xi1;
                break;
            case LaggedSystem::wiener: x[i] = (i > 0 ? x[i - 1] : 0.0) + xi1; break;
            case LaggedSystem::second_order_wiener:
            case LaggedSystem::nonlinear_second_order_wiener:
                x[i] = (i >= 1 ? p.alpha * x[i - 1] : 0.0) + (i >= lag ? p.beta * x[i - lag] : 0.0) +
                       xi1;
                break;
        }
    }
    for (Eigen::Index i = 0; i < total; ++i) {
        const double xi2 = rng.normal(0.0, sd2);
        switch (kind) {
            case LaggedSystem::random_input:
            case LaggedSystem::nonlinear_random_input:
            case LaggedSystem::wiener: y[i] = (i >= lag ? x[i - lag] : 0.0) + xi2; break;
            case LaggedSystem::second_order_wiener: y[i] = x[i] + xi2; break;
            case LaggedSystem::nonlinear_second_order_wiener:
                y[i] = x[i] * x[i] + std::sin(x[i]) + xi2;
                break;
        }
    }
    return {x.tail(t), y.tail(t)};
}

// ---------------------------------------------------------------------------
// Dynamical systems for identification

/// RK4 trajectory of dx/dt = f(x) sampled every dt; the initial state is
/// jittered by the seed and a burn-in of 1000 steps is discarded.
template <typename F>
Dataset integrate_ode(F&& f, Vector x0, double dt, Eigen::Index t, std::uint64_t seed,
                      std::vector<std::string> names) {
    Rng rng(seed);
    for (Eigen::Index j = 0; j < x0.size(); ++j) {
        x0[j] += rng.normal(0.0, 0.1);
    }
    Matrix out(t, x0.size());
    Vector x = x0;
    const auto step = [&](const Vector& s) {
        const Vector k1 = f(s);
        const Vector k2 = f(s + 0.5 * dt * k1);
        const Vector k3 = f(s + 0.5 * dt * k2);
        const Vector k4 = f(s + dt * k3);
        return Vector(s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };
    for (int i = 0; i < 1000; ++i) {
        x = step(x);
    }
    for (Eigen::Index i = 0; i < t; ++i) {
        out.row(i) = x.transpose();
        x = step(x);
    }
    return Dataset(std::move(out), std::move(names));
}

inline Dataset simulate_lorenz(Eigen::Index t, double dt, std::uint64_t seed, double sigma = 10.0,
                               double rho = 28.0, double beta = 8.0 / 3.0) {
    const auto f = [=](const Vector& s) {
        Vector d(3);
        d << sigma * (s[1] - s[0]), s[0] * (rho - s[2]) - s[1], s[0] * s[1] - beta * s[2];
        return d;
    };
    return integrate_ode(f, Vector::Constant(3, 1.0), dt, t, seed, {"x", "y", "z"});
}

inline Dataset simulate_rossler(Eigen::Index t, double dt, std::uint64_t seed, double a = 0.38,
                                double b = 0.2, double c = 5.7) {
    const auto f = [=](const Vector& s) {
        Vector d(3);
        d << -(s[1] + s[2]), s[0] + a * s[1], b + s[2] * (s[0] - c);
        return d;
    };
    return integrate_ode(f, Vector::Constant(3, 1.0), dt, t, seed, {"x", "y", "z"});
}

/// Two independent Ornstein-Uhlenbeck processes dx = -x dt + s dW (Euler-Maruyama).
inline Dataset simulate_decoupled_pair(Eigen::Index t, double dt, std::uint64_t seed,
                                       double noise = 1.0) {
    Rng rng(seed);
    Matrix out(t, 2);
    double x = rng.normal();
    double y = rng.normal();
    const double s = noise * std::sqrt(dt);
    for (Eigen::Index i = 0; i < t; ++i) {
        out(i, 0) = x;
        out(i, 1) = y;
        x += -x * dt + s * rng.normal();
        y += -y * dt + s * rng.normal();
    }
    return Dataset(std::move(out), {"x", "y"});
}

// ---------------------------------------------------------------------------
// Univariate laws for symmetry experiments

/// Beta(a, b) by inverse CDF.
inline Vector sample_beta(double a, double b, Eigen::Index t, std::uint64_t seed) {
    if (!(a > 0.0 && b > 0.0)) {
        throw ModelError("beta parameters must be positive");
    }
    Rng rng(seed);
    Vector x(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        x[i] = boost::math::ibeta_inv(a, b, rng.uniform());
    }
    return x;
}

/// Asymmetric Laplace with density exp(-(x - mu) k^s s / delta) / (delta (k + 1/k)),
/// s = sign(x - mu), by inverse CDF.
inline double asym_laplace_quantile(double p, double mu, double delta, double k) {
    const double k2 = k * k;
    const double split = k2 / (1.0 + k2);
    if (p <= split) {
        return mu + k * delta * std::log(p * (1.0 + k2) / k2);
    }
    return mu - delta / k * std::log((1.0 - p) * (1.0 + k2));
}

inline Vector sample_asym_laplace(double mu, double delta, double k, Eigen::Index t,
                                  std::uint64_t seed) {
    if (!(delta > 0.0 && k > 0.0)) {
        throw ModelError("asymmetric Laplace needs delta > 0 and k > 0");
    }
    Rng rng(seed);
    Vector x(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        x[i] = asym_laplace_quantile(rng.uniform(), mu, delta, k);
    }
    return x;
}

/// Mixture p N(mu1, sd1^2) + (1 - p) N(mu2, sd2^2).
inline Vector sample_bimodal_normal(double mu1, double mu2, double sd1, double sd2, double p,
                                    Eigen::Index t, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ModelError("mixture proportion must lie in [0, 1]");
    }
    Rng rng(seed);
    Vector x(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        const bool first = rng.uniform() < p;
        x[i] = first ? rng.normal(mu1, sd1) : rng.normal(mu2, sd2);
    }
    return x;
}

}  // namespace cetk::sim
