#pragma once

// JSON scenario files for the simulators:
//   {"kind": "mvn", "T": 500, "seed": 7, "params": {...}}
// simulate() returns the data plus metadata (generator, ground truth).

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cetk/simlab.hpp"

namespace cetk::sim {

enum class ScenarioKind {
    mvn,
    gaussian_copula,
    archimedean,
    student_t,
    piecewise,
    lagged_system,
    beta,
    asym_laplace,
    bimodal_normal,
};

inline constexpr std::pair<ScenarioKind, const char*> kScenarioNames[] = {
    {ScenarioKind::mvn, "mvn"},
    {ScenarioKind::gaussian_copula, "gaussian_copula"},
    {ScenarioKind::archimedean, "archimedean"},
    {ScenarioKind::student_t, "student_t"},
    {ScenarioKind::piecewise, "piecewise"},
    {ScenarioKind::lagged_system, "lagged_system"},
    {ScenarioKind::beta, "beta"},
    {ScenarioKind::asym_laplace, "asym_laplace"},
    {ScenarioKind::bimodal_normal, "bimodal_normal"},
};

inline const char* to_string(ScenarioKind k) {
    for (const auto& [kind, name] : kScenarioNames) {
        if (kind == k) {
            return name;
        }
    }
    return "?";
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
    for (const auto& [kind, name] : kScenarioNames) {
        if (s == name) {
            return kind;
        }
    }
    throw ConfigError("unknown scenario kind '" + s + "'");
}

struct Scenario {
    ScenarioKind kind = ScenarioKind::mvn;
    Eigen::Index T = 0;
    std::uint64_t seed = 0;
    nlohmann::json params = nlohmann::json::object();
};

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.kind = parse_scenario_kind(j.at("kind").get<std::string>());
    if (!j.contains("seed")) {
        throw ConfigError("scenario needs an explicit seed");
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    s.T = j.value("T", Eigen::Index{0});
    s.params = j.value("params", nlohmann::json::object());
    if (s.kind != ScenarioKind::piecewise && s.T < 2) {
        throw ConfigError("scenario needs T >= 2");
    }
    return s;
}

inline nlohmann::json to_json(const Scenario& s) {
    return {{"kind", to_string(s.kind)}, {"T", s.T}, {"seed", s.seed}, {"params", s.params}};
}

struct SimOutput {
    Dataset data;
    nlohmann::json metadata;
};

namespace detail {

inline Vector json_vector(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Matrix json_matrix(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) {
        throw ConfigError("empty matrix in scenario");
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) {
            throw ConfigError("ragged matrix in scenario");
        }
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
    }
    return m;
}

inline Margin json_margin(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "normal") {
        return NormalMargin{j.value("mu", 0.0), j.value("sigma", 1.0)};
    }
    if (type == "exponential") {
        return ExponentialMargin{j.value("lambda", 1.0)};
    }
    if (type == "uniform") {
        return UniformMargin{};
    }
    throw ConfigError("unknown margin type '" + type + "'");
}

inline std::vector<Margin> json_margins(const nlohmann::json& params, Eigen::Index d) {
    if (!params.contains("margins")) {
        return std::vector<Margin>(static_cast<std::size_t>(d), UniformMargin{});
    }
    std::vector<Margin> out;
    for (const auto& m : params.at("margins")) {
        out.push_back(json_margin(m));
    }
    return out;
}

}  // namespace detail

inline SimOutput simulate(const Scenario& s) {
    const auto& p = s.params;
    SimOutput out;
    out.metadata = {{"scenario", to_json(s)}, {"rng", kRngAlgorithm}};
    switch (s.kind) {
        case ScenarioKind::mvn: {
            const Matrix cov = detail::json_matrix(p.at("cov"));
            const Vector mean = p.contains("mean") ? detail::json_vector(p.at("mean"))
                                                   : Vector::Zero(cov.rows());
            out.data = sample_mvn(mean, cov, s.T, s.seed);
            break;
        }
        case ScenarioKind::gaussian_copula: {
            const Matrix rho = detail::json_matrix(p.at("rho"));
            out.data = sample_gaussian_copula(rho, detail::json_margins(p, rho.rows()), s.T, s.seed);
            break;
        }
        case ScenarioKind::archimedean: {
            const auto family = parse_family(p.at("family").get<std::string>());
            const auto u = sample_archimedean(family, p.at("alpha").get<double>(), s.T, s.seed);
            out.data = apply_margins(u.values, detail::json_margins(p, 2));
            out.metadata["kendall_tau"] = family_tau(family, p.at("alpha").get<double>());
            break;
        }
        case ScenarioKind::student_t:
            out.data = sample_student_t(p.at("nu").get<double>(), p.value("rho", 0.0), s.T, s.seed);
            break;
        case ScenarioKind::piecewise: {
            std::vector<Regime> regimes;
            for (const auto& r : p.at("regimes")) {
                if (r.contains("cov")) {
                    regimes.push_back({detail::json_vector(r.at("mean")), detail::json_matrix(r.at("cov"))});
                } else {
                    regimes.push_back(Regime::univariate(r.at("mean").get<double>(), r.at("var").get<double>()));
                }
            }
            auto series = make_piecewise_series(regimes, p.at("len_each").get<int>(), s.seed);
            out.data = std::move(series.data);
            out.metadata["change_points"] = series.change_points;
            break;
        }
        case ScenarioKind::lagged_system: {
            const int lag = p.at("lag").get<int>();
            LaggedSystemParams lp;
            lp.period = p.value("period", lp.period);
            const auto series = make_lagged_system(
                parse_lagged_system(p.at("system").get<std::string>()), lag, s.T, s.seed, lp);
            Matrix m(s.T, 2);
            m.col(0) = series.source;
            m.col(1) = series.target;
            out.data = Dataset(std::move(m), {"source", "target"});
            out.metadata["lag"] = lag;
            break;
        }
        case ScenarioKind::beta:
            out.data = Dataset(Matrix(sample_beta(p.at("a").get<double>(), p.at("b").get<double>(), s.T, s.seed)));
            break;
        case ScenarioKind::asym_laplace:
            out.data = Dataset(Matrix(sample_asym_laplace(p.value("mu", 0.0), p.value("delta", 1.0),
                                                          p.at("k").get<double>(), s.T, s.seed)));
            break;
        case ScenarioKind::bimodal_normal:
            out.data = Dataset(Matrix(sample_bimodal_normal(p.value("mu1", 0.0), p.value("mu2", 5.0),
                                                            p.value("sd1", 1.0), p.value("sd2", 1.0),
                                                            p.at("p").get<double>(), s.T, s.seed)));
            break;
    }
    return out;
}

}  // namespace cetk::sim
