// cetk: command-line frontend. Reads CSV, writes JSON (default) or CSV.
//
// Exit status: 0 success, 2 usage error, 1 computation error.
// Defaults of the shared flags can be overridden through the environment:
//   CETK_K, CETK_NORM, CETK_TIE, CETK_JITTER, CETK_SEED, CETK_FORMAT,
//   CETK_THREADS, CETK_DELIMITER
// An explicit flag always wins over the environment.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cetk/cetk.hpp"

namespace {

using nlohmann::json;
using namespace cetk;

struct RunConfig {
    int k = 3;
    std::string norm = "chebyshev";
    std::string tie = "average";
    double jitter = 1e-10;
    std::uint64_t seed = 1;
    std::string format = "json";
    int threads = 0;
    std::string input;
    bool header = false;
    std::string delimiter = ",";

    EntropyConfig entropy() const { return EntropyConfig{k, parse_norm(norm)}; }
    TiePolicy ties() const {
        return tie == "random" ? TiePolicy::random(seed, jitter) : TiePolicy::average();
    }
    CsvOptions csv() const { return CsvOptions{header, delimiter == "tab" ? '\t' : delimiter[0]}; }
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_table(std::ostream& out, const Table& t) {
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) {
        line(r);
    }
}

std::string scalar_text(const json& v) {
    if (v.is_number_float()) {
        return num(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

// CSV output of a non-tabular result: one key,value line per top-level scalar.
Table flatten(const json& j) {
    Table t{{"key", "value"}, {}};
    for (const auto& [key, value] : j.items()) {
        if (!value.is_structured()) {
            t.rows.push_back({key, scalar_text(value)});
        }
    }
    return t;
}

void emit(const RunConfig& rc, const json& j, const std::optional<Table>& table = std::nullopt) {
    if (rc.format == "csv") {
        write_table(std::cout, table ? *table : flatten(j));
    } else {
        std::cout << j.dump(2) << '\n';
    }
}

Table matrix_table(const Matrix& m, const std::vector<std::string>& rows,
                   const std::vector<std::string>& cols) {
    Table t;
    t.header.push_back("");
    t.header.insert(t.header.end(), cols.begin(), cols.end());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> r{rows[static_cast<std::size_t>(i)]};
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(num(m(i, j)));
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

Dataset read_input(const RunConfig& rc, const std::string& path) {
    if (path.empty()) {
        throw UsageError("--input is required");
    }
    if (path == "-") {
        return parse_csv(std::cin, rc.csv());
    }
    return load_csv(path, rc.csv());
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Column tokens are 1-based indices or column names.
int resolve_column(const Dataset& d, const std::string& token) {
    if (all_digits(token)) {
        const int i = std::stoi(token);
        if (i < 1 || i > d.cols()) {
            throw UsageError("column " + token + " out of range 1.." + std::to_string(d.cols()));
        }
        return i - 1;
    }
    const auto& names = d.names();
    const auto it = std::find(names.begin(), names.end(), token);
    if (it == names.end()) {
        throw UsageError("no column named '" + token + "'");
    }
    return static_cast<int>(it - names.begin());
}

std::vector<int> resolve_columns(const Dataset& d, const std::vector<std::string>& tokens) {
    std::vector<int> out;
    for (const auto& t : tokens) {
        out.push_back(resolve_column(d, t));
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, delim)) {
        out.push_back(item);
    }
    return out;
}

json config_echo(const RunConfig& rc, const Dataset& d) {
    return {{"k", rc.k}, {"norm", rc.norm}, {"tie", rc.tie}, {"T", d.rows()}, {"dims", d.cols()}};
}

LagEmbedding parse_embedding(const std::string& s) {
    return s == "source_behind" ? LagEmbedding::source_behind : LagEmbedding::target_ahead;
}

void add_common(CLI::App* app, RunConfig& rc, bool with_input = true) {
    if (with_input) {
        app->add_option("-i,--input", rc.input, "input CSV file ('-' for stdin)");
        app->add_flag("--header", rc.header, "first CSV line holds column names");
        app->add_option("--delimiter", rc.delimiter, "field delimiter (a character or 'tab')")
            ->envname("CETK_DELIMITER");
    }
    app->add_option("--k", rc.k, "neighbours in the kNN entropy estimator")
        ->check(CLI::Range(1, 1000000))
        ->envname("CETK_K");
    app->add_option("--norm", rc.norm, "kNN distance")
        ->check(CLI::IsMember({"chebyshev", "euclidean"}))
        ->envname("CETK_NORM");
    app->add_option("--tie", rc.tie, "tie handling in the rank transform")
        ->check(CLI::IsMember({"average", "random"}))
        ->envname("CETK_TIE");
    app->add_option("--jitter", rc.jitter, "relative jitter amplitude for --tie random")
        ->check(CLI::PositiveNumber)
        ->envname("CETK_JITTER");
    app->add_option("--seed", rc.seed, "seed for every random choice")->envname("CETK_SEED");
    app->add_option("--format", rc.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->envname("CETK_FORMAT");
    app->add_option("--threads", rc.threads, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber)
        ->envname("CETK_THREADS");
}

struct TestFlags {
    int permutations = 0;
    double level = 0.05;
    std::optional<double> threshold;
};

void add_test_flags(CLI::App* app, TestFlags& f) {
    app->add_option("--permutations", f.permutations, "permutation replicates (0 = none, else >= 99)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--level", f.level, "significance level for the permutation decision")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--threshold", f.threshold, "reject when the statistic exceeds this value");
}

void add_label_draws(CLI::App* app, int& draws) {
    app->add_option("--label-draws", draws, "label tie-break draws averaged per statistic")
        ->check(CLI::PositiveNumber)
        ->envname("CETK_LABEL_DRAWS");
}

void finish_report(TestReport& r, const TestFlags& f, const std::function<double()>& pvalue) {
    if (f.threshold) {
        r.decide_by_threshold(*f.threshold);
    }
    if (f.permutations > 0) {
        r.config["permutations"] = f.permutations;
        r.decide_by_p_value(pvalue(), f.level);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Copula entropy toolkit: dependence, causality and hypothesis tests from CSV data", "cetk"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    RunConfig rc;
    std::map<std::string, std::function<void()>> handlers;
    const auto sub = [&](const std::string& name, const std::string& help, bool with_input = true) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, rc, with_input);
        return s;
    };

    // ce
    std::vector<std::string> ce_cols;
    sub("ce", "copula entropy (and MI = -CE) of the selected columns")
        ->add_option("--cols", ce_cols, "columns to use (default: all)")
        ->delimiter(',');
    handlers["ce"] = [&] {
        Dataset d = read_input(rc, rc.input);
        if (!ce_cols.empty()) {
            d = d.select(resolve_columns(d, ce_cols));
        }
        const auto r = copula_entropy(d, rc.entropy(), rc.ties());
        json j = {{"ce", r.ce}, {"mi", r.mi}};
        j.update(config_echo(rc, d));
        emit(rc, j);
    };

    // mi-matrix
    sub("mi-matrix", "pairwise MI matrix (-CE of every pair)");
    handlers["mi-matrix"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const auto m = ce_matrix(d, rc.entropy(), rc.ties());
        json j = {{"names", m.names}, {"mi", matrix_json(m.values)}};
        j.update(config_echo(rc, d));
        emit(rc, j, matrix_table(m.values, m.names, m.names));
    };

    // cmi
    std::vector<std::string> cx, cy, cz;
    {
        auto* s = sub("cmi", "conditional mutual information I(x; y | z)");
        s->add_option("--x", cx, "first block")->required()->delimiter(',');
        s->add_option("--y", cy, "second block")->required()->delimiter(',');
        s->add_option("--z", cz, "conditioning block")->required()->delimiter(',');
    }
    handlers["cmi"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const double v = conditional_mi(d, resolve_columns(d, cx), resolve_columns(d, cy),
                                        resolve_columns(d, cz), rc.entropy(), rc.ties());
        json j = {{"cmi", v}, {"x", cx}, {"y", cy}, {"z", cz}};
        j.update(config_echo(rc, d));
        emit(rc, j);
    };

    // te and lag share source/target flags
    std::string source = "1";
    std::string target = "2";
    int lag = 1;
    int max_lag = 10;
    std::string embedding = "target_ahead";
    const auto add_pair = [&](CLI::App* s) {
        s->add_option("--source", source, "source column");
        s->add_option("--target", target, "target column");
        s->add_option("--embedding", embedding, "lag placement: (y[t+l], y[t], x[t]) or (y[t+1], y[t], x[t-l+1])")
            ->check(CLI::IsMember({"target_ahead", "source_behind"}));
    };
    {
        auto* s = sub("te", "transfer entropy from source to target at one lag");
        add_pair(s);
        s->add_option("--lag", lag, "lag")->check(CLI::PositiveNumber);
    }
    handlers["te"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const int si = resolve_column(d, source);
        const int ti = resolve_column(d, target);
        const double v = transfer_entropy(d.column(si), d.column(ti), lag, rc.entropy(), rc.ties(),
                                          parse_embedding(embedding));
        json j = {{"te", v}, {"lag", lag}, {"source", d.names()[static_cast<std::size_t>(si)]},
                  {"target", d.names()[static_cast<std::size_t>(ti)]}, {"embedding", embedding}};
        j.update(config_echo(rc, d));
        emit(rc, j);
    };
    {
        auto* s = sub("lag", "transfer-entropy profile over lags 1..max-lag and the best lag");
        add_pair(s);
        s->add_option("--max-lag", max_lag, "largest lag examined")->check(CLI::PositiveNumber);
    }
    handlers["lag"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const auto p = estimate_time_lag(d.column(resolve_column(d, source)),
                                         d.column(resolve_column(d, target)), max_lag, rc.entropy(),
                                         rc.ties(), parse_embedding(embedding));
        json j = to_json(p);
        j["embedding"] = embedding;
        j.update(config_echo(rc, d));
        Table t{{"lag", "te"}, {}};
        for (std::size_t i = 0; i < p.lags.size(); ++i) {
            t.rows.push_back({std::to_string(p.lags[i]), num(p.te[i])});
        }
        emit(rc, j, t);
    };

    // assoc
    std::string groups;
    sub("assoc", "association among column groups (CE of all minus within-group CEs)")
        ->add_option("--groups", groups, "groups separated by ';', columns by ',' (e.g. 1,2;3,4)")
        ->required();
    handlers["assoc"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        VectorPartition parts;
        for (const auto& g : split(groups, ';')) {
            parts.push_back(resolve_columns(d, split(g, ',')));
        }
        const double v = vector_association(d, parts, rc.entropy(), rc.ties());
        json j = {{"association", v}, {"groups", groups}};
        j.update(config_echo(rc, d));
        emit(rc, j);
    };

    // select
    std::string sel_target = "1";
    int top = 0;
    {
        auto* s = sub("select", "rank candidate columns by |CE| with the target");
        s->add_option("--target", sel_target, "target column");
        s->add_option("--top", top, "keep the best N candidates (0 = all)")->check(CLI::NonNegativeNumber);
    }
    handlers["select"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        auto r = select_variables(d, resolve_column(d, sel_target), rc.entropy(), rc.ties());
        if (top > 0 && static_cast<std::size_t>(top) < r.ranking.size()) {
            r.ranking.resize(static_cast<std::size_t>(top));
        }
        json j = to_json(r);
        j.update(config_echo(rc, d));
        Table t{{"rank", "name", "column", "score"}, {}};
        for (std::size_t i = 0; i < r.ranking.size(); ++i) {
            t.rows.push_back({std::to_string(i + 1), r.ranking[i].name,
                              std::to_string(r.ranking[i].column + 1), num(r.ranking[i].score)});
        }
        emit(rc, j, t);
    };

    // sysid
    double dt = 0.0;
    bool augment = false;
    {
        auto* s = sub("sysid", "relevance of each state (and products, with --augment) to each derivative");
        s->add_option("--dt", dt, "sampling step")->required()->check(CLI::PositiveNumber);
        s->add_flag("--augment", augment, "add pairwise products as candidates");
    }
    handlers["sysid"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const auto r = identify_system(d, dt, rc.entropy(), rc.ties(), augment);
        json j = to_json(r);
        j.update(config_echo(rc, d));
        std::vector<std::string> rows;
        for (const auto& s : r.states) {
            rows.push_back("d" + s);
        }
        emit(rc, j, matrix_table(r.values, rows, r.candidates));
    };

    // tree
    std::string dot_path;
    sub("tree", "Chow-Liu maximum-MI spanning tree")
        ->add_option("--dot", dot_path, "also write the tree as Graphviz to this file");
    handlers["tree"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const auto t = chow_liu_tree(d, rc.entropy(), rc.ties());
        if (!dot_path.empty()) {
            std::ofstream out(dot_path);
            if (!out) {
                throw Error("cannot write " + dot_path);
            }
            write_dot(out, t);
        }
        json j = to_json(t);
        j.update(config_echo(rc, d));
        Table tab{{"i", "j", "weight"}, {}};
        for (const auto& e : t.edges) {
            tab.rows.push_back({std::to_string(e.i + 1), std::to_string(e.j + 1), num(e.weight)});
        }
        emit(rc, j, tab);
    };

    // mvnt
    TestFlags mvn_flags;
    add_test_flags(sub("mvnt", "multivariate normality statistic"), mvn_flags);
    handlers["mvnt"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        auto r = mvn_test(d, rc.entropy(), rc.ties());
        finish_report(r, mvn_flags, [&] {
            return permutation_pvalue(TestKind::mvn, MvnInputs{d}, mvn_flags.permutations, rc.seed,
                                      rc.entropy(), rc.ties());
        });
        emit(rc, to_json(r));
    };

    // gof
    std::string gof_family = "all";
    std::vector<std::string> gof_cols;
    {
        auto* s = sub("gof", "copula goodness of fit: parametric CE of the fitted family minus nonparametric CE");
        s->add_option("--family", gof_family, "candidate family")
            ->check(CLI::IsMember({"all", "gaussian", "gumbel", "frank", "clayton"}));
        s->add_option("--cols", gof_cols, "columns to use (default: all)")->delimiter(',');
    }
    handlers["gof"] = [&] {
        Dataset d = read_input(rc, rc.input);
        if (!gof_cols.empty()) {
            d = d.select(resolve_columns(d, gof_cols));
        }
        std::vector<CopulaFamily> families;
        if (gof_family == "all") {
            families.assign(std::begin(kAllFamilies), std::end(kAllFamilies));
        } else {
            families.push_back(parse_family(gof_family));
        }
        json reports = json::array();
        Table t{{"family", "statistic", "loglik"}, {}};
        std::string best;
        double best_value = 0.0;
        for (const auto f : families) {
            const auto r = copula_gof_test(d, f, rc.entropy(), rc.ties());
            json j = to_json(r.report);
            j["loglik"] = r.fit.loglik;
            reports.push_back(j);
            t.rows.push_back({to_string(f), num(r.report.statistic), num(r.fit.loglik)});
            if (best.empty() || r.report.statistic < best_value) {
                best = to_string(f);
                best_value = r.report.statistic;
            }
        }
        emit(rc, {{"reports", reports}, {"best", best}}, t);
    };

    // tst
    int label_draws = kDefaultLabelDraws;
    std::string a_path, b_path;
    Eigen::Index split_at = 0;
    TestFlags tst_flags;
    {
        auto* s = sub("tst", "two-sample test; give --a and --b, or --input with --split");
        s->add_option("--a", a_path, "first sample CSV");
        s->add_option("--b", b_path, "second sample CSV");
        s->add_option("--split", split_at, "with --input: the first N rows form the first sample")
            ->check(CLI::NonNegativeNumber);
        add_test_flags(s, tst_flags);
        add_label_draws(s, label_draws);
    }
    handlers["tst"] = [&] {
        Dataset a, b;
        if (!a_path.empty() || !b_path.empty()) {
            if (a_path.empty() || b_path.empty() || !rc.input.empty()) {
                throw UsageError("give both --a and --b, or --input with --split");
            }
            a = read_input(rc, a_path);
            b = read_input(rc, b_path);
        } else {
            const Dataset d = read_input(rc, rc.input);
            if (split_at <= 0 || split_at >= d.rows()) {
                throw UsageError("--split must lie strictly between 0 and the row count");
            }
            a = d.rows_range(0, split_at);
            b = d.rows_range(split_at, d.rows());
        }
        auto r = two_sample_test(a, b, rc.entropy(), rc.ties(), rc.seed, label_draws);
        finish_report(r, tst_flags, [&] {
            return permutation_pvalue(TestKind::two_sample, TwoSampleInputs{a, b}, tst_flags.permutations,
                                      rc.seed, rc.entropy(), rc.ties(), label_draws);
        });
        emit(rc, to_json(r));
    };

    // cpd
    double cpd_threshold = 0.1;
    int min_segment = 15;
    bool single = false;
    {
        auto* s = sub("cpd", "change-point detection by binary segmentation on the two-sample statistic");
        s->add_option("--threshold", cpd_threshold, "split a segment when its peak statistic exceeds this")
            ->check(CLI::PositiveNumber);
        s->add_option("--min-segment", min_segment, "minimum rows on each side of a split");
        s->add_flag("--single", single, "report only the single best split");
        add_label_draws(s, label_draws);
    }
    handlers["cpd"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        ChangePointResult r;
        if (single) {
            auto one = single_change_point(d, rc.entropy(), rc.ties(), min_segment, rc.seed, label_draws);
            r.indices = {one.index};
            r.profiles = {std::move(one.profile)};
            r.threshold = cpd_threshold;
            r.min_segment = min_segment;
        } else {
            r = multi_change_point(d, cpd_threshold, min_segment, rc.entropy(), rc.ties(), rc.seed,
                                   label_draws);
        }
        json j = to_json(r);
        j.update(config_echo(rc, d));
        Table t{{"begin", "end", "split", "statistic"}, {}};
        for (const auto& p : r.profiles) {
            for (std::size_t i = 0; i < p.splits.size(); ++i) {
                t.rows.push_back({std::to_string(p.begin + 1), std::to_string(p.end),
                                  std::to_string(p.begin + p.splits[i]), num(p.statistics[i])});
            }
        }
        emit(rc, j, t);
    };

    // symtest
    std::string sym_col = "1";
    TestFlags sym_flags;
    {
        auto* s = sub("symtest", "symmetry test: two-sample statistic between x - mean and its mirror");
        s->add_option("--col", sym_col, "column to test");
        add_test_flags(s, sym_flags);
        add_label_draws(s, label_draws);
    }
    handlers["symtest"] = [&] {
        const Dataset d = read_input(rc, rc.input);
        const Vector x = d.column(resolve_column(d, sym_col));
        auto r = symmetry_test(x, rc.entropy(), rc.ties(), rc.seed, label_draws);
        finish_report(r, sym_flags, [&] {
            return permutation_pvalue(TestKind::symmetry, SymmetryInputs{x}, sym_flags.permutations,
                                      rc.seed, rc.entropy(), rc.ties(), label_draws);
        });
        emit(rc, to_json(r));
    };

    // fit-copula
    std::string fit_family;
    std::vector<std::string> fit_cols;
    {
        auto* s = sub("fit-copula", "maximum-likelihood fit of a parametric copula");
        s->add_option("--family", fit_family, "copula family")
            ->required()
            ->check(CLI::IsMember({"gaussian", "gumbel", "frank", "clayton"}));
        s->add_option("--cols", fit_cols, "columns to use (default: all)")->delimiter(',');
    }
    handlers["fit-copula"] = [&] {
        Dataset d = read_input(rc, rc.input);
        if (!fit_cols.empty()) {
            d = d.select(resolve_columns(d, fit_cols));
        }
        const auto pobs = pseudo_observations(d, rc.ties());
        const auto fit = fit_copula(pobs, parse_family(fit_family));
        json j = {{"model", to_json(fit.model)},
                  {"loglik", fit.loglik},
                  {"parametric_ce", -fit.loglik / static_cast<double>(d.rows())},
                  {"iterations", fit.iterations},
                  {"initializer", fit.initializer},
                  {"warnings", fit.warnings}};
        j.update(config_echo(rc, d));
        emit(rc, j);
    };

    // simulate
    std::string scenario_path, out_path;
    {
        auto* s = sub("simulate", "generate data from a JSON scenario", false);
        s->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        s->add_option("--out", out_path, "write the CSV here and print metadata JSON (default: CSV on stdout)");
    }
    handlers["simulate"] = [&] {
        std::ifstream in(scenario_path);
        if (!in) {
            throw Error("cannot open scenario file " + scenario_path);
        }
        json scenario_doc;
        try {
            scenario_doc = json::parse(in);
        } catch (const json::exception& e) {
            throw ParseError(std::string("scenario is not valid JSON: ") + e.what(), 0, 0);
        }
        const auto out = sim::simulate(sim::scenario_from_json(scenario_doc));
        if (out_path.empty()) {
            write_csv(std::cout, out.data, true);
            return;
        }
        std::ofstream csv(out_path);
        if (!csv) {
            throw Error("cannot write " + out_path);
        }
        write_csv(csv, out.data, true);
        json meta = out.metadata;
        meta["out"] = out_path;
        meta["T"] = out.data.rows();
        meta["dims"] = out.data.cols();
        std::cout << meta.dump(2) << '\n';
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    set_threads(static_cast<std::size_t>(rc.threads));
    for (const auto* s : app.get_subcommands()) {
        try {
            handlers.at(s->get_name())();
        } catch (const UsageError& e) {
            std::cerr << "usage error: " << e.what() << "\n\n" << s->help();
            return 2;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
