#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "monoidx/bootstrap.hpp"
#include "monoidx/csv.hpp"
#include "monoidx/errors.hpp"
#include "monoidx/functions.hpp"
#include "monoidx/grouping.hpp"
#include "monoidx/index.hpp"
#include "monoidx/parallel.hpp"
#include "monoidx/series.hpp"
#include "monoidx/smoothing.hpp"
#include "monoidx/studies.hpp"
#include "monoidx/synth.hpp"
#include "monoidx/version.hpp"

namespace monoidx {

namespace cli_detail {

using json = nlohmann::ordered_json;

// Flag wins over the MONOIDX_SEED environment variable; absent both, 0.
inline std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
    if (flag_given) return flag_value;
    const char* env = std::getenv("MONOIDX_SEED");
    if (env == nullptr) return 0;
    std::uint64_t value = 0;
    const char* last = env + std::string_view(env).size();
    auto [ptr, ec] = std::from_chars(env, last, value);
    if (ec != std::errc() || ptr != last)
        throw ConfigError("MONOIDX_SEED must be an unsigned integer");
    return value;
}

inline json envelope(const std::string& command, json inputs, json seed, json result) {
    json env;
    env["command"] = command;
    env["inputs"] = std::move(inputs);
    env["seed"] = std::move(seed);
    env["version"] = version;
    env["result"] = std::move(result);
    return env;
}

inline json to_json(const IndexValue& v) {
    return json{{"value", v.value},
                {"numerator", v.numerator},
                {"denominator", v.denominator}};
}

inline json to_json(const GroupingPlan& p) {
    return json{{"alpha", p.alpha},
                {"n", p.n},
                {"num_groups", p.num_groups},
                {"group_size", p.group_size},
                {"dropped", p.dropped}};
}

inline json to_json(const CvReport& r) {
    return json{{"grid", r.grid.values}, {"mean_errors", r.mean_errors},
                {"b_cv", r.b_cv},        {"alpha_cv", r.alpha_cv},
                {"folds", r.folds},      {"repeats", r.repeats},
                {"n", r.n}};
}

inline json to_json(const BootstrapReport& r) {
    return json{{"point_estimate", r.point_estimate},
                {"replicates", r.replicates},
                {"subsample_size", r.subsample_size},
                {"standard_deviation", r.standard_deviation},
                {"ci_low", r.ci_low},
                {"ci_high", r.ci_high},
                {"distribution", r.distribution}};
}

inline json parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

template <typename T>
T config_get(const json& cfg, const char* key) {
    try {
        return cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("study config: missing or invalid '") + key + "'");
    }
}

template <typename T>
T config_get(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    return config_get<T>(cfg, key);
}

template <typename RowRange, typename Writer>
std::string write_study_csv(const std::string& prefix, const char* suffix,
                            const RowRange& rows, Writer writer) {
    const std::string path = prefix + suffix;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    writer(out, rows);
    if (!out.good()) throw ParseError("cannot write " + path);
    return path;
}

inline json run_study_surface(const json& cfg) {
    StudyConfig sc;
    sc.functions = config_get<std::vector<std::string>>(cfg, "functions");
    sc.n_grid = config_get<std::vector<std::size_t>>(cfg, "n_grid");
    sc.alpha_grid = config_get<std::vector<double>>(cfg, "alpha_grid");
    sc.sigma = config_get<double>(cfg, "sigma", 1.0);
    sc.seeds = config_get<std::vector<std::uint64_t>>(cfg, "seeds");
    sc.output_prefix = config_get<std::string>(cfg, "output");
    const std::vector<SurfaceRow> rows = surface_study(sc);
    const std::string path = write_study_csv(sc.output_prefix, "surface.csv", rows,
                                             [](std::ostream& o, const auto& r) {
                                                 write_surface_csv(o, r);
                                             });
    return json{{"path", path}, {"row_count", rows.size()}};
}

inline json run_study_trace(const json& cfg) {
    const std::string fn = config_get<std::string>(cfg, "fn");
    const double alpha = config_get<double>(cfg, "alpha");
    const double sigma = config_get<double>(cfg, "sigma", 1.0);
    const auto n_grid = config_get<std::vector<std::size_t>>(cfg, "n_grid");
    const auto seeds = config_get<std::vector<std::uint64_t>>(cfg, "seeds");
    const std::string prefix = config_get<std::string>(cfg, "output");
    const std::vector<TraceRow> rows = convergence_trace(fn, alpha, sigma, n_grid, seeds);
    const std::string path = write_study_csv(prefix, "trace.csv", rows,
                                             [](std::ostream& o, const auto& r) {
                                                 write_trace_csv(o, r);
                                             });
    json out_rows = json::array();
    for (const TraceRow& r : rows)
        out_rows.push_back(json{{"n", r.n}, {"median_abs_error", r.median_abs_error}});
    json rate;  // null when too few informative rows
    try {
        rate = rate_estimate(rows);
    } catch (const InsufficientTrace&) {
    }
    return json{{"path", path}, {"rows", out_rows}, {"rate", rate}};
}

inline json run_study_table(const json& cfg, json& seed_echo) {
    const auto fns = config_get<std::vector<std::string>>(cfg, "functions");
    const auto alphas = config_get<std::vector<double>>(cfg, "alphas");
    const double sigma = config_get<double>(cfg, "sigma", 1.0);
    const auto n = config_get<std::size_t>(cfg, "n");
    const auto B = config_get<std::size_t>(cfg, "replicates", std::size_t{1000});
    const auto seed = config_get<std::uint64_t>(cfg, "seed", std::uint64_t{0});
    const std::string prefix = config_get<std::string>(cfg, "output");
    seed_echo = seed;
    const std::vector<TableRow> rows = table_report(fns, alphas, sigma, n, B, seed);
    const std::string path = write_study_csv(prefix, "table.csv", rows,
                                             [](std::ostream& o, const auto& r) {
                                                 write_table_csv(o, r);
                                             });
    json out_rows = json::array();
    for (const TableRow& r : rows)
        out_rows.push_back(json{{"fn", std::string(r.fn)},
                                {"true_value", r.true_value},
                                {"alpha", r.alpha},
                                {"point", r.point},
                                {"sd", r.sd},
                                {"ci_low", r.ci_low},
                                {"ci_high", r.ci_high}});
    return json{{"path", path}, {"rows", out_rows}};
}

}  // namespace cli_detail

// Full command-line driver. Returns the process exit code: 0 on success,
// 2 on usage errors, 1 on data or estimation errors (reported as JSON with
// the error kind so scripts can branch on it).
inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
    using cli_detail::json;

    CLI::App app{"index-of-increase estimation toolkit"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = all hardware threads)");

    std::string gen_fn;
    std::size_t gen_n = 0;
    double gen_sigma = 1.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    CLI::App* gen = app.add_subcommand(
        "generate", "sample a bank function on a uniform grid and add Gaussian noise");
    gen->add_option("--fn", gen_fn, "function id (h1..h8)")->required();
    gen->add_option("--n", gen_n, "number of samples")->required();
    gen->add_option("--sigma", gen_sigma, "noise standard deviation (default 1)");
    CLI::Option* gen_seed_opt = gen->add_option("--seed", gen_seed, "noise seed");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    std::string index_in;
    CLI::App* index_cmd = app.add_subcommand("index", "raw index of increase of a CSV series");
    index_cmd->add_option("--in", index_in, "input CSV path")->required();

    double gindex_alpha = 0.0;
    std::string gindex_in;
    CLI::App* gindex = app.add_subcommand(
        "gindex", "group-and-average index of increase of a CSV series");
    gindex->add_option("--alpha", gindex_alpha, "grouping exponent in (0,1)")->required();
    gindex->add_option("--in", gindex_in, "input CSV path")->required();

    std::string cv_in;
    std::string cv_fn;
    std::size_t cv_n = 0;
    double cv_sigma = 1.0;
    std::size_t cv_folds = 5;
    std::size_t cv_repeats = 50;
    std::size_t cv_grid_size = 30;
    std::uint64_t cv_seed = 0;
    CLI::App* cv = app.add_subcommand(
        "cv", "cross-validated bandwidth and grouping exponent selection");
    CLI::Option* cv_in_opt = cv->add_option("--in", cv_in, "input CSV path");
    CLI::Option* cv_fn_opt =
        cv->add_option("--fn", cv_fn, "function id for synthetic repeats");
    CLI::Option* cv_n_opt = cv->add_option("--n", cv_n, "samples per synthetic repeat");
    CLI::Option* cv_sigma_opt =
        cv->add_option("--sigma", cv_sigma, "noise standard deviation (default 1)");
    cv->add_option("--folds", cv_folds, "cross-validation folds (default 5)");
    cv->add_option("--repeats", cv_repeats, "independent repeats (default 50)");
    cv->add_option("--grid-size", cv_grid_size, "bandwidth grid size (default 30)");
    CLI::Option* cv_seed_opt = cv->add_option("--seed", cv_seed, "fold/noise seed");
    cv_in_opt->excludes(cv_fn_opt);
    cv_in_opt->excludes(cv_n_opt);
    cv_in_opt->excludes(cv_sigma_opt);
    cv_fn_opt->needs(cv_n_opt);

    double boot_alpha = 0.0;
    std::size_t boot_B = 1000;
    std::string boot_m = "auto";
    std::string boot_in;
    std::uint64_t boot_seed = 0;
    CLI::App* boot = app.add_subcommand(
        "boot", "m-out-of-n bootstrap confidence interval for the grouped index");
    boot->add_option("--alpha", boot_alpha, "grouping exponent in (0,1)")->required();
    boot->add_option("--replicates", boot_B, "bootstrap replicates (default 1000)");
    boot->add_option("--m", boot_m, "subsample size, 'auto' for 2*sqrt(n) (default)");
    boot->add_option("--in", boot_in, "input CSV path")->required();
    CLI::Option* boot_seed_opt = boot->add_option("--seed", boot_seed, "resampling seed");

    CLI::App* study = app.add_subcommand("study", "batch experiment drivers");
    study->require_subcommand(1);
    std::string study_config;
    CLI::App* study_surface =
        study->add_subcommand("surface", "index over a (fn, n, alpha, seed) grid");
    CLI::App* study_trace =
        study->add_subcommand("trace", "median absolute error against sample size");
    CLI::App* study_table =
        study->add_subcommand("table", "per-function point estimates and intervals");
    for (CLI::App* sub : {study_surface, study_trace, study_table})
        sub->add_option("--config", study_config, "JSON config path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (cv->parsed() && (cv_in_opt->count() > 0) == (cv_fn_opt->count() > 0)) {
        err << "cv: exactly one of --in and --fn is required\n";
        return 2;
    }

    std::size_t boot_m_value = 0;  // 0 = auto
    if (boot->parsed() && boot_m != "auto") {
        const char* first = boot_m.data();
        const char* last = first + boot_m.size();
        auto [ptr, ec] = std::from_chars(first, last, boot_m_value);
        if (ec != std::errc() || ptr != last || boot_m_value == 0) {
            err << "boot: --m takes 'auto' or a positive integer\n";
            return 2;
        }
    }

    set_max_threads(threads);

    std::string command = app.get_subcommands().front()->get_name();
    if (study->parsed())
        command = "study " + study->get_subcommands().front()->get_name();

    try {
        json env;
        if (gen->parsed()) {
            const std::uint64_t seed =
                cli_detail::resolve_seed(gen_seed_opt->count() > 0, gen_seed);
            const SampledSeries series =
                generate_series(get_function(gen_fn), gen_n, NoiseSpec{gen_sigma, seed});
            write_series_file(gen_out, series);
            env = cli_detail::envelope(
                command,
                json{{"fn", gen_fn}, {"n", gen_n}, {"sigma", gen_sigma}, {"out", gen_out}},
                seed, json{{"path", gen_out}, {"n", series.size()}});
        } else if (index_cmd->parsed()) {
            const SampledSeries series = read_series_file(index_in);
            env = cli_detail::envelope(command,
                                       json{{"in", index_in}, {"n", series.size()}},
                                       nullptr, cli_detail::to_json(index_numeric(series)));
        } else if (gindex->parsed()) {
            const SampledSeries series = read_series_file(gindex_in);
            const GroupingPlan plan = plan_groups(series.size(), gindex_alpha);
            json result = cli_detail::to_json(grouped_index(series, gindex_alpha));
            result["plan"] = cli_detail::to_json(plan);
            env = cli_detail::envelope(
                command,
                json{{"alpha", gindex_alpha}, {"in", gindex_in}, {"n", series.size()}},
                nullptr, std::move(result));
        } else if (cv->parsed()) {
            const std::uint64_t seed =
                cli_detail::resolve_seed(cv_seed_opt->count() > 0, cv_seed);
            const BandwidthGrid grid = BandwidthGrid::equidistant(cv_grid_size);
            json inputs{{"folds", cv_folds},
                        {"repeats", cv_repeats},
                        {"grid_size", cv_grid_size}};
            CvReport report;
            if (cv_fn_opt->count() > 0) {
                inputs["fn"] = cv_fn;
                inputs["n"] = cv_n;
                inputs["sigma"] = cv_sigma;
                report = select_bandwidth(get_function(cv_fn), cv_n, cv_sigma, grid,
                                          cv_folds, cv_repeats, seed);
            } else {
                inputs["in"] = cv_in;
                report = select_bandwidth(read_series_file(cv_in), grid, cv_folds,
                                          cv_repeats, seed);
            }
            env = cli_detail::envelope(command, std::move(inputs), seed,
                                       cli_detail::to_json(report));
        } else if (boot->parsed()) {
            const std::uint64_t seed =
                cli_detail::resolve_seed(boot_seed_opt->count() > 0, boot_seed);
            const SampledSeries series = read_series_file(boot_in);
            const BootstrapReport report =
                bootstrap_ci(series, boot_alpha, boot_B, seed, boot_m_value);
            json m_echo;
            if (boot_m == "auto")
                m_echo = "auto";
            else
                m_echo = boot_m_value;
            env = cli_detail::envelope(command,
                                       json{{"alpha", boot_alpha},
                                            {"replicates", boot_B},
                                            {"m", std::move(m_echo)},
                                            {"in", boot_in},
                                            {"n", series.size()}},
                                       seed, cli_detail::to_json(report));
        } else {
            const json cfg = cli_detail::parse_config_file(study_config);
            json seed_echo;  // studies carry their seeds in the config echo
            json result;
            if (study_surface->parsed())
                result = cli_detail::run_study_surface(cfg);
            else if (study_trace->parsed())
                result = cli_detail::run_study_trace(cfg);
            else
                result = cli_detail::run_study_table(cfg, seed_echo);
            env = cli_detail::envelope(command, json{{"config", study_config}, {"values", cfg}},
                                       std::move(seed_echo), std::move(result));
        }
        out << env.dump(2) << '\n';
        return 0;
    } catch (const Error& e) {
        json failure;
        failure["command"] = command;
        failure["error"] = json{{"kind", e.kind()}, {"message", e.what()}};
        failure["version"] = version;
        out << failure.dump(2) << '\n';
        return 1;
    }
}

}  // namespace monoidx
