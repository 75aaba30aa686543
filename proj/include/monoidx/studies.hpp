#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "monoidx/bootstrap.hpp"
#include "monoidx/csv.hpp"
#include "monoidx/errors.hpp"
#include "monoidx/functions.hpp"
#include "monoidx/grouping.hpp"
#include "monoidx/numeric.hpp"
#include "monoidx/parallel.hpp"
#include "monoidx/rng.hpp"
#include "monoidx/synth.hpp"

namespace monoidx {

struct StudyConfig {
    std::vector<std::string> functions;
    std::vector<std::size_t> n_grid;
    std::vector<double> alpha_grid;
    double sigma = 1.0;
    std::vector<std::uint64_t> seeds;
    std::string output_prefix;
};

struct SurfaceRow {
    std::string_view fn;
    std::size_t n;
    double alpha;
    std::uint64_t seed;
    double index;
};

struct TraceRow {
    std::size_t n;
    double median_abs_error;
};

struct TableRow {
    std::string_view fn;
    double true_value;
    double alpha;
    double point;
    double sd;
    double ci_low;
    double ci_high;
};

namespace detail {

inline void require_alphas(std::span<const double> alphas) {
    for (const double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw InvalidAlpha("alpha must lie in (0,1)");
}

}  // namespace detail

// One grouped-index evaluation per (function, n, alpha, seed) cell, in that
// loop order. Cells sharing (function, n, seed) reuse the same noisy series,
// so alpha columns describe one data set rather than fresh draws.
inline std::vector<SurfaceRow> surface_study(const StudyConfig& cfg) {
    if (cfg.functions.empty() || cfg.n_grid.empty() || cfg.alpha_grid.empty() ||
        cfg.seeds.empty())
        throw ConfigError("surface study needs functions, n_grid, alpha_grid and seeds");
    detail::require_alphas(cfg.alpha_grid);
    for (const std::string& id : cfg.functions) get_function(id);

    const std::size_t cells = cfg.functions.size() * cfg.n_grid.size() *
                              cfg.alpha_grid.size() * cfg.seeds.size();
    std::vector<SurfaceRow> rows(cells);
    const std::size_t per_fn = cfg.n_grid.size() * cfg.alpha_grid.size() * cfg.seeds.size();
    const std::size_t per_n = cfg.alpha_grid.size() * cfg.seeds.size();
    parallel_for(cfg.functions.size() * cfg.n_grid.size(), [&](std::size_t outer) {
        const std::size_t fi = outer / cfg.n_grid.size();
        const std::size_t ni = outer % cfg.n_grid.size();
        const FunctionSpec& fn = get_function(cfg.functions[fi]);
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            const SampledSeries series = generate_series(
                fn, cfg.n_grid[ni], NoiseSpec{cfg.sigma, cfg.seeds[si]});
            for (std::size_t ai = 0; ai < cfg.alpha_grid.size(); ++ai) {
                const double alpha = cfg.alpha_grid[ai];
                rows[fi * per_fn + ni * per_n + ai * cfg.seeds.size() + si] =
                    SurfaceRow{fn.id, cfg.n_grid[ni], alpha, cfg.seeds[si],
                               grouped_index(series, alpha).value};
            }
        }
    });
    return rows;
}

// Median absolute error of the grouped estimator against the function's
// reference index, per sample size.
inline std::vector<TraceRow> convergence_trace(std::string_view fn_id, double alpha,
                                               double sigma,
                                               std::span<const std::size_t> n_grid,
                                               std::span<const std::uint64_t> seeds) {
    if (n_grid.empty() || seeds.empty())
        throw ConfigError("trace needs a non-empty n_grid and seeds");
    detail::require_alphas({&alpha, 1});
    const FunctionSpec& fn = get_function(fn_id);
    std::vector<TraceRow> rows(n_grid.size());
    std::vector<double> errs(seeds.size());
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        parallel_for(seeds.size(), [&](std::size_t si) {
            const SampledSeries series =
                generate_series(fn, n_grid[ni], NoiseSpec{sigma, seeds[si]});
            errs[si] = std::abs(grouped_index(series, alpha).value - fn.reference_index);
        });
        rows[ni] = TraceRow{n_grid[ni], median(errs)};
    }
    return rows;
}

// Least-squares slope of log(error) against log(n). Rows with zero error
// carry no rate information and are skipped; fewer than three of the rest
// leave nothing to regress on.
inline double rate_estimate(std::span<const TraceRow> trace) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (const TraceRow& row : trace) {
        if (!(row.median_abs_error > 0.0)) continue;
        lx.push_back(std::log(static_cast<double>(row.n)));
        ly.push_back(std::log(row.median_abs_error));
    }
    if (lx.size() < 3)
        throw InsufficientTrace("need at least three sample sizes with positive error");
    return ols_slope(lx, ly);
}

// Per-function summary at one sample size: reference value, grouped point
// estimate, and bootstrap spread. Each row draws its own noise and resample
// streams from the master seed.
inline std::vector<TableRow> table_report(std::span<const std::string> fns,
                                          std::span<const double> alphas, double sigma,
                                          std::size_t n, std::size_t B,
                                          std::uint64_t seed) {
    if (fns.empty()) throw ConfigError("table needs at least one function");
    if (fns.size() != alphas.size())
        throw ConfigError("table needs one alpha per function");
    detail::require_alphas(alphas);
    std::vector<TableRow> rows(fns.size());
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const FunctionSpec& fn = get_function(fns[i]);
        const SampledSeries series =
            generate_series(fn, n, NoiseSpec{sigma, derive_key(seed, stream::table, i)});
        const BootstrapReport boot =
            bootstrap_ci(series, alphas[i], B, derive_key(seed, stream::table_boot, i));
        rows[i] = TableRow{fn.id,       fn.reference_index, alphas[i], boot.point_estimate,
                           boot.standard_deviation, boot.ci_low, boot.ci_high};
    }
    return rows;
}

inline void write_surface_csv(std::ostream& out, std::span<const SurfaceRow> rows) {
    std::string text = "fn,n,alpha,seed,index\n";
    for (const SurfaceRow& r : rows) {
        text.append(r.fn);
        text.push_back(',');
        text.append(std::to_string(r.n));
        text.push_back(',');
        append_double(text, r.alpha);
        text.push_back(',');
        text.append(std::to_string(r.seed));
        text.push_back(',');
        append_double(text, r.index);
        text.push_back('\n');
    }
    out << text;
}

inline void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
    std::string text = "n,median_abs_error\n";
    for (const TraceRow& r : rows) {
        text.append(std::to_string(r.n));
        text.push_back(',');
        append_double(text, r.median_abs_error);
        text.push_back('\n');
    }
    out << text;
}

inline void write_table_csv(std::ostream& out, std::span<const TableRow> rows) {
    std::string text = "fn,true_value,alpha,point,sd,ci_low,ci_high\n";
    for (const TableRow& r : rows) {
        text.append(r.fn);
        for (const double v : {r.true_value, r.alpha, r.point, r.sd, r.ci_low, r.ci_high}) {
            text.push_back(',');
            append_double(text, v);
        }
        text.push_back('\n');
    }
    out << text;
}

}  // namespace monoidx
