#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <monoidx/bootstrap.hpp>
#include <monoidx/grouping.hpp>
#include <monoidx/studies.hpp>
#include <monoidx/synth.hpp>

using Catch::Matchers::WithinAbs;
using monoidx::StudyConfig;

TEST_CASE("a single surface cell") {
    StudyConfig cfg;
    cfg.functions = {"h3"};
    cfg.n_grid = {500};
    cfg.alpha_grid = {0.3};
    cfg.sigma = 1.0;
    cfg.seeds = {42};
    const std::vector<monoidx::SurfaceRow> rows = monoidx::surface_study(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fn == "h3");
    CHECK(rows[0].n == 500);
    CHECK(rows[0].alpha == 0.3);
    CHECK(rows[0].seed == 42);

    const monoidx::SampledSeries series = monoidx::generate_series(
        monoidx::get_function("h3"), 500, {1.0, 42});
    CHECK(rows[0].index == monoidx::grouped_index(series, 0.3).value);
}

TEST_CASE("surface rows come out in loop order") {
    StudyConfig cfg;
    cfg.functions = {"h1", "h2"};
    cfg.n_grid = {100, 200};
    cfg.alpha_grid = {0.3, 0.5};
    cfg.sigma = 0.5;
    cfg.seeds = {1, 2};
    const std::vector<monoidx::SurfaceRow> rows = monoidx::surface_study(cfg);
    REQUIRE(rows.size() == 16);

    std::size_t i = 0;
    for (const std::string& fn : cfg.functions)
        for (const std::size_t n : cfg.n_grid)
            for (const double alpha : cfg.alpha_grid)
                for (const std::uint64_t seed : cfg.seeds) {
                    CHECK(rows[i].fn == fn);
                    CHECK(rows[i].n == n);
                    CHECK(rows[i].alpha == alpha);
                    CHECK(rows[i].seed == seed);
                    ++i;
                }

    // same cell inputs, same value, regardless of which pass computed it
    const std::vector<monoidx::SurfaceRow> again = monoidx::surface_study(cfg);
    for (std::size_t r = 0; r < rows.size(); ++r)
        CHECK(rows[r].index == again[r].index);

    std::ostringstream a;
    std::ostringstream b;
    monoidx::write_surface_csv(a, rows);
    monoidx::write_surface_csv(b, again);
    CHECK(a.str() == b.str());
    CHECK(a.str().substr(0, 22) == "fn,n,alpha,seed,index\n");
}

TEST_CASE("surface cardinality follows the grids") {
    StudyConfig cfg;
    cfg.functions = {"h1", "h5", "h8"};
    cfg.n_grid = {64, 128};
    cfg.alpha_grid = {0.2, 0.4};
    cfg.seeds = {1, 2, 3, 4, 5};
    CHECK(monoidx::surface_study(cfg).size() == 60);
}

TEST_CASE("well-tuned cells recover the index, oversized alpha dilutes it") {
    StudyConfig tuned;
    tuned.functions = {"h3"};
    tuned.n_grid = {20000};
    tuned.alpha_grid = {0.2};
    tuned.seeds = {7};
    CHECK(monoidx::surface_study(tuned)[0].index >= 0.95);

    StudyConfig diluted;
    diluted.functions = {"h3"};
    diluted.n_grid = {10000};
    diluted.alpha_grid = {0.9};
    diluted.seeds = {1, 2, 3};
    for (const monoidx::SurfaceRow& row : monoidx::surface_study(diluted)) {
        CHECK(row.index >= 0.45);
        CHECK(row.index <= 0.55);
    }
}

TEST_CASE("surface configuration validation") {
    StudyConfig cfg;
    cfg.functions = {"h1"};
    cfg.n_grid = {100};
    cfg.alpha_grid = {0.3};
    cfg.seeds = {1};

    StudyConfig bad = cfg;
    bad.functions.clear();
    CHECK_THROWS_AS(monoidx::surface_study(bad), monoidx::ConfigError);
    bad = cfg;
    bad.n_grid.clear();
    CHECK_THROWS_AS(monoidx::surface_study(bad), monoidx::ConfigError);
    bad = cfg;
    bad.alpha_grid = {1.2};
    CHECK_THROWS_AS(monoidx::surface_study(bad), monoidx::InvalidAlpha);
    bad = cfg;
    bad.functions = {"h9"};
    CHECK_THROWS_AS(monoidx::surface_study(bad), monoidx::UnknownFunction);
}

TEST_CASE("a noise-free trace with singleton groups is already converged") {
    const std::vector<std::size_t> ns{10000};
    const std::vector<std::uint64_t> seeds{1};
    const std::vector<monoidx::TraceRow> rows =
        monoidx::convergence_trace("h1", 0.9999999999999999, 0.0, ns, seeds);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 10000);
    CHECK(rows[0].median_abs_error <= 5e-4);
}

TEST_CASE("traced error does not grow with n") {
    const std::vector<std::size_t> ns{1000, 10000};
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    const std::vector<monoidx::TraceRow> rows =
        monoidx::convergence_trace("h4", 0.19, 1.0, ns, seeds);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].median_abs_error <= rows[0].median_abs_error + 0.01);
    CHECK(rows[1].median_abs_error <= 0.05);
}

TEST_CASE("trace validation") {
    const std::vector<std::size_t> ns{100};
    const std::vector<std::uint64_t> seeds{1};
    const std::vector<std::size_t> empty_ns;
    const std::vector<std::uint64_t> empty_seeds;
    CHECK_THROWS_AS(monoidx::convergence_trace("h1", 0.3, 1.0, empty_ns, seeds),
                    monoidx::ConfigError);
    CHECK_THROWS_AS(monoidx::convergence_trace("h1", 0.3, 1.0, ns, empty_seeds),
                    monoidx::ConfigError);
    CHECK_THROWS_AS(monoidx::convergence_trace("h1", 1.5, 1.0, ns, seeds),
                    monoidx::InvalidAlpha);
    CHECK_THROWS_AS(monoidx::convergence_trace("h9", 0.3, 1.0, ns, seeds),
                    monoidx::UnknownFunction);
}

TEST_CASE("rate fitting on synthetic traces") {
    std::vector<monoidx::TraceRow> power;
    for (const std::size_t n : {100, 1000, 10000, 100000})
        power.push_back({static_cast<std::size_t>(n),
                         std::exp(std::log(3.0) - 0.2 * std::log(static_cast<double>(n)))});
    CHECK_THAT(monoidx::rate_estimate(power), WithinAbs(-0.2, 1e-12));

    std::vector<monoidx::TraceRow> flat;
    for (const std::size_t n : {100, 1000, 10000})
        flat.push_back({static_cast<std::size_t>(n), 0.1});
    CHECK_THAT(monoidx::rate_estimate(flat), WithinAbs(0.0, 1e-12));

    std::vector<monoidx::TraceRow> zeros{{100, 0.0}, {1000, 0.02}, {10000, 0.01}};
    CHECK_THROWS_AS(monoidx::rate_estimate(zeros), monoidx::InsufficientTrace);
    std::vector<monoidx::TraceRow> two{{100, 0.2}, {1000, 0.1}};
    CHECK_THROWS_AS(monoidx::rate_estimate(two), monoidx::InsufficientTrace);
}

TEST_CASE("table rows pin their seeding to the master seed") {
    const std::vector<std::string> fns{"h6"};
    const std::vector<double> alphas{0.3};
    const std::vector<monoidx::TableRow> rows =
        monoidx::table_report(fns, alphas, 1.0, 1024, 100, 3);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fn == "h6");
    CHECK(rows[0].true_value == 0.9799);
    CHECK(rows[0].alpha == 0.3);

    const monoidx::SampledSeries series = monoidx::generate_series(
        monoidx::get_function("h6"), 1024,
        {1.0, monoidx::derive_key(3, monoidx::stream::table, 0)});
    const monoidx::BootstrapReport boot = monoidx::bootstrap_ci(
        series, 0.3, 100, monoidx::derive_key(3, monoidx::stream::table_boot, 0));
    CHECK(rows[0].point == boot.point_estimate);
    CHECK(rows[0].sd == boot.standard_deviation);
    CHECK(rows[0].ci_low == boot.ci_low);
    CHECK(rows[0].ci_high == boot.ci_high);
}

TEST_CASE("a flat-mean target stays near one half under noise") {
    const std::vector<std::string> fns{"h8"};
    const std::vector<double> alphas{0.34};
    const std::vector<monoidx::TableRow> rows =
        monoidx::table_report(fns, alphas, 1.0, 10000, 300, 1);
    REQUIRE(rows.size() == 1);
    CHECK_THAT(rows[0].point, WithinAbs(0.5, 0.15));
    CHECK(rows[0].ci_low >= 0.0);
    CHECK(rows[0].ci_high <= 1.0);
}

TEST_CASE("a noise-free table reproduces the references") {
    const std::vector<std::string> fns{"h5", "h6", "h7", "h8"};
    const std::vector<double> alphas(4, 0.849485);
    const std::vector<monoidx::TableRow> rows =
        monoidx::table_report(fns, alphas, 0.0, 10000, 200, 2);
    REQUIRE(rows.size() == 4);
    for (const monoidx::TableRow& row : rows) {
        CAPTURE(row.fn);
        CHECK_THAT(row.point, WithinAbs(row.true_value, 1e-3));
        CHECK(row.sd <= 0.05);
    }
}

TEST_CASE("table validation") {
    const std::vector<std::string> fns{"h1", "h2"};
    const std::vector<double> one_alpha{0.3};
    CHECK_THROWS_AS(monoidx::table_report(fns, one_alpha, 1.0, 1024, 10, 1),
                    monoidx::ConfigError);
    const std::vector<std::string> none;
    const std::vector<double> no_alpha;
    CHECK_THROWS_AS(monoidx::table_report(none, no_alpha, 1.0, 1024, 10, 1),
                    monoidx::ConfigError);
}

TEST_CASE("csv writers emit fixed headers and one line per row") {
    std::ostringstream trace_out;
    const std::vector<monoidx::TraceRow> trace{{100, 0.25}, {1000, 0.125}};
    monoidx::write_trace_csv(trace_out, trace);
    CHECK(trace_out.str() == "n,median_abs_error\n100,0.25\n1000,0.125\n");

    std::ostringstream table_out;
    const std::vector<monoidx::TableRow> table{
        {"h1", 0.6667, 0.28, 0.5, 0.125, 0.25, 0.75}};
    monoidx::write_table_csv(table_out, table);
    CHECK(table_out.str() ==
          "fn,true_value,alpha,point,sd,ci_low,ci_high\n"
          "h1,0.6667,0.28,0.5,0.125,0.25,0.75\n");
}
