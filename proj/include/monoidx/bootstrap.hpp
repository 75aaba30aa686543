#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "monoidx/errors.hpp"
#include "monoidx/grouping.hpp"
#include "monoidx/index.hpp"
#include "monoidx/numeric.hpp"
#include "monoidx/parallel.hpp"
#include "monoidx/rng.hpp"
#include "monoidx/series.hpp"

namespace monoidx {

struct BootstrapReport {
    double point_estimate;          // grouped index of the full series
    std::size_t replicates;         // B
    std::size_t subsample_size;     // m
    double standard_deviation;      // sample sd of the replicate distribution
    double ci_low;                  // 2.5% quantile of the distribution
    double ci_high;                 // 97.5% quantile
    std::vector<double> distribution;  // all B replicate values, replicate order
};

// Rule-of-thumb subsample size: about 2*sqrt(n), kept within [8, n].
inline std::size_t subsample_size(std::size_t n) {
    if (n < 16) throw TooFewPoints("bootstrap needs at least 16 samples");
    const auto m = static_cast<std::size_t>(
        std::llround(2.0 * std::sqrt(static_cast<double>(n))));
    return std::clamp<std::size_t>(m, 8, n);
}

namespace detail {

// One replicate: m pairs drawn uniformly with replacement, reordered by time
// (ties broken by value so the draw order cannot leak in), then grouped with
// the group count recomputed from m under the same alpha and reduced to an
// index. Throws DegenerateSeries when every group mean coincides.
inline double bootstrap_replicate(const SampledSeries& s, const GroupingPlan& plan,
                                  std::size_t m, std::uint64_t draw_key) {
    SplitMix64 rng(draw_key);
    std::vector<std::pair<double, double>> pairs(m);
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = static_cast<std::size_t>(rng.next_below(n));
        pairs[i] = {s.t[j], s.y[j]};
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<double> means(plan.num_groups);
    const auto size = static_cast<double>(plan.group_size);
    for (std::size_t g = 0; g < plan.num_groups; ++g) {
        const std::size_t begin = g * plan.group_size;
        means[g] = pairwise_sum(plan.group_size, [&](std::size_t i) {
                       return pairs[begin + i].second;
                   }) / size;
    }
    return index_of_values(means).value;
}

}  // namespace detail

// m-out-of-n bootstrap of the grouped index. Each replicate is keyed by
// (seed, replicate, attempt), so the distribution is a pure function of the
// inputs no matter how many workers run. Degenerate replicates are redrawn
// under fresh attempt keys; a replicate that stays degenerate counts against
// the 1% budget, beyond which the data is deemed too flat to resample.
// Passing m = 0 selects the rule-of-thumb subsample size.
inline BootstrapReport bootstrap_ci(const SampledSeries& series, double alpha,
                                    std::size_t B = 1000, std::uint64_t seed = 0,
                                    std::size_t m = 0) {
    const std::size_t n = series.size();
    if (n < 16) throw TooFewPoints("bootstrap needs at least 16 samples");
    if (B < 1) throw ConfigError("need at least one replicate");
    if (m == 0) m = subsample_size(n);
    if (m < 4) throw TooFewPoints("subsample size must be at least 4");
    if (m > n) throw ConfigError("subsample size cannot exceed the series length");

    const double point = grouped_index(series, alpha).value;
    const GroupingPlan replicate_plan = plan_groups(m, alpha);

    constexpr std::size_t first_pass_attempts = 101;
    constexpr std::size_t final_pass_attempts = 10101;

    std::vector<double> distribution(B);
    std::vector<unsigned char> unfilled(B, 0);
    auto run_replicate = [&](std::size_t r, std::size_t max_attempts) {
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            const std::uint64_t key =
                derive_key(derive_key(seed, stream::resample, r),
                           stream::resample_retry, attempt);
            try {
                distribution[r] =
                    detail::bootstrap_replicate(series, replicate_plan, m, key);
                unfilled[r] = 0;
                return;
            } catch (const DegenerateSeries&) {
            }
        }
        unfilled[r] = 1;
    };

    parallel_for(B, [&](std::size_t r) { run_replicate(r, first_pass_attempts); });

    std::size_t stuck = 0;
    for (const unsigned char u : unfilled) stuck += u;
    if (stuck > 0) {
        if (stuck * 100 > B)
            throw ResampleExhausted(
                "more than 1% of replicates degenerate after retries");
        // The few stubborn slots get a deeper retry budget; the distribution
        // must come back with exactly B entries or not at all.
        for (std::size_t r = 0; r < B; ++r)
            if (unfilled[r]) run_replicate(r, final_pass_attempts);
        for (const unsigned char u : unfilled)
            if (u)
                throw ResampleExhausted(
                    "replicates still degenerate after extended retries");
    }

    std::vector<double> sorted = distribution;
    std::sort(sorted.begin(), sorted.end());
    return BootstrapReport{point,
                           B,
                           m,
                           sample_sd(distribution),
                           quantile_sorted(sorted, 0.025),
                           quantile_sorted(sorted, 0.975),
                           std::move(distribution)};
}

}  // namespace monoidx
