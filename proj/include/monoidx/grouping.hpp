#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "monoidx/errors.hpp"
#include "monoidx/index.hpp"
#include "monoidx/numeric.hpp"
#include "monoidx/series.hpp"

namespace monoidx {

// Contiguous grouping layout: num_groups = max(2, floor(n^alpha)) groups of
// group_size = floor(n / num_groups) consecutive samples each; the tail that
// fits no complete group (always shorter than one group count) is dropped.
struct GroupingPlan {
    double alpha;
    std::size_t n;
    std::size_t num_groups;
    std::size_t group_size;
    std::size_t dropped;
};

// Exponents governing how fast the grouped estimator converges: delta from
// the deterministic part, rho from the noise part, beta their minimum.
struct RateExponents {
    double delta;
    double rho;
    double beta;
};

inline GroupingPlan plan_groups(std::size_t n, double alpha) {
    if (n < 4) throw TooFewPoints("grouping needs at least four samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha("alpha must lie in (0,1)");
    // The nudge keeps pow() from landing a hair under an exact integer power
    // and flooring one too low.
    const double raw = std::pow(static_cast<double>(n), alpha);
    auto groups = static_cast<std::size_t>(std::floor(raw + 1e-9));
    groups = std::clamp<std::size_t>(groups, 2, n);
    const std::size_t size = n / groups;
    return GroupingPlan{alpha, n, groups, size, n - groups * size};
}

// Means of y and of t over each complete group, in time order.
inline SampledSeries group_average(const SampledSeries& s, const GroupingPlan& plan) {
    if (plan.n != s.size())
        throw PlanMismatch("plan was built for a different series length");
    std::vector<double> t(plan.num_groups);
    std::vector<double> y(plan.num_groups);
    const auto size = static_cast<double>(plan.group_size);
    for (std::size_t j = 0; j < plan.num_groups; ++j) {
        const std::size_t begin = j * plan.group_size;
        y[j] = pairwise_sum(plan.group_size,
                            [&](std::size_t i) { return s.y[begin + i]; }) / size;
        t[j] = pairwise_sum(plan.group_size,
                            [&](std::size_t i) { return s.t[begin + i]; }) / size;
    }
    return SampledSeries{std::move(t), std::move(y)};
}

// The grouped estimator: the index of the group-mean path.
inline IndexValue grouped_index(const SampledSeries& s, double alpha) {
    return index_numeric(group_average(s, plan_groups(s.size(), alpha)));
}

// Largest alpha for which both rate exponents stay positive.
inline double alpha_max(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidGamma("gamma must lie in (0,1]");
    return 1.0 / (3.0 + 2.0 * gamma);
}

inline RateExponents rate_exponents(double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha("alpha must lie in (0,1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidGamma("gamma must lie in (0,1]");
    const double delta = alpha * gamma;
    const double rho = (1.0 - 3.0 * alpha) / 2.0;
    return RateExponents{delta, rho, std::min(delta, rho)};
}

// Alpha that produces groups of roughly the requested size.
inline double alpha_for_group_size(std::size_t n, std::size_t group_size) {
    if (group_size < 2 || group_size > n / 2)
        throw InvalidGroupSize("group size must lie in [2, n/2]");
    return 1.0 - std::log(static_cast<double>(group_size)) /
                     std::log(static_cast<double>(n));
}

}  // namespace monoidx
