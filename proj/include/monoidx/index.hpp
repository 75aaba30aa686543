#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "monoidx/errors.hpp"
#include "monoidx/functions.hpp"
#include "monoidx/numeric.hpp"
#include "monoidx/series.hpp"

namespace monoidx {

// The index of increase of a path: the share of its total variation carried
// by rises. 1 means non-decreasing, 0 non-increasing.
struct IndexValue {
    double value;        // numerator / denominator, in [0,1]
    double numerator;    // sum of positive increments
    double denominator;  // total variation of the path
};

struct ProjectionResult {
    std::vector<double> projected;  // nearest non-increasing path
    double distance;                // total-variation distance to it
};

inline std::vector<double> increments(const SampledSeries& s) {
    std::vector<double> d(s.size() - 1);
    for (std::size_t i = 1; i < s.size(); ++i) d[i - 1] = s.y[i] - s.y[i - 1];
    return d;
}

namespace detail {

// Index of the value sequence alone. Both sums run over the same summation
// tree and each numerator term is dominated by its denominator term, so the
// rounded ratio can never exceed 1. Zero increments contribute to neither
// sum; an all-flat sequence leaves the index undefined.
inline IndexValue index_of_values(std::span<const double> y) {
    const std::size_t n = y.size();
    const double num = pairwise_sum(n - 1, [&](std::size_t i) {
        const double d = y[i + 1] - y[i];
        return d > 0.0 ? d : 0.0;
    });
    const double den = pairwise_sum(n - 1, [&](std::size_t i) {
        return std::abs(y[i + 1] - y[i]);
    });
    if (den == 0.0) throw DegenerateSeries("series has zero total variation");
    return IndexValue{num / den, num, den};
}

}  // namespace detail

inline IndexValue index_numeric(const SampledSeries& s) {
    return detail::index_of_values(s.y);
}

// Closest non-increasing path in total variation: keep every fall, flatten
// every rise. The distance to the original is exactly the sum of the
// flattened rises, which matches index_numeric's numerator bit for bit.
inline ProjectionResult monotone_projection(const SampledSeries& s) {
    const std::size_t n = s.size();
    std::vector<double> projected(n);
    projected[0] = s.y[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double d = s.y[i] - s.y[i - 1];
        projected[i] = projected[i - 1] + std::min(d, 0.0);
    }
    const double distance = pairwise_sum(n - 1, [&](std::size_t i) {
        const double d = s.y[i + 1] - s.y[i];
        return d > 0.0 ? d : 0.0;
    });
    return ProjectionResult{std::move(projected), distance};
}

// Index of the underlying function itself, via composite midpoint quadrature
// of the closed-form derivative over `resolution` subintervals of [0,1].
inline IndexValue exact_index(const FunctionSpec& spec, std::size_t resolution) {
    if (resolution < 1000)
        throw InvalidResolution("quadrature needs at least 1000 subintervals");
    const double width = 1.0 / static_cast<double>(resolution);
    const double num = width * pairwise_sum(resolution, [&](std::size_t i) {
        const double g = spec.deriv((static_cast<double>(i) + 0.5) * width);
        return g > 0.0 ? g : 0.0;
    });
    const double den = width * pairwise_sum(resolution, [&](std::size_t i) {
        return std::abs(spec.deriv((static_cast<double>(i) + 0.5) * width));
    });
    if (den == 0.0) throw DegenerateSeries("derivative is zero everywhere");
    return IndexValue{num / den, num, den};
}

}  // namespace monoidx
