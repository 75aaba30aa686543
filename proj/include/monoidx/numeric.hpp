#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace monoidx {

namespace detail {

template <class TermFn>
double pairwise_sum_range(std::size_t begin, std::size_t end, TermFn& term) {
    constexpr std::size_t leaf = 64;
    if (end - begin <= leaf) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum_range(begin, mid, term) + pairwise_sum_range(mid, end, term);
}

}  // namespace detail

// Pairwise (tree) summation: rounding error grows like log n instead of n.
// Terms are produced by index so callers can sum transformed sequences
// without materializing them.
template <class TermFn>
double pairwise_sum(std::size_t count, TermFn term) {
    return detail::pairwise_sum_range(0, count, term);
}

inline double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum(xs.size(), [&](std::size_t i) { return xs[i]; });
}

inline double mean(std::span<const double> xs) {
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
inline double sample_sd(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    const double ss = pairwise_sum(n, [&](std::size_t i) {
        const double d = xs[i] - m;
        return d * d;
    });
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Quantile by linear interpolation between order statistics: with n sorted
// values, the p-quantile sits at 1-based position 1 + (n-1)p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, 0.5);
}

// Slope of the ordinary least-squares line through (x_i, y_i). Callers must
// pass equally sized spans with at least two distinct x values.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace monoidx
