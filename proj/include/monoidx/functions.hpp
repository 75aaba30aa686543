#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "monoidx/errors.hpp"
#include "monoidx/series.hpp"

namespace monoidx {

// A built-in test function: closed-form value and derivative on [0,1], the
// smoothness exponent of the derivative, and the published four-digit index.
struct FunctionSpec {
    std::string_view id;
    double (*eval)(double);
    double (*deriv)(double);
    double holder_gamma;
    double reference_index;
};

namespace bank {

inline constexpr double pi = std::numbers::pi;

inline double h1(double t) { return std::sin(-pi / 2 + 3 * pi * t / 2); }
inline double dh1(double t) { return 3 * pi / 2 * std::cos(-pi / 2 + 3 * pi * t / 2); }
inline double h2(double t) { return std::cos(-pi / 2 + 3 * pi * t / 2); }
inline double dh2(double t) { return -3 * pi / 2 * std::sin(-pi / 2 + 3 * pi * t / 2); }
inline double h3(double t) { return std::sin(pi * t / 2); }
inline double dh3(double t) { return pi / 2 * std::cos(pi * t / 2); }
inline double h4(double t) { return std::cos(pi * t / 2); }
inline double dh4(double t) { return -pi / 2 * std::sin(pi * t / 2); }
inline double h5(double t) { return (t - 1) * (t - 1) + std::sin(6 * t); }
inline double dh5(double t) { return 2 * (t - 1) + 6 * std::cos(6 * t); }
inline double h6(double t) { return (t - 0.25) * (t - 0.25) + std::sin(0.25 * t); }
inline double dh6(double t) { return 2 * (t - 0.25) + 0.25 * std::cos(0.25 * t); }
inline double h7(double t) { return t * t * t - 5.6 * t * t + 6 * t; }
inline double dh7(double t) { return 3 * t * t - 11.2 * t + 6; }
inline double h8(double t) { return std::sin(2 * pi * t); }
inline double dh8(double t) { return 2 * pi * std::cos(2 * pi * t); }

}  // namespace bank

inline constexpr FunctionSpec function_bank[] = {
    {"h1", &bank::h1, &bank::dh1, 1.0, 0.6667},
    {"h2", &bank::h2, &bank::dh2, 1.0, 0.3333},
    {"h3", &bank::h3, &bank::dh3, 1.0, 1.0000},
    {"h4", &bank::h4, &bank::dh4, 1.0, 0.0000},
    {"h5", &bank::h5, &bank::dh5, 1.0, 0.3311},
    {"h6", &bank::h6, &bank::dh6, 1.0, 0.9799},
    {"h7", &bank::h7, &bank::dh7, 1.0, 0.8157},
    {"h8", &bank::h8, &bank::dh8, 1.0, 0.5000},
};

inline const FunctionSpec& get_function(std::string_view id) {
    for (const FunctionSpec& f : function_bank)
        if (f.id == id) return f;
    throw UnknownFunction("no built-in function named '" + std::string(id) + "'");
}

// Noise-free samples on the canonical grid t_i = i/(n-1).
inline SampledSeries sample_on_grid(const FunctionSpec& spec, std::size_t n) {
    if (n < 2) throw TooFewPoints("need at least two grid points");
    std::vector<double> t(n);
    std::vector<double> y(n);
    const auto last = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i) / last;
        y[i] = spec.eval(t[i]);
    }
    return SampledSeries{std::move(t), std::move(y)};
}

}  // namespace monoidx
