#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <monoidx/rng.hpp>
#include <monoidx/series.hpp>

namespace testutil {

// Distance in representable doubles, valid across a sign change.
inline std::uint64_t ulp_distance(double a, double b) {
    auto order = [](double x) {
        const auto u = std::bit_cast<std::uint64_t>(x);
        return (u >> 63) ? ~u : (u | 0x8000000000000000ull);
    };
    const std::uint64_t ka = order(a);
    const std::uint64_t kb = order(b);
    return ka > kb ? ka - kb : kb - ka;
}

inline std::vector<double> canonical_grid(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

// y values are multiples of 2^-10 in [-8, 8]: sums, differences and products
// with small dyadic factors stay exact in double precision.
inline monoidx::SampledSeries dyadic_series(monoidx::SplitMix64& rng, std::size_t n) {
    std::vector<double> y(n);
    for (double& v : y)
        v = (static_cast<double>(rng.next_below(16385)) - 8192.0) / 1024.0;
    return monoidx::make_series(canonical_grid(n), std::move(y));
}

inline monoidx::SampledSeries gaussian_series(monoidx::SplitMix64& rng, std::size_t n) {
    const std::uint64_t key = rng.next();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = monoidx::standard_normal(key, i);
    return monoidx::make_series(canonical_grid(n), std::move(y));
}

// Environment variable that restores the previous value when destroyed.
class ScopedEnv {
  public:
    ScopedEnv(const char* name, const char* value) : name_(name) {
        const char* old = std::getenv(name);
        had_old_ = old != nullptr;
        if (had_old_) old_ = old;
        if (value)
            ::setenv(name, value, 1);
        else
            ::unsetenv(name);
    }
    ~ScopedEnv() {
        if (had_old_)
            ::setenv(name_, old_.c_str(), 1);
        else
            ::unsetenv(name_);
    }
    ScopedEnv(const ScopedEnv&) = delete;
    ScopedEnv& operator=(const ScopedEnv&) = delete;

  private:
    const char* name_;
    bool had_old_ = false;
    std::string old_;
};

}  // namespace testutil
