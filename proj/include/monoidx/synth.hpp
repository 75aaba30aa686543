#pragma once

#include <cstdint>

#include "monoidx/errors.hpp"
#include "monoidx/functions.hpp"
#include "monoidx/parallel.hpp"
#include "monoidx/rng.hpp"
#include "monoidx/series.hpp"

namespace monoidx {

struct NoiseSpec {
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

// Observations y_i = h(t_i) + sigma * z_i on the canonical grid. Each z_i is
// a pure function of (seed, i), so the output is bit-identical regardless of
// how many threads fill the vector. sigma = 0 returns the noise-free samples
// exactly.
inline SampledSeries generate_series(const FunctionSpec& spec, std::size_t n,
                                     const NoiseSpec& noise) {
    if (!(noise.sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
    SampledSeries s = sample_on_grid(spec, n);
    if (noise.sigma == 0.0) return s;
    const std::uint64_t key = derive_key(noise.seed, stream::noise);
    double* y = s.y.data();
    const double sigma = noise.sigma;
    parallel_for(n, [y, key, sigma](std::size_t i) {
        y[i] += sigma * standard_normal(key, i);
    });
    return s;
}

}  // namespace monoidx
