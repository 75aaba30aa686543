#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "monoidx/errors.hpp"

namespace monoidx {

// A sampled path: strictly increasing design points t inside [0,1], one
// observation y per point, at least two points. Code constructing a series
// by hand is responsible for these invariants; parsed input goes through
// make_series below.
struct SampledSeries {
    std::vector<double> t;
    std::vector<double> y;

    std::size_t size() const noexcept { return t.size(); }
};

inline SampledSeries make_series(std::vector<double> t, std::vector<double> y) {
    if (t.size() != y.size())
        throw InvalidSeries("t and y have different lengths");
    if (t.size() < 2)
        throw InvalidSeries("a series needs at least two points");
    if (!(t.front() >= 0.0) || !(t.back() <= 1.0))
        throw InvalidSeries("t values must lie in [0,1]");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw InvalidSeries("t values must be strictly increasing");
    for (const double v : y)
        if (!std::isfinite(v)) throw InvalidSeries("y values must be finite");
    return SampledSeries{std::move(t), std::move(y)};
}

}  // namespace monoidx
