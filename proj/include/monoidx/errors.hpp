#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace monoidx {

// Base of every library error. `kind` is a stable machine-readable name; the
// CLI copies it verbatim into its JSON error output, so renaming a kind is a
// breaking change.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MONOIDX_ERROR(NAME)                                               \
    class NAME : public Error {                                           \
    public:                                                               \
        explicit NAME(const std::string& what) : Error(#NAME, what) {}    \
    }

MONOIDX_ERROR(DegenerateSeries);   // zero total variation: the index is undefined
MONOIDX_ERROR(InvalidSeries);      // t/y violate the sampled-series invariants
MONOIDX_ERROR(UnknownFunction);    // id outside the built-in bank
MONOIDX_ERROR(InvalidAlpha);       // grouping parameter outside (0,1)
MONOIDX_ERROR(InvalidGamma);       // smoothness exponent outside (0,1]
MONOIDX_ERROR(InvalidGroupSize);   // requested group size outside [2, n/2]
MONOIDX_ERROR(InvalidBandwidth);   // non-positive or out-of-range bandwidth
MONOIDX_ERROR(InvalidResolution);  // quadrature grid too coarse
MONOIDX_ERROR(PlanMismatch);       // grouping plan built for a different length
MONOIDX_ERROR(TooFewPoints);       // series too short for the operation
MONOIDX_ERROR(ZeroMass);           // kernel weights underflowed to zero at a point
MONOIDX_ERROR(ResampleExhausted);  // too many degenerate bootstrap replicates
MONOIDX_ERROR(InsufficientTrace);  // not enough positive errors to fit a rate
MONOIDX_ERROR(ParseError);         // malformed CSV or numeric text
MONOIDX_ERROR(ConfigError);        // inconsistent options or study configuration

#undef MONOIDX_ERROR

}  // namespace monoidx
