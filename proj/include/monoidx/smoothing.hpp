#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "monoidx/errors.hpp"
#include "monoidx/functions.hpp"
#include "monoidx/numeric.hpp"
#include "monoidx/parallel.hpp"
#include "monoidx/rng.hpp"
#include "monoidx/series.hpp"
#include "monoidx/synth.hpp"

namespace monoidx {

// Gaussian kernel scale per unit bandwidth: puts the kernel's quartiles at
// +-0.25*bandwidth (0.25 divided by the normal 75% point), the convention
// classical kernel smoothers attach to their bandwidth argument.
inline constexpr double kernel_scale_per_bandwidth = 0.3706506;

struct BandwidthGrid {
    std::vector<double> values;  // strictly increasing, all inside (0,1)

    // `count` equidistant bandwidths spanning [0.01, 0.99].
    static BandwidthGrid equidistant(std::size_t count = 30) {
        if (count < 2)
            throw InvalidBandwidth("a bandwidth grid needs at least two points");
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = 0.01 + static_cast<double>(i) * (0.99 - 0.01) /
                              static_cast<double>(count - 1);
        return BandwidthGrid{std::move(v)};
    }
};

struct CvReport {
    BandwidthGrid grid;
    std::vector<double> mean_errors;  // per grid value, averaged over repeats
    double b_cv;
    double alpha_cv;
    std::size_t folds;
    std::size_t repeats;
    std::size_t n;
};

// Bandwidths translate to grouping parameters through b ~ n^-alpha.
inline double alpha_from_bandwidth(double b_cv, std::size_t n) {
    if (!(b_cv > 0.0 && b_cv < 1.0))
        throw InvalidBandwidth("bandwidth must lie in (0,1)");
    if (n < 2) throw TooFewPoints("need at least two samples");
    return std::log(1.0 / b_cv) / std::log(static_cast<double>(n));
}

namespace detail {

// Distance beyond which exp(-(r/scale)^2 / 2) underflows to exactly zero.
inline double kernel_reach(double scale) { return 38.7 * scale; }

// Index of the training point closest to x; ties go to the smaller t.
inline std::size_t nearest_index(std::span<const double> t, double x) {
    const auto it = std::lower_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return 0;
    if (it == t.end()) return t.size() - 1;
    const auto right = static_cast<std::size_t>(it - t.begin());
    const std::size_t left = right - 1;
    return x - t[left] <= t[right] - x ? left : right;
}

struct WeightedMean {
    double value;
    bool has_mass;
};

inline WeightedMean nw_point(std::span<const double> t, std::span<const double> y,
                             double x, double scale) {
    const double reach = kernel_reach(scale);
    const auto first = std::lower_bound(t.begin(), t.end(), x - reach);
    const auto last = std::upper_bound(first, t.end(), x + reach);
    // Accumulating deviations from a nearby value keeps the weighted mean of
    // a constant series exactly constant.
    const double ref = y[nearest_index(t, x)];
    double num = 0.0;
    double den = 0.0;
    for (auto it = first; it != last; ++it) {
        const auto i = static_cast<std::size_t>(it - t.begin());
        const double z = (x - t[i]) / scale;
        const double w = std::exp(-0.5 * z * z);
        num += w * (y[i] - ref);
        den += w;
    }
    if (den == 0.0) return {0.0, false};
    return {ref + num / den, true};
}

}  // namespace detail

// Locally weighted mean with Gaussian weights. An evaluation point whose
// weight mass underflows to zero takes the nearest training point's value
// instead, so downstream error averages keep every point.
inline std::vector<double> kernel_smooth(std::span<const double> train_t,
                                         std::span<const double> train_y,
                                         std::span<const double> eval_points,
                                         double bandwidth) {
    if (!(bandwidth > 0.0)) throw InvalidBandwidth("bandwidth must be positive");
    if (train_t.empty() || train_t.size() != train_y.size())
        throw TooFewPoints("smoother needs a non-empty training set");
    const double scale = kernel_scale_per_bandwidth * bandwidth;
    std::vector<double> out(eval_points.size());
    for (std::size_t q = 0; q < eval_points.size(); ++q) {
        const double x = eval_points[q];
        const detail::WeightedMean wm = detail::nw_point(train_t, train_y, x, scale);
        out[q] = wm.has_mass ? wm.value
                             : train_y[detail::nearest_index(train_t, x)];
    }
    return out;
}

inline std::vector<double> kernel_smooth(const SampledSeries& train,
                                         std::span<const double> eval_points,
                                         double bandwidth) {
    return kernel_smooth(train.t, train.y, eval_points, bandwidth);
}

// Strict single-point variant: an underflowed weight mass raises ZeroMass
// instead of falling back.
inline double kernel_smooth_at(std::span<const double> train_t,
                               std::span<const double> train_y, double x,
                               double bandwidth) {
    if (!(bandwidth > 0.0)) throw InvalidBandwidth("bandwidth must be positive");
    if (train_t.empty() || train_t.size() != train_y.size())
        throw TooFewPoints("smoother needs a non-empty training set");
    const double scale = kernel_scale_per_bandwidth * bandwidth;
    const detail::WeightedMean wm = detail::nw_point(train_t, train_y, x, scale);
    if (!wm.has_mass)
        throw ZeroMass("kernel mass underflowed to zero at the evaluation point");
    return wm.value;
}

namespace detail {

// Random near-equal fold labels: a shuffled permutation cut into `folds`
// contiguous blocks, so fold sizes differ by at most one.
inline std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds,
                                             std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    SplitMix64 rng(derive_key(seed, stream::folds));
    shuffle(perm, rng);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t begin = f * n / folds;
        const std::size_t end = (f + 1) * n / folds;
        for (std::size_t p = begin; p < end; ++p) fold_of[perm[p]] = f;
    }
    return fold_of;
}

inline bool is_canonical_grid(std::span<const double> t) {
    const std::size_t n = t.size();
    if (n < 2) return false;
    const auto last = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (t[i] != static_cast<double>(i) / last) return false;
    return true;
}

// Iterative radix-2 FFT over a power-of-two length with precomputed
// twiddles. Hand-rolled so convolution output is reproducible to the bit
// across runs and platforms; speed is adequate for the sizes used here.
class Fft {
public:
    explicit Fft(std::size_t length) : length_(length), rev_(length) {
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < length_) ++log2n;
        for (std::size_t i = 0; i < length_; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                r |= ((i >> b) & std::size_t{1}) << (log2n - 1 - b);
            rev_[i] = r;
        }
        twiddle_.resize(length_ / 2);
        for (std::size_t k = 0; k < length_ / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(length_);
            twiddle_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t length() const noexcept { return length_; }

    void forward(std::vector<std::complex<double>>& a) const {
        for (std::size_t i = 0; i < length_; ++i)
            if (rev_[i] > i) std::swap(a[i], a[rev_[i]]);
        for (std::size_t len = 2; len <= length_; len <<= 1) {
            const std::size_t stride = length_ / len;
            for (std::size_t start = 0; start < length_; start += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    const std::complex<double> w = twiddle_[j * stride];
                    std::complex<double>& lo = a[start + j];
                    std::complex<double>& hi = a[start + j + len / 2];
                    const std::complex<double> tw = w * hi;
                    hi = lo - tw;
                    lo += tw;
                }
            }
        }
    }

    void inverse(std::vector<std::complex<double>>& a) const {
        for (auto& v : a) v = std::conj(v);
        forward(a);
        const double scale = 1.0 / static_cast<double>(length_);
        for (auto& v : a) v = std::conj(v) * scale;
    }

private:
    std::size_t length_;
    std::vector<std::size_t> rev_;
    std::vector<std::complex<double>> twiddle_;
};

struct KernelData {
    std::vector<double> taps;                    // K[d] for offsets d = 0..cut
    std::vector<std::complex<double>> spectrum;  // transform of the wrapped kernel
    std::vector<double> full_mass;               // all-points weight sum per position
};

// Fast path for series on the canonical grid: kernel weights depend only on
// the index offset, so Nadaraya-Watson numerators and denominators become
// discrete convolutions. Training sums for a fold are full-series sums minus
// held-out sums, and two real sequences ride each complex transform.
class CanonicalCvEngine {
public:
    explicit CanonicalCvEngine(std::size_t n) : n_(n), fft_(std::bit_ceil(2 * n)) {}

    KernelData kernel_for(double bandwidth) const {
        const double scale = kernel_scale_per_bandwidth * bandwidth;
        const double step = 1.0 / static_cast<double>(n_ - 1);
        std::size_t cut = n_ - 1;
        const double horizon = kernel_reach(scale) / step;
        if (horizon < static_cast<double>(cut))
            cut = static_cast<std::size_t>(horizon);
        std::vector<double> taps(cut + 1);
        for (std::size_t d = 0; d <= cut; ++d) {
            const double z = static_cast<double>(d) * step / scale;
            taps[d] = std::exp(-0.5 * z * z);
        }
        // Running prefix masses give every position's all-points weight sum
        // without any transform roundoff.
        std::vector<double> prefix(cut + 1);
        double run = 0.0;
        for (std::size_t d = 0; d <= cut; ++d) {
            run += taps[d];
            prefix[d] = run;
        }
        std::vector<double> full_mass(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t left = std::min(i, cut);
            const std::size_t right = std::min(n_ - 1 - i, cut);
            full_mass[i] = prefix[left] + prefix[right] - taps[0];
        }
        std::vector<std::complex<double>> spectrum(fft_.length());
        spectrum[0] = taps[0];
        for (std::size_t d = 1; d <= cut; ++d) {
            spectrum[d] = taps[d];
            spectrum[fft_.length() - d] = taps[d];
        }
        fft_.forward(spectrum);
        return KernelData{std::move(taps), std::move(spectrum), std::move(full_mass)};
    }

    // Mean over folds of the held-out MSE for one bandwidth under the given
    // fold labels. Same estimator as the generic path; only the summation
    // route differs.
    double score(std::span<const double> y, const std::vector<std::size_t>& fold_of,
                 std::size_t folds, const KernelData& kern) const {
        const std::size_t L = fft_.length();
        // Sequences to convolve with the kernel: the full y, then per fold
        // the held-out y and the held-out indicator mask.
        const std::size_t seq_count = 2 * folds + 1;
        auto term = [&](std::size_t s, std::size_t i) -> double {
            if (s == 0) return y[i];
            if (s <= folds) return fold_of[i] == s - 1 ? y[i] : 0.0;
            return fold_of[i] == s - folds - 1 ? 1.0 : 0.0;
        };
        std::vector<std::vector<double>> conv(seq_count);
        std::vector<std::complex<double>> buf(L);
        for (std::size_t s = 0; s < seq_count; s += 2) {
            const bool paired = s + 1 < seq_count;
            std::fill(buf.begin(), buf.end(), std::complex<double>{});
            for (std::size_t i = 0; i < n_; ++i)
                buf[i] = {term(s, i), paired ? term(s + 1, i) : 0.0};
            fft_.forward(buf);
            for (std::size_t l = 0; l < L; ++l) buf[l] *= kern.spectrum[l];
            fft_.inverse(buf);
            conv[s].resize(n_);
            for (std::size_t i = 0; i < n_; ++i) conv[s][i] = buf[i].real();
            if (paired) {
                conv[s + 1].resize(n_);
                for (std::size_t i = 0; i < n_; ++i) conv[s + 1][i] = buf[i].imag();
            }
        }
        std::vector<double> fold_mse(folds);
        std::vector<double> sq;
        for (std::size_t f = 0; f < folds; ++f) {
            const std::vector<double>& conv_fold_y = conv[1 + f];
            const std::vector<double>& conv_fold_mask = conv[1 + folds + f];
            sq.clear();
            for (std::size_t i = 0; i < n_; ++i) {
                if (fold_of[i] != f) continue;
                const double den = kern.full_mass[i] - conv_fold_mask[i];
                const double pred =
                    den > mass_floor ? (conv[0][i] - conv_fold_y[i]) / den
                                     : nearest_training_y(y, fold_of, f, i);
                const double e = pred - y[i];
                sq.push_back(e * e);
            }
            fold_mse[f] = mean(sq);
        }
        return mean(fold_mse);
    }

private:
    // Genuine weight masses at grid bandwidths are O(1) or larger; anything
    // this small is transform roundoff sitting on a true underflow, so the
    // point falls back to its nearest training neighbour.
    static constexpr double mass_floor = 1e-6;

    static double nearest_training_y(std::span<const double> y,
                                     const std::vector<std::size_t>& fold_of,
                                     std::size_t f, std::size_t i) {
        for (std::size_t step = 1; step < y.size(); ++step) {
            if (i >= step && fold_of[i - step] != f) return y[i - step];
            if (i + step < y.size() && fold_of[i + step] != f) return y[i + step];
        }
        return y[i];
    }

    std::size_t n_;
    Fft fft_;
};

inline double generic_cv_score(const SampledSeries& series, double bandwidth,
                               std::size_t folds,
                               const std::vector<std::size_t>& fold_of) {
    const std::size_t n = series.size();
    std::vector<double> fold_mse(folds);
    std::vector<double> train_t, train_y, held_x, held_y, sq;
    for (std::size_t f = 0; f < folds; ++f) {
        train_t.clear();
        train_y.clear();
        held_x.clear();
        held_y.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] == f) {
                held_x.push_back(series.t[i]);
                held_y.push_back(series.y[i]);
            } else {
                train_t.push_back(series.t[i]);
                train_y.push_back(series.y[i]);
            }
        }
        const std::vector<double> pred =
            kernel_smooth(train_t, train_y, held_x, bandwidth);
        sq.resize(held_x.size());
        for (std::size_t q = 0; q < held_x.size(); ++q) {
            const double e = pred[q] - held_y[q];
            sq[q] = e * e;
        }
        fold_mse[f] = mean(sq);
    }
    return mean(fold_mse);
}

}  // namespace detail

// One repeated-CV building block: random folds, fit on the rest, mean of the
// per-fold held-out MSEs. The fold partition depends only on (n, folds,
// rng_seed), never on the bandwidth, so a grid of bandwidths scored against
// one seed is compared on identical splits.
inline double cv_score(const SampledSeries& series, double bandwidth,
                       std::size_t folds, std::uint64_t rng_seed) {
    if (!(bandwidth > 0.0)) throw InvalidBandwidth("bandwidth must be positive");
    if (folds < 2) throw TooFewPoints("cross-validation needs at least two folds");
    const std::size_t n = series.size();
    if (n < 2 * folds) throw TooFewPoints("series too short for this fold count");
    const std::vector<std::size_t> fold_of = detail::assign_folds(n, folds, rng_seed);
    if (detail::is_canonical_grid(series.t)) {
        detail::CanonicalCvEngine engine(n);
        return engine.score(series.y, fold_of, folds, engine.kernel_for(bandwidth));
    }
    return detail::generic_cv_score(series, bandwidth, folds, fold_of);
}

namespace detail {

inline CvReport run_cv(const std::vector<const SampledSeries*>& per_repeat,
                       const BandwidthGrid& grid, std::size_t folds,
                       std::size_t repeats, std::uint64_t seed) {
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    if (folds < 2) throw TooFewPoints("cross-validation needs at least two folds");
    if (grid.values.empty()) throw InvalidBandwidth("empty bandwidth grid");
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        if (!(grid.values[i] > 0.0 && grid.values[i] < 1.0))
            throw InvalidBandwidth("grid values must lie in (0,1)");
        if (i > 0 && !(grid.values[i] > grid.values[i - 1]))
            throw InvalidBandwidth("grid values must be strictly increasing");
    }
    const std::size_t n = per_repeat.front()->size();
    if (n < 2 * folds) throw TooFewPoints("series too short for this fold count");

    // One fold split per repeat, shared by every bandwidth. Seeds match what
    // a standalone cv_score call would use, so mean_errors[i] is exactly the
    // average of cv_score(series_r, b_i, folds, derive_key(seed, cv_folds, r)).
    std::vector<std::vector<std::size_t>> fold_of(repeats);
    for (std::size_t r = 0; r < repeats; ++r)
        fold_of[r] = assign_folds(n, folds, derive_key(seed, stream::cv_folds, r));

    bool canonical = true;
    for (const SampledSeries* s : per_repeat)
        canonical = canonical && s->size() == n && is_canonical_grid(s->t);

    std::optional<CanonicalCvEngine> engine;
    if (canonical) engine.emplace(n);

    const std::size_t nb = grid.values.size();
    std::vector<std::vector<double>> scores(nb, std::vector<double>(repeats));
    parallel_for(nb, [&](std::size_t bi) {
        const double b = grid.values[bi];
        if (engine) {
            const KernelData kern = engine->kernel_for(b);
            for (std::size_t r = 0; r < repeats; ++r)
                scores[bi][r] = engine->score(per_repeat[r]->y, fold_of[r], folds, kern);
        } else {
            for (std::size_t r = 0; r < repeats; ++r)
                scores[bi][r] = generic_cv_score(*per_repeat[r], b, folds, fold_of[r]);
        }
    });

    std::vector<double> mean_errors(nb);
    for (std::size_t bi = 0; bi < nb; ++bi) mean_errors[bi] = mean(scores[bi]);
    std::size_t best = 0;
    for (std::size_t bi = 1; bi < nb; ++bi)
        if (mean_errors[bi] < mean_errors[best]) best = bi;  // ties keep smaller b
    const double b_cv = grid.values[best];
    return CvReport{grid,  std::move(mean_errors), b_cv, alpha_from_bandwidth(b_cv, n),
                    folds, repeats,               n};
}

}  // namespace detail

// Synthetic source: a fresh noisy series is generated for every repeat.
inline CvReport select_bandwidth(const FunctionSpec& fn, std::size_t n, double sigma,
                                 const BandwidthGrid& grid, std::size_t folds = 5,
                                 std::size_t repeats = 50, std::uint64_t seed = 0) {
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    std::vector<SampledSeries> storage;
    storage.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r)
        storage.push_back(
            generate_series(fn, n, NoiseSpec{sigma, derive_key(seed, stream::cv_series, r)}));
    std::vector<const SampledSeries*> per_repeat(repeats);
    for (std::size_t r = 0; r < repeats; ++r) per_repeat[r] = &storage[r];
    return detail::run_cv(per_repeat, grid, folds, repeats, seed);
}

// Fixed-data source: the same series is re-split into fresh folds per repeat.
inline CvReport select_bandwidth(const SampledSeries& series, const BandwidthGrid& grid,
                                 std::size_t folds = 5, std::size_t repeats = 50,
                                 std::uint64_t seed = 0) {
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    std::vector<const SampledSeries*> per_repeat(repeats, &series);
    return detail::run_cv(per_repeat, grid, folds, repeats, seed);
}

}  // namespace monoidx
