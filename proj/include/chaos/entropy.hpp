#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chaos/error.hpp"
#include "chaos/timeseries.hpp"

namespace chaos {

/// Template-match counts behind a sample entropy value. `b` counts ordered
/// pairs (i != j) of m-row segments within tolerance, `a` the same for
/// (m+1)-row segments. Both range over the first n - m segment starts.
struct MatchCounts {
    std::uint64_t a = 0;
    std::uint64_t b = 0;

    friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct SampleEntropy {
    double value = 0.0;  // NaN when undefined
    MatchCounts counts;

    bool defined() const noexcept { return counts.a > 0 && counts.b > 0; }
};

/// Largest finite sample entropy a series of `n` rows can produce at
/// embedding `m`: -ln(1 / ((n-m)(n-m-1))). Substituted for undefined scales.
inline double entropy_cap(std::size_t n, std::size_t m) {
    const double t = static_cast<double>(n - m);
    return std::log(t * (t - 1.0));
}

namespace detail {

inline void check_entropy_args(std::size_t n, std::size_t p, std::size_t m) {
    if (m < 1) throw ParameterError("embedding dimension must be >= 1", Stage::entropy);
    if (p < 1) throw ParameterError("need at least one column", Stage::entropy);
    if (n < m + 2)
        throw ParameterError("series of length " + std::to_string(n) +
                                 " too short for embedding dimension " + std::to_string(m),
                             Stage::entropy);
}

/// Pair counting over a row-major n x p block. A segment starting at row i is
/// the contiguous run values[i*p, (i+m)*p), so the max-norm over m*p
/// coordinates is a single loop. Each unordered pair is visited once and
/// counted twice.
inline MatchCounts count_matches(std::span<const double> values, std::size_t n, std::size_t p,
                                 std::size_t m, double r) {
    const std::size_t starts = n - m;
    const std::size_t width = m * p;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    const double* base = values.data();
    for (std::size_t i = 0; i + 1 < starts; ++i) {
        const double* si = base + i * p;
        for (std::size_t j = i + 1; j < starts; ++j) {
            const double* sj = base + j * p;
            std::size_t k = 0;
            while (k < width && std::abs(si[k] - sj[k]) <= r) ++k;
            if (k < width) continue;
            ++b;
            // the (m+1)-th row of both segments
            std::size_t e = width;
            while (e < width + p && std::abs(si[e] - sj[e]) <= r) ++e;
            if (e == width + p) ++a;
        }
    }
    return {2 * a, 2 * b};
}

inline SampleEntropy from_counts(MatchCounts counts) {
    SampleEntropy out;
    out.counts = counts;
    out.value = out.defined() ? -std::log(static_cast<double>(counts.a) /
                                          static_cast<double>(counts.b))
                              : std::numeric_limits<double>::quiet_NaN();
    return out;
}

} // namespace detail

/// Classical sample entropy of a scalar series under the Chebyshev distance.
inline SampleEntropy sample_entropy(std::span<const double> x, std::size_t m, double r) {
    detail::check_entropy_args(x.size(), 1, m);
    if (!(r > 0.0)) throw ParameterError("tolerance must be positive", Stage::entropy);
    return detail::from_counts(detail::count_matches(x, x.size(), 1, m, r));
}

/// Sample entropy of a multivariate series. A segment is m consecutive
/// p-dimensional rows; two segments are similar when every one of their m*p
/// coordinate differences is within `r`. The (m+1) length extends every
/// dimension by one row at once.
inline SampleEntropy extended_sample_entropy(const MetricMatrix& y, std::size_t m, double r) {
    detail::check_entropy_args(y.rows(), y.cols(), m);
    if (!(r > 0.0)) throw ParameterError("tolerance must be positive", Stage::entropy);
    const auto rows = y.row_major();
    return detail::from_counts(detail::count_matches(rows, y.rows(), y.cols(), m, r));
}

inline SampleEntropy extended_sample_entropy(const NormalizedMatrix& y, std::size_t m, double r) {
    return extended_sample_entropy(y.values, m, r);
}

struct EntropyConfig {
    std::size_t m = 2;
    std::size_t scales = 10;
    double r_factor = 0.15;
    SlidingWindow window;

    void validate() const {
        if (m < 1) throw ParameterError("m must be >= 1", Stage::entropy);
        if (scales < 1) throw ParameterError("number of scales must be >= 1", Stage::entropy);
        if (!(r_factor > 0.0)) throw ParameterError("r_factor must be positive", Stage::entropy);
        if (window.stride < 1) throw ParameterError("window stride must be >= 1", Stage::entropy);
        const double need = std::pow(10.0, static_cast<double>(m));
        if (static_cast<double>(window.length / scales) < need)
            throw ParameterError("window length " + std::to_string(window.length) + " gives " +
                                     std::to_string(window.length / scales) +
                                     " points at the coarsest scale; need at least 10^m",
                                 Stage::entropy);
    }
};

/// Per-scale entropies of one window and their Euclidean norm.
struct EntropyProfile {
    std::vector<double> per_scale;
    double composed = 0.0;
    std::int64_t window_end = 0;
    double tolerance = 0.0;
    /// 1-based scales whose match counts were zero and were replaced by the cap.
    std::vector<std::size_t> undefined_scales;

    bool flagged() const noexcept { return !undefined_scales.empty(); }
};

inline double composed_entropy(std::span<const double> per_scale) {
    double ss = 0.0;
    for (double e : per_scale) ss += e * e;
    return std::sqrt(ss);
}

namespace detail {

inline EntropyProfile multiscale(const NormalizedMatrix& xn, const EntropyConfig& cfg, double r) {
    EntropyProfile out;
    out.tolerance = r;
    out.per_scale.reserve(cfg.scales);
    for (std::size_t tau = 1; tau <= cfg.scales; ++tau) {
        const MetricMatrix y = coarse_grain(xn.values, tau);
        check_entropy_args(y.rows(), y.cols(), cfg.m);
        const auto rows = y.row_major();
        const SampleEntropy se = from_counts(count_matches(rows, y.rows(), y.cols(), cfg.m, r));
        if (se.defined()) {
            out.per_scale.push_back(se.value);
        } else {
            out.per_scale.push_back(entropy_cap(y.rows(), cfg.m));
            out.undefined_scales.push_back(tau);
        }
    }
    out.composed = composed_entropy(out.per_scale);
    if (xn.rows() > 0) out.window_end = xn.values.time.at(xn.rows() - 1);
    return out;
}

} // namespace detail

/// Multidimensional multiscale entropy of one window: normalize, fix the
/// tolerance from the total variance, then coarse-grain and measure each
/// scale. The composed entropy is the aging indicator.
inline EntropyProfile mmse(const MetricMatrix& x, const EntropyConfig& cfg) {
    cfg.validate();
    if (x.rows() != cfg.window.length)
        throw ParameterError("window has " + std::to_string(x.rows()) + " rows, expected " +
                                 std::to_string(cfg.window.length),
                             Stage::entropy);
    const NormalizedMatrix xn = minmax_normalize(x);
    const double r = cfg.r_factor * total_variance(xn);
    return detail::multiscale(xn, cfg, r);
}

enum class ToleranceBasis {
    std_dev,   // r = r_factor * sigma, the classical single-series rule
    variance,  // r = r_factor * sigma^2, what mmse uses for p = 1
};

/// Classical single-metric multiscale entropy.
inline EntropyProfile mse_profile(std::span<const double> x, const EntropyConfig& cfg,
                                  ToleranceBasis basis = ToleranceBasis::std_dev) {
    cfg.validate();
    if (x.size() != cfg.window.length)
        throw ParameterError("series has " + std::to_string(x.size()) + " samples, expected " +
                                 std::to_string(cfg.window.length),
                             Stage::entropy);
    const MetricMatrix single = MetricMatrix::from_columns(
        std::vector<std::vector<double>>{std::vector<double>(x.begin(), x.end())});
    const NormalizedMatrix xn = minmax_normalize(single);
    const double var = sample_variance(xn.values.column(0));
    const double r = cfg.r_factor * (basis == ToleranceBasis::std_dev ? std::sqrt(var) : var);
    return detail::multiscale(xn, cfg, r);
}

} // namespace chaos
