#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>

#include "chaos/error.hpp"
#include "chaos/stats.hpp"

namespace chaos {

enum class BoundaryMode {
    upper,  // indicator rises with aging; failure when it exceeds ft
    lower,  // indicator falls with aging; failure when it drops below ft
};

inline const char* to_string(BoundaryMode m) { return m == BoundaryMode::upper ? "upper" : "lower"; }

/// Failure threshold from the trained extreme: beta * max in upper mode,
/// min / beta in lower mode.
inline double failure_threshold(double extreme, double beta, BoundaryMode mode) {
    return mode == BoundaryMode::upper ? beta * extreme : extreme / beta;
}

struct FtState {
    double beta = 2.0;
    double trained_extreme = 0.0;
    BoundaryMode mode = BoundaryMode::upper;
    double ft = 0.0;
};

inline FtState ft_train(std::span<const double> training, double beta,
                        BoundaryMode mode = BoundaryMode::upper) {
    if (training.empty()) throw ParameterError("empty training series", Stage::detection);
    if (!(beta > 0.0)) throw ParameterError("beta must be positive", Stage::detection);
    FtState s;
    s.beta = beta;
    s.mode = mode;
    s.trained_extreme = training.front();
    for (double v : training)
        s.trained_extreme = mode == BoundaryMode::upper ? std::max(s.trained_extreme, v)
                                                        : std::min(s.trained_extreme, v);
    s.ft = failure_threshold(s.trained_extreme, beta, mode);
    return s;
}

/// Strict comparison: a value equal to ft is normal.
inline bool ft_step(const FtState& s, double ce) {
    return s.mode == BoundaryMode::upper ? ce > s.ft : ce < s.ft;
}

/// Incremental threshold. Keeps only the running extreme of normal-state
/// values.
struct FtxState : FtState {};

inline FtxState ftx_train(std::span<const double> training, double beta,
                          BoundaryMode mode = BoundaryMode::upper) {
    return FtxState{ft_train(training, beta, mode)};
}

/// Judges `ce` against the current threshold, then folds it into the extreme
/// if the system is known to be normal.
inline bool ftx_step(FtxState& s, double ce, bool system_normal) {
    const bool failure = ft_step(s, ce);
    if (system_normal) {
        const bool widens = s.mode == BoundaryMode::upper ? ce > s.trained_extreme
                                                          : ce < s.trained_extreme;
        if (widens) {
            s.trained_extreme = ce;
            s.ft = failure_threshold(ce, s.beta, s.mode);
        }
    }
    return failure;
}

/// FT-X with the default feedback: a step counts as normal unless the
/// detector itself is currently reporting a failure.
class FtxDetector {
public:
    explicit FtxDetector(FtxState state) : state_(state) {}

    bool step(double ce, std::optional<bool> system_normal = std::nullopt) {
        const bool normal = system_normal.value_or(!ft_step(state_, ce));
        return ftx_step(state_, ce, normal);
    }

    const FtxState& state() const noexcept { return state_; }

private:
    FtxState state_;
};

struct ShewhartConfig {
    std::size_t window = 6;  // N'
    double epsilon = 6.5;
    std::size_t p_run = 4;

    void validate() const {
        if (window < 1) throw ParameterError("Shewhart window must be >= 1", Stage::detection);
        if (p_run < 1) throw ParameterError("p_run must be >= 1", Stage::detection);
        if (!std::isfinite(epsilon)) throw ParameterError("epsilon must be finite", Stage::detection);
    }
};

struct ShewhartVerdict {
    bool failure = false;
    bool warmed_up = false;
    double deviation = 0.0;  // d_n
    std::size_t run_length = 0;
    std::size_t changes_seen = 0;
};

/// Extended Shewhart control chart on an indicator that rises with aging.
///
///   d_n = sqrt(N') / sigma_n * (a_n - mu_n)
///
/// a_n is the mean of the last N' values including the current one; mu_n and
/// sigma_n are the running mean and (n-1) standard deviation of every value
/// seen so far. p_run consecutive d_n > epsilon confirm a change; the second
/// confirmed change is a failure and stays one.
class ShewhartDetector {
public:
    explicit ShewhartDetector(ShewhartConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    ShewhartVerdict step(double ce) {
        global_.push(ce);
        window_.push_back(ce);
        if (window_.size() > cfg_.window) window_.pop_front();
        ShewhartVerdict v;
        v.changes_seen = changes_;
        if (global_.count() < cfg_.window) return v;

        v.warmed_up = true;
        const double local = std::accumulate(window_.begin(), window_.end(), 0.0) /
                             static_cast<double>(window_.size());
        const double sigma = global_.stddev();
        v.deviation = sigma > 0.0
                          ? std::sqrt(static_cast<double>(cfg_.window)) / sigma * (local - global_.mean())
                          : 0.0;
        run_ = v.deviation > cfg_.epsilon ? run_ + 1 : 0;
        if (run_ == cfg_.p_run) {
            ++changes_;
            run_ = 0;
        }
        v.run_length = run_;
        v.changes_seen = changes_;
        v.failure = changes_ >= 2;
        return v;
    }

    const ShewhartConfig& config() const noexcept { return cfg_; }
    std::size_t changes_seen() const noexcept { return changes_; }
    std::size_t run_length() const noexcept { return run_; }

private:
    ShewhartConfig cfg_;
    RunningStats global_;
    std::deque<double> window_;
    std::size_t run_ = 0;
    std::size_t changes_ = 0;
};

} // namespace chaos
