#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chaos/error.hpp"
#include "chaos/timeseries.hpp"

namespace chaos {

/// Two-state (working / failure) software aging model with a Weibull-shaped
/// failure rate.
struct AgingModel {
    double alpha = 5.4e5;    // scale
    double shape = 11.0;     // beta
    double horizon = 4.5e5;  // crash time

    void validate() const {
        if (!(alpha > 0.0) || !(shape > 0.0))
            throw ParameterError("Weibull scale and shape must be positive", Stage::generation);
        if (!(horizon > 0.0)) throw ParameterError("horizon must be positive", Stage::generation);
    }
};

/// (t / alpha)^beta, the cumulative hazard exponent.
inline double weibull_exponent(const AgingModel& model, double t) {
    return std::pow(t / model.alpha, model.shape);
}

/// h(t) = (beta/alpha) (t/alpha)^(beta-1) exp(-(t/alpha)^beta)
inline double hazard(const AgingModel& model, double t) {
    if (t < 0.0) throw ParameterError("time must be non-negative", Stage::generation);
    const double x = t / model.alpha;
    return (model.shape / model.alpha) * std::pow(x, model.shape - 1.0) *
           std::exp(-weibull_exponent(model, t));
}

/// F(t) = 1 - exp(-(t/alpha)^beta)
inline double failure_cdf(const AgingModel& model, double t) {
    if (t < 0.0) throw ParameterError("time must be non-negative", Stage::generation);
    return -std::expm1(-weibull_exponent(model, t));
}

/// p_f(t) = h(t) (1 - F(t)) = (beta/alpha) (t/alpha)^(beta-1) exp(-2 (t/alpha)^beta)
inline double failure_probability(const AgingModel& model, double t) {
    if (t < 0.0) throw ParameterError("time must be non-negative", Stage::generation);
    const double x = t / model.alpha;
    return (model.shape / model.alpha) * std::pow(x, model.shape - 1.0) *
           std::exp(-2.0 * weibull_exponent(model, t));
}

/// Shannon entropy (nats) of the binary working/failure state.
inline double binary_entropy(double pf) {
    if (pf <= 0.0 || pf >= 1.0) return 0.0;
    // log1p keeps the working-state term accurate when p_f is tiny
    return -((1.0 - pf) * std::log1p(-pf) + pf * std::log(pf));
}

/// dE/dp_f = ln((1 - p_f) / p_f)
inline double binary_entropy_slope(double pf) { return std::log((1.0 - pf) / pf); }

/// System entropy E(t). Zero at t = 0, where the system is new.
inline double state_entropy(const AgingModel& model, double t) {
    if (t == 0.0) return 0.0;
    return binary_entropy(failure_probability(model, t));
}

/// Synthetic multivariate aging trace.
///
/// Slot k maps to model time start_time + k * (horizon - start_time) / length.
/// The per-slot probability of the failure state is p_f(t) rescaled so its
/// peak over the trace equals `peak_failure_probability`; the raw Weibull
/// p_f is a density of order 1e-6 and never produces a visible failure when
/// read directly as a per-slot probability.
///
/// States follow a sticky two-state chain: with probability
/// persistence * q(t) / peak the previous state is kept, otherwise a fresh
/// Bernoulli(q(t)) draw is made. The marginal failure probability stays q(t)
/// while failure episodes lengthen as the system ages.
///
/// Every channel follows base + scale * (gain * A * w(t) + noise), where w is a
/// shared workload cycle. In the failure state a weakly correlated noise burst
/// of relative size `failure_amplitude` is added.
struct TraceSpec {
    AgingModel model;
    std::size_t p = 5;
    std::size_t length = 5000;
    double noise_level = 0.02;
    std::uint64_t seed = 1;

    std::optional<double> start_time;  // default 0.6 * horizon
    double peak_failure_probability = 0.45;
    double persistence = 0.9;
    double failure_amplitude = 0.3;
    double failure_correlation = 0.3;
    double workload_amplitude = 1.0;
    double workload_period = 97.0;
    std::size_t sustained_run = 10;
    bool require_failure = true;

    double start() const { return start_time.value_or(0.6 * model.horizon); }
    double slot_duration() const {
        return (model.horizon - start()) / static_cast<double>(length);
    }
    double slot_time(std::size_t k) const {
        return start() + static_cast<double>(k) * slot_duration();
    }

    void validate() const {
        model.validate();
        if (p < 1) throw ParameterError("trace needs at least one metric", Stage::generation);
        if (length < 2 * sustained_run + 2)
            throw ParameterError("trace length too short", Stage::generation);
        if (start() < 0.0 || start() >= model.horizon)
            throw ParameterError("start time must lie in [0, horizon)", Stage::generation);
        if (peak_failure_probability < 0.0 || peak_failure_probability >= 1.0)
            throw ParameterError("peak failure probability must lie in [0, 1)",
                                 Stage::generation);
        if (persistence < 0.0 || persistence >= 1.0)
            throw ParameterError("persistence must lie in [0, 1)", Stage::generation);
        if (noise_level < 0.0 || failure_amplitude < 0.0 || workload_amplitude < 0.0)
            throw ParameterError("amplitudes must be non-negative", Stage::generation);
        if (!(workload_period > 0.0))
            throw ParameterError("workload period must be positive", Stage::generation);
        if (sustained_run < 1) throw ParameterError("sustained run must be >= 1", Stage::generation);
    }
};

struct GeneratedTrace {
    MetricMatrix metrics;                // truncated at the failure slot when there is one
    std::optional<std::size_t> failure;  // first slot of the first sustained failure run
    std::vector<bool> failure_state;     // per-slot state, same length as metrics
    std::vector<double> failure_chance;  // q(t) per slot
};

/// Per-slot failure-state probability q(t) over the whole trace grid.
inline std::vector<double> failure_schedule(const TraceSpec& spec) {
    std::vector<double> q(spec.length);
    double peak = 0.0;
    for (std::size_t k = 0; k < spec.length; ++k) {
        q[k] = failure_probability(spec.model, spec.slot_time(k));
        peak = std::max(peak, q[k]);
    }
    for (double& v : q) v = peak > 0.0 ? v * spec.peak_failure_probability / peak : 0.0;
    return q;
}

inline GeneratedTrace generate_trace(const TraceSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> base(spec.p), scale(spec.p), gain(spec.p), phase(spec.p);
    for (std::size_t c = 0; c < spec.p; ++c) {
        base[c] = std::pow(10.0, 1.0 + 3.0 * unit(rng));  // 10 .. 10^4
        scale[c] = 0.2 * base[c];
        gain[c] = 0.5 + 1.5 * unit(rng);
        phase[c] = 0.25 * unit(rng);
    }

    const std::vector<double> q = failure_schedule(spec);
    const double peak = spec.peak_failure_probability;

    GeneratedTrace out;
    out.failure_state.resize(spec.length);
    bool state = false;
    std::size_t run = 0;
    for (std::size_t k = 0; k < spec.length; ++k) {
        const double keep = peak > 0.0 ? spec.persistence * q[k] / peak : 0.0;
        const double u = unit(rng);
        const double v = unit(rng);
        if (k == 0 || u >= keep) state = v < q[k];
        out.failure_state[k] = state;
        run = state ? run + 1 : 0;
        if (!out.failure && run >= spec.sustained_run) out.failure = k + 1 - spec.sustained_run;
    }

    if (!out.failure && spec.require_failure) {
        const double max_q = *std::max_element(q.begin(), q.end());
        const double max_pf =
            failure_probability(spec.model, spec.slot_time(spec.length - 1));
        throw Error(Stage::generation,
                    "no sustained failure run within the horizon (max p_f " +
                        std::to_string(max_pf) + ", max per-slot probability " +
                        std::to_string(max_q) + ")");
    }

    const std::size_t rows = out.failure ? *out.failure + 1 : spec.length;
    out.failure_state.resize(rows);
    out.failure_chance.assign(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(rows));
    out.metrics = MetricMatrix(rows, spec.p);
    out.metrics.time = TimeAxis{0, 1, false};

    const double rho = spec.failure_correlation;
    const double own = std::sqrt(1.0 - rho * rho);
    std::vector<double> burst(spec.p);
    for (std::size_t k = 0; k < rows; ++k) {
        const double cycle_pos = static_cast<double>(k) / spec.workload_period;
        const double shared = gauss(rng);
        const bool failing = out.failure_state[k];
        for (std::size_t c = 0; c < spec.p; ++c) burst[c] = rho * shared + own * gauss(rng);
        for (std::size_t c = 0; c < spec.p; ++c) {
            const double w = std::sin(2.0 * std::numbers::pi * (cycle_pos + phase[c]));
            double x = gain[c] * spec.workload_amplitude * w + spec.noise_level * gauss(rng);
            if (failing) x += spec.failure_amplitude * burst[c];
            out.metrics(k, c) = base[c] + scale[c] * x;
        }
    }
    return out;
}

} // namespace chaos
