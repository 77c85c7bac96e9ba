#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaos/error.hpp"

namespace chaos {

/// Verdict stream of one experiment together with its labeled failure.
/// The decision window is [failure_point - decision_window, failure_point],
/// inclusive on both ends.
struct LabeledTrace {
    std::vector<std::int64_t> slots;
    std::vector<bool> verdicts;
    std::int64_t failure_point = 0;
    std::int64_t decision_window = 100;

    std::int64_t window_begin() const { return failure_point - decision_window; }
    bool in_window(std::int64_t slot) const {
        return slot >= window_begin() && slot <= failure_point;
    }

    void validate() const {
        if (slots.size() != verdicts.size())
            throw ParameterError("slot and verdict counts differ", Stage::evaluation);
        if (decision_window < 0)
            throw ParameterError("decision window must be non-negative", Stage::evaluation);
        for (std::size_t i = 1; i < slots.size(); ++i)
            if (slots[i] <= slots[i - 1])
                throw DataError("report timestamps not increasing at index " + std::to_string(i),
                                Stage::evaluation);
        if (!slots.empty() && failure_point < slots.front())
            throw DataError("failure point precedes the start of the trace", Stage::evaluation);
    }
};

struct DetectionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    DetectionCounts& operator+=(const DetectionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const DetectionCounts&, const DetectionCounts&) = default;
};

/// Positive reports inside the decision window are true positives, positive
/// reports anywhere else are false positives, and a window with no positive
/// report is one missed failure.
inline DetectionCounts classify(const LabeledTrace& trace) {
    trace.validate();
    DetectionCounts c;
    for (std::size_t i = 0; i < trace.slots.size(); ++i) {
        if (!trace.verdicts[i]) continue;
        if (trace.in_window(trace.slots[i])) ++c.tp;
        else ++c.fp;
    }
    if (c.tp == 0) c.fn = 1;
    return c;
}

enum class AttfStatus {
    ok,
    no_report,  // nothing was ever reported
    late,       // first report came after the failure point
};

struct Attf {
    AttfStatus status = AttfStatus::no_report;
    std::int64_t slots = 0;

    bool defined() const noexcept { return status == AttfStatus::ok; }
};

/// Ahead-time-to-failure: 0 when the first positive report falls in the
/// decision window, otherwise its distance before the window's left boundary.
inline Attf attf(const LabeledTrace& trace) {
    trace.validate();
    for (std::size_t i = 0; i < trace.slots.size(); ++i) {
        if (!trace.verdicts[i]) continue;
        const std::int64_t t = trace.slots[i];
        if (t > trace.failure_point) return {AttfStatus::late, 0};
        if (trace.in_window(t)) return {AttfStatus::ok, 0};
        return {AttfStatus::ok, trace.window_begin() - t};
    }
    return {AttfStatus::no_report, 0};
}

struct TraceEvaluation {
    DetectionCounts counts;
    Attf attf;
};

inline TraceEvaluation evaluate_trace(const LabeledTrace& trace) {
    return {classify(trace), attf(trace)};
}

/// Micro-aggregated metrics. Ratios with a zero denominator are left empty
/// rather than reported as 0.
struct EvalResult {
    DetectionCounts counts;
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
    std::optional<double> attf;  // mean over traces with a defined ATTF
    std::size_t traces = 0;
    std::size_t attf_undefined = 0;
};

inline EvalResult metrics_from_counts(const DetectionCounts& c) {
    EvalResult r;
    r.counts = c;
    if (c.tp + c.fn > 0)
        r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.tp + c.fp > 0)
        r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (r.recall && r.precision && *r.recall + *r.precision > 0.0)
        r.f1 = 2.0 * *r.recall * *r.precision / (*r.recall + *r.precision);
    return r;
}

/// Sums counts over traces and computes each ratio once on the totals.
inline EvalResult aggregate(std::span<const TraceEvaluation> traces) {
    DetectionCounts total;
    double attf_sum = 0.0;
    std::size_t attf_n = 0;
    for (const auto& t : traces) {
        total += t.counts;
        if (t.attf.defined()) {
            attf_sum += static_cast<double>(t.attf.slots);
            ++attf_n;
        }
    }
    EvalResult r = metrics_from_counts(total);
    r.traces = traces.size();
    r.attf_undefined = traces.size() - attf_n;
    if (attf_n > 0) r.attf = attf_sum / static_cast<double>(attf_n);
    return r;
}

inline EvalResult aggregate(std::span<const DetectionCounts> counts) {
    std::vector<TraceEvaluation> t;
    t.reserve(counts.size());
    for (const auto& c : counts) t.push_back({c, Attf{}});
    EvalResult r = aggregate(std::span<const TraceEvaluation>(t));
    r.attf_undefined = 0;
    return r;
}

} // namespace chaos
