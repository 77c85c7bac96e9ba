#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaos/detectors.hpp"
#include "chaos/error.hpp"
#include "chaos/evaluation.hpp"

namespace chaos {

enum class DetectorKind { ft, ftx, shewhart };

inline const char* to_string(DetectorKind k) {
    switch (k) {
    case DetectorKind::ft: return "ft";
    case DetectorKind::ftx: return "ftx";
    case DetectorKind::shewhart: return "shewhart";
    }
    return "unknown";
}

inline DetectorKind detector_kind_from_string(const std::string& s) {
    if (s == "ft") return DetectorKind::ft;
    if (s == "ftx" || s == "ft-x") return DetectorKind::ftx;
    if (s == "shewhart") return DetectorKind::shewhart;
    throw ParameterError("unknown detector '" + s + "'");
}

struct DetectorSpec {
    DetectorKind kind = DetectorKind::ft;
    double beta = 2.0;
    BoundaryMode mode = BoundaryMode::upper;
    ShewhartConfig shewhart;

    std::string id() const {
        if (kind == DetectorKind::shewhart)
            return std::string("shewhart(N'=") + std::to_string(shewhart.window) +
                   ",eps=" + std::to_string(shewhart.epsilon) + ")";
        return std::string(to_string(kind)) + "(beta=" + std::to_string(beta) + ")";
    }
};

/// One labeled indicator stream: CE values (or a raw metric) at increasing
/// slots, and the slot of the labeled failure.
struct IndicatorTrace {
    std::vector<std::int64_t> slots;
    std::vector<double> values;
    std::int64_t failure_point = 0;
};

/// Offline evaluation protocol. Threshold detectors train on every value up
/// to `training_gap` slots before the decision window opens; FT-X keeps
/// learning from values before the window, which are known to be normal.
struct Protocol {
    std::int64_t decision_window = 100;
    std::int64_t training_gap = 200;

    std::int64_t training_end(std::int64_t failure_point) const {
        return failure_point - decision_window - training_gap;
    }
};

inline std::vector<bool> run_detector(const DetectorSpec& spec, const IndicatorTrace& trace,
                                      const Protocol& protocol) {
    if (trace.slots.size() != trace.values.size())
        throw ParameterError("slot and value counts differ", Stage::detection);
    std::vector<bool> verdicts(trace.values.size(), false);

    if (spec.kind == DetectorKind::shewhart) {
        ShewhartDetector det(spec.shewhart);
        for (std::size_t i = 0; i < trace.values.size(); ++i)
            verdicts[i] = det.step(trace.values[i]).failure;
        return verdicts;
    }

    const std::int64_t train_end = protocol.training_end(trace.failure_point);
    std::size_t n_train = 0;
    while (n_train < trace.slots.size() && trace.slots[n_train] <= train_end) ++n_train;
    if (n_train == 0)
        throw ParameterError("no training data before slot " + std::to_string(train_end),
                             Stage::detection);
    const std::span<const double> training(trace.values.data(), n_train);

    if (spec.kind == DetectorKind::ft) {
        const FtState s = ft_train(training, spec.beta, spec.mode);
        for (std::size_t i = n_train; i < trace.values.size(); ++i)
            verdicts[i] = ft_step(s, trace.values[i]);
    } else {
        FtxState s = ftx_train(training, spec.beta, spec.mode);
        const std::int64_t normal_until = trace.failure_point - protocol.decision_window;
        for (std::size_t i = n_train; i < trace.values.size(); ++i)
            verdicts[i] = ftx_step(s, trace.values[i], trace.slots[i] < normal_until);
    }
    return verdicts;
}

inline TraceEvaluation evaluate_detector(const DetectorSpec& spec, const IndicatorTrace& trace,
                                         const Protocol& protocol) {
    LabeledTrace labeled{trace.slots, run_detector(spec, trace, protocol), trace.failure_point,
                         protocol.decision_window};
    return evaluate_trace(labeled);
}

inline EvalResult evaluate_detector(const DetectorSpec& spec,
                                    std::span<const IndicatorTrace> traces,
                                    const Protocol& protocol) {
    std::vector<TraceEvaluation> per;
    per.reserve(traces.size());
    for (const auto& t : traces) per.push_back(evaluate_detector(spec, t, protocol));
    return aggregate(std::span<const TraceEvaluation>(per));
}

struct SweepCell {
    DetectorSpec spec;
    EvalResult result;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::optional<std::size_t> best;  // arg max F1; first cell wins ties
};

inline std::vector<DetectorSpec> beta_grid(DetectorKind kind, std::span<const double> betas,
                                           BoundaryMode mode = BoundaryMode::upper) {
    std::vector<DetectorSpec> out;
    for (double b : betas) out.push_back({kind, b, mode, {}});
    return out;
}

inline std::vector<DetectorSpec> shewhart_grid(std::span<const std::size_t> windows,
                                               std::span<const double> epsilons,
                                               std::size_t p_run = 4) {
    std::vector<DetectorSpec> out;
    for (std::size_t w : windows)
        for (double e : epsilons) {
            DetectorSpec s;
            s.kind = DetectorKind::shewhart;
            s.shewhart = {w, e, p_run};
            out.push_back(s);
        }
    return out;
}

inline SweepResult sweep(std::span<const DetectorSpec> grid, std::span<const IndicatorTrace> traces,
                         const Protocol& protocol) {
    SweepResult out;
    for (const auto& spec : grid) {
        out.cells.push_back({spec, evaluate_detector(spec, traces, protocol)});
        const auto& f1 = out.cells.back().result.f1;
        if (f1 && (!out.best || *f1 > *out.cells[*out.best].result.f1))
            out.best = out.cells.size() - 1;
    }
    return out;
}

} // namespace chaos
