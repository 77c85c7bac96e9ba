#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "chaos/detectors.hpp"
#include "chaos/entropy.hpp"
#include "chaos/error.hpp"
#include "chaos/evaluation.hpp"
#include "chaos/io.hpp"
#include "chaos/sweep.hpp"
#include "chaos/timeseries.hpp"
#include "chaos/varselect.hpp"

namespace chaos {

/// Everything a detection run needs. Field names double as config-file keys.
struct PipelineConfig {
    std::string input;
    std::string output = "-";
    std::string labels;  // empty: no evaluation

    std::vector<std::string> metrics;  // empty: every column
    bool auto_select = false;
    std::size_t select_k = 5;
    std::size_t selection_rows = 0;  // 0: one window's worth
    AnnealConfig anneal;

    EntropyConfig entropy;

    std::vector<DetectorKind> detectors{DetectorKind::ft, DetectorKind::ftx, DetectorKind::shewhart};
    double ft_beta = 2.0;
    double ftx_beta = 1.1;
    BoundaryMode mode = BoundaryMode::upper;
    ShewhartConfig shewhart;
    std::size_t training_windows = 100;  // CE values FT and FT-X learn from

    std::int64_t decision_window = 100;
    std::size_t threads = 1;

    void validate() const {
        entropy.validate();
        shewhart.validate();
        anneal.validate();
        if (detectors.empty()) throw ParameterError("no detector configured");
        if (!(ft_beta > 0.0) || !(ftx_beta > 0.0)) throw ParameterError("beta must be positive");
        if (training_windows < 1) throw ParameterError("training_windows must be >= 1");
        if (decision_window < 0) throw ParameterError("decision_window must be >= 0");
        if (auto_select && !metrics.empty())
            throw ParameterError("give either a metric list or auto selection, not both");
        if (auto_select && select_k < 1) throw ParameterError("select_k must be >= 1");
        if (threads < 1) throw ParameterError("threads must be >= 1");
    }
};

/// One detector of the live roster. FT and FT-X collect the first
/// `training_windows` CE values before judging; Shewhart warms up on its own.
class LiveDetector {
public:
    LiveDetector(DetectorKind kind, const PipelineConfig& cfg)
        : kind_(kind), mode_(cfg.mode), training_(cfg.training_windows),
          beta_(kind == DetectorKind::ftx ? cfg.ftx_beta : cfg.ft_beta), shewhart_(cfg.shewhart) {}

    std::string id() const { return to_string(kind_); }

    DetectionReport step(double ce) {
        DetectionReport r;
        r.detector = id();
        r.ce = ce;
        if (kind_ == DetectorKind::shewhart) {
            const ShewhartVerdict v = shewhart_.step(ce);
            r.verdict = v.failure;
            r.training = !v.warmed_up;
            r.deviation = v.deviation;
            r.changes_seen = v.changes_seen;
            return r;
        }
        if (!ft_) {
            history_.push_back(ce);
            r.training = true;
            if (history_.size() == training_) {
                ft_ = ft_train(history_, beta_, mode_);
                ftx_.emplace(FtxState{*ft_});
                history_.clear();
                history_.shrink_to_fit();
            }
            return r;
        }
        if (kind_ == DetectorKind::ft) {
            r.verdict = ft_step(*ft_, ce);
            r.ft = ft_->ft;
        } else {
            r.ft = ftx_->state().ft;
            r.verdict = ftx_->step(ce);
        }
        return r;
    }

private:
    DetectorKind kind_;
    BoundaryMode mode_;
    std::size_t training_;
    double beta_;
    std::vector<double> history_;
    std::optional<FtState> ft_;
    std::optional<FtxDetector> ftx_;
    ShewhartDetector shewhart_;
};

/// Resolves the metric columns a run uses. Auto selection anneals on the
/// first `selection_rows` rows.
inline std::vector<std::size_t> resolve_metrics(const PipelineConfig& cfg, const MetricMatrix& x) {
    std::vector<std::size_t> cols;
    if (cfg.auto_select) {
        if (cfg.select_k > x.cols())
            throw ParameterError("select_k " + std::to_string(cfg.select_k) + " exceeds " +
                                     std::to_string(x.cols()) + " metrics",
                                 Stage::selection);
        const std::size_t rows = std::min(
            x.rows(), cfg.selection_rows == 0 ? cfg.entropy.window.length : cfg.selection_rows);
        if (rows < 2) throw DataError("too few rows for selection", Stage::selection);
        cols = anneal_select(x.slice_rows(0, rows), cfg.select_k, cfg.anneal).indices;
    } else if (cfg.metrics.empty()) {
        cols.resize(x.cols());
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = c;
    } else {
        for (const auto& name : cfg.metrics) cols.push_back(x.index_of(name));
    }
    return cols;
}

/// Outcome of a batch run, kept for evaluation and plot export.
struct PipelineRun {
    std::vector<std::string> selected;
    std::vector<std::string> detector_ids;
    std::vector<std::int64_t> slots;
    std::vector<std::int64_t> timestamps;
    std::vector<double> ce;
    std::vector<std::vector<bool>> verdicts;  // [detector][step]
};

using ReportSink = std::function<void(const DetectionReport&)>;

/// Steps every detector on each CE value in order and forwards the reports.
class DetectorBank {
public:
    explicit DetectorBank(const PipelineConfig& cfg) {
        for (DetectorKind k : cfg.detectors) detectors_.emplace_back(k, cfg);
    }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& d : detectors_) out.push_back(d.id());
        return out;
    }

    std::vector<DetectionReport> step(double ce, std::int64_t slot, std::int64_t timestamp) {
        std::vector<DetectionReport> out;
        out.reserve(detectors_.size());
        for (auto& d : detectors_) {
            DetectionReport r = d.step(ce);
            r.slot = slot;
            r.timestamp = timestamp;
            out.push_back(std::move(r));
        }
        return out;
    }

private:
    std::vector<LiveDetector> detectors_;
};

/// Batch run over an in-memory matrix. Window entropies may be computed on
/// several threads; detectors always step in window order.
inline PipelineRun run_pipeline(const PipelineConfig& cfg, const MetricMatrix& input,
                                const ReportSink& sink = {}) {
    cfg.validate();
    const std::vector<std::size_t> cols = resolve_metrics(cfg, input);
    const MetricMatrix x = input.select_columns(cols);

    PipelineRun run;
    run.selected = x.names();
    DetectorBank bank(cfg);
    run.detector_ids = bank.ids();
    run.verdicts.resize(run.detector_ids.size());

    const SlidingWindow& win = cfg.entropy.window;
    const std::size_t n_windows = win.count(x.rows());
    auto compute = [&](std::size_t k) {
        return mmse(x.slice_rows(win.begin(k), win.length), cfg.entropy).composed;
    };

    const std::size_t block = cfg.threads;
    std::vector<double> ce(block);
    for (std::size_t start = 0; start < n_windows; start += block) {
        const std::size_t count = std::min(block, n_windows - start);
        if (cfg.threads > 1) {
            std::vector<std::future<double>> futures;
            futures.reserve(count);
            for (std::size_t i = 0; i < count; ++i)
                futures.push_back(std::async(std::launch::async, compute, start + i));
            for (std::size_t i = 0; i < count; ++i) ce[i] = futures[i].get();
        } else {
            ce[0] = compute(start);
        }
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t last = win.begin(start + i) + win.length - 1;
            const auto slot = static_cast<std::int64_t>(last);
            const std::int64_t ts = x.time.at(last);
            run.slots.push_back(slot);
            run.timestamps.push_back(ts);
            run.ce.push_back(ce[i]);
            const auto reports = bank.step(ce[i], slot, ts);
            for (std::size_t d = 0; d < reports.size(); ++d) {
                run.verdicts[d].push_back(reports[d].verdict);
                if (sink) sink(reports[d]);
            }
        }
    }
    return run;
}

/// Row-at-a-time equivalent of run_pipeline for a fixed set of columns. Keeps
/// only the last window of rows.
class StreamingPipeline {
public:
    StreamingPipeline(const PipelineConfig& cfg, TimeAxis axis, std::size_t p)
        : cfg_(cfg), axis_(axis), p_(p), bank_(cfg), ring_(cfg.entropy.window.length * p) {
        cfg_.validate();
        if (p_ < 1) throw ParameterError("stream needs at least one metric");
    }

    std::vector<DetectionReport> push(std::span<const double> row) {
        if (row.size() != p_)
            throw DataError("row " + std::to_string(seen_) + " has " + std::to_string(row.size()) +
                            " values, expected " + std::to_string(p_));
        const std::size_t n = cfg_.entropy.window.length;
        std::copy(row.begin(), row.end(), ring_.begin() + static_cast<std::ptrdiff_t>((seen_ % n) * p_));
        ++seen_;
        if (seen_ < n || (seen_ - n) % cfg_.entropy.window.stride != 0) return {};

        MetricMatrix w(n, p_);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = (seen_ + i) % n;
            for (std::size_t c = 0; c < p_; ++c) w(i, c) = ring_[src * p_ + c];
        }
        const double ce = mmse(w, cfg_.entropy).composed;
        const std::size_t last = seen_ - 1;
        return bank_.step(ce, static_cast<std::int64_t>(last), axis_.at(last));
    }

    std::vector<std::string> detector_ids() const { return bank_.ids(); }

private:
    PipelineConfig cfg_;
    TimeAxis axis_;
    std::size_t p_;
    DetectorBank bank_;
    std::vector<double> ring_;
    std::size_t seen_ = 0;
};

/// CE at every window end, computed on `threads` threads.
inline std::vector<double> ce_series(const MetricMatrix& x, const EntropyConfig& cfg,
                                     std::size_t threads = 1) {
    cfg.validate();
    const SlidingWindow& win = cfg.window;
    const std::size_t n = win.count(x.rows());
    std::vector<double> out(n);
    auto work = [&](std::size_t first) {
        for (std::size_t k = first; k < n; k += threads)
            out[k] = mmse(x.slice_rows(win.begin(k), win.length), cfg).composed;
    };
    if (threads <= 1) {
        work(0);
        return out;
    }
    std::vector<std::future<void>> jobs;
    for (std::size_t t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, work, t));
    for (auto& j : jobs) j.get();
    return out;
}

/// Labeled CE stream of one trace, one value per window end.
inline IndicatorTrace ce_indicator(const MetricMatrix& x, const EntropyConfig& cfg,
                                   std::int64_t failure_slot, std::size_t threads = 1) {
    IndicatorTrace t;
    t.values = ce_series(x, cfg, threads);
    for (std::size_t k = 0; k < t.values.size(); ++k)
        t.slots.push_back(static_cast<std::int64_t>(cfg.window.begin(k) + cfg.window.length - 1));
    t.failure_point = failure_slot;
    return t;
}

/// One raw metric sampled at the same window ends as the CE stream, so both
/// indicators are judged on identical report slots.
inline IndicatorTrace raw_indicator(const MetricMatrix& x, std::size_t column,
                                    const SlidingWindow& win, std::int64_t failure_slot) {
    if (column >= x.cols()) throw ParameterError("column index out of range");
    IndicatorTrace t;
    const std::size_t n = win.count(x.rows());
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last = win.begin(k) + win.length - 1;
        t.slots.push_back(static_cast<std::int64_t>(last));
        t.values.push_back(x(last, column));
    }
    t.failure_point = failure_slot;
    return t;
}

struct DetectorSummary {
    std::string detector;
    TraceEvaluation evaluation;
};

/// Scores each detector's verdict stream against one labeled failure slot.
inline std::vector<DetectorSummary> evaluate_run(const PipelineRun& run, std::int64_t failure_slot,
                                                 std::int64_t decision_window) {
    std::vector<DetectorSummary> out;
    for (std::size_t d = 0; d < run.detector_ids.size(); ++d) {
        LabeledTrace t{run.slots, run.verdicts[d], failure_slot, decision_window};
        out.push_back({run.detector_ids[d], evaluate_trace(t)});
    }
    return out;
}

inline nlohmann::ordered_json to_json(const EvalResult& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["tp"] = r.counts.tp;
    j["fp"] = r.counts.fp;
    j["fn"] = r.counts.fn;
    j["recall"] = opt(r.recall);
    j["precision"] = opt(r.precision);
    j["f1"] = opt(r.f1);
    j["attf"] = opt(r.attf);
    j["traces"] = r.traces;
    j["attf_undefined"] = r.attf_undefined;
    return j;
}

inline nlohmann::ordered_json summary_json(const std::string& detector, const EvalResult& r) {
    nlohmann::ordered_json s = to_json(r);
    s.erase("traces");
    nlohmann::ordered_json j;
    j["summary"] = {{"detector", detector}};
    for (const auto& [k, v] : s.items()) j["summary"][k] = v;
    return j;
}

} // namespace chaos
