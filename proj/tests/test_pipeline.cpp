#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "chaos/aging.hpp"
#include "chaos/pipeline.hpp"
#include "chaos/plotdata.hpp"

using namespace chaos;

namespace {

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.entropy.m = 1;
    cfg.entropy.scales = 2;
    cfg.entropy.window = {200, 7};
    cfg.training_windows = 10;
    cfg.decision_window = 50;
    return cfg;
}

MetricMatrix small_trace(std::uint64_t seed = 2) {
    TraceSpec spec;
    spec.seed = seed;
    spec.length = 1500;
    return generate_trace(spec).metrics;
}

std::string jsonl(const MetricMatrix& x, const PipelineConfig& cfg) {
    std::ostringstream out;
    run_pipeline(cfg, x, [&](const DetectionReport& r) { out << to_json(r).dump() << '\n'; });
    return out.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST(Pipeline, SingleWindowSingleDetector) {
    auto cfg = small_config();
    cfg.detectors = {DetectorKind::shewhart};
    const auto x = small_trace().slice_rows(0, 200);
    EXPECT_EQ(lines(jsonl(x, cfg)), 1u);
}

TEST(Pipeline, Deterministic) {
    const auto x = small_trace();
    auto cfg = small_config();
    EXPECT_EQ(jsonl(x, cfg), jsonl(x, cfg));
    auto threaded = cfg;
    threaded.threads = 4;
    EXPECT_EQ(jsonl(x, cfg), jsonl(x, threaded));
}

TEST(Pipeline, StreamingMatchesBatch) {
    const auto x = small_trace(3);
    const auto cfg = small_config();
    const std::string batch = jsonl(x, cfg);
    StreamingPipeline stream(cfg, x.time, x.cols());
    std::ostringstream out;
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (const auto& rep : stream.push(x.row(r))) out << to_json(rep).dump() << '\n';
    EXPECT_EQ(out.str(), batch);
}

TEST(Pipeline, TrainingPhaseReported) {
    const auto x = small_trace();
    auto cfg = small_config();
    cfg.detectors = {DetectorKind::ft};
    std::vector<DetectionReport> reps;
    run_pipeline(cfg, x, [&](const DetectionReport& r) { reps.push_back(r); });
    ASSERT_GT(reps.size(), cfg.training_windows);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        EXPECT_EQ(reps[i].training, i < cfg.training_windows);
        if (reps[i].training) EXPECT_FALSE(reps[i].verdict);
        else EXPECT_TRUE(reps[i].ft);
    }
}

TEST(Pipeline, MetricSelectionByName) {
    const auto x = small_trace();
    auto cfg = small_config();
    cfg.metrics = {"m3", "m1"};
    EXPECT_EQ(run_pipeline(cfg, x).selected, (std::vector<std::string>{"m3", "m1"}));
    cfg.metrics = {"nope"};
    EXPECT_THROW(run_pipeline(cfg, x), ParameterError);
}

TEST(Pipeline, AutoSelectsFiveOfSeventySix) {
    // 76 metrics: five informative columns plus noisy copies and mixtures.
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0, 1);
    const std::size_t n = 1000;
    std::vector<std::vector<double>> cols(76, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        double l[5];
        for (double& v : l) v = g(rng);
        for (std::size_t c = 0; c < 76; ++c) {
            const double mix = c < 5 ? l[c] : l[c % 5] + 0.5 * l[(c + 1) % 5];
            cols[c][r] = 50.0 + 10.0 * mix + 0.1 * g(rng);
        }
    }
    const auto x = MetricMatrix::from_columns(cols);
    PipelineConfig cfg;
    cfg.auto_select = true;
    cfg.anneal.max_iterations = 500;
    const auto run = run_pipeline(cfg, x);
    EXPECT_EQ(run.selected.size(), 5u);
    EXPECT_EQ(run.ce.size(), 1u);
}

TEST(Pipeline, ConfigValidation) {
    auto cfg = small_config();
    cfg.auto_select = true;
    cfg.metrics = {"m0"};
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = small_config();
    cfg.detectors.clear();
    EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Pipeline, EvaluateRunScoresEachDetector) {
    const auto x = small_trace();
    const auto cfg = small_config();
    const auto run = run_pipeline(cfg, x);
    const auto s = evaluate_run(run, static_cast<std::int64_t>(x.rows() - 1), cfg.decision_window);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].detector, "ft");
    const auto j = summary_json("ft", aggregate(std::span<const TraceEvaluation>(&s[0].evaluation, 1)));
    EXPECT_TRUE(j["summary"].contains("f1"));
    EXPECT_FALSE(j["summary"].contains("traces"));
}

TEST(Indicators, RawAndCeShareSlots) {
    const auto x = small_trace();
    EntropyConfig cfg;
    cfg.m = 1;
    cfg.scales = 2;
    cfg.window = {200, 50};
    const auto ce = ce_indicator(x, cfg, 1000);
    const auto raw = raw_indicator(x, 2, cfg.window, 1000);
    EXPECT_EQ(ce.slots, raw.slots);
    EXPECT_EQ(raw.values.back(), x(raw.slots.back(), 2));
    EXPECT_EQ(ce.values, ce_series(x, cfg, 3));
}

TEST(PlotData, ProfileTable) {
    EntropyProfile p;
    p.per_scale.assign(10, 0.5);
    p.undefined_scales = {3};
    std::ostringstream out;
    write_profile_csv(out, p);
    EXPECT_EQ(lines(out.str()), 11u);
    EXPECT_NE(out.str().find("\n3,0.5,1\n"), std::string::npos);
}

TEST(PlotData, SweepGridTable) {
    std::vector<std::size_t> windows;
    for (std::size_t w = 1; w <= 10; ++w) windows.push_back(w);
    std::vector<double> eps;
    for (int e = 1; e <= 14; ++e) eps.push_back(e * 0.5);
    IndicatorTrace t;
    for (std::int64_t s = 0; s < 100; ++s) {
        t.slots.push_back(s);
        t.values.push_back(s < 60 ? 1.0 + 0.01 * double(s % 3) : 5.0 + 0.01 * double(s % 3));
    }
    t.failure_point = 99;
    const std::vector<IndicatorTrace> traces{t};
    const auto grid = shewhart_grid(windows, eps);
    const auto res = sweep(grid, traces, Protocol{30, 10});
    std::ostringstream out;
    write_sweep_csv(out, res);
    EXPECT_EQ(lines(out.str()), 141u);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
              "detector,beta,window,epsilon,recall,precision,f1,attf,tp,fp,fn,best");
}

TEST(PlotData, EmptyResultsGiveHeaderOnly) {
    std::ostringstream a, b, c;
    write_sweep_csv(a, SweepResult{});
    write_profile_csv(b, EntropyProfile{});
    write_ce_series_csv(c, PipelineRun{});
    EXPECT_EQ(lines(a.str()), 1u);
    EXPECT_EQ(lines(b.str()), 1u);
    EXPECT_EQ(c.str(), "slot,timestamp,ce\n");
}

TEST(PlotData, UnwritablePathIsOutputError) {
    try {
        export_plotdata("/nonexistent/dir/x.csv", [](std::ostream&) {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.stage(), Stage::output);
    }
}
