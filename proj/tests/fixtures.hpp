#pragma once

#include <vector>

// Two-step staircase: 60 values around 1.0, 30 around 1.5, then 40 around
// 3.5, each with a +-0.02 alternating wobble. With N' = 6 and eps = 6.5 the
// first shift yields exactly four exceedances (one confirmed change); the
// second shift starts exceeding at index 93, so the failure lands on 96.
inline std::vector<double> staircase() {
    std::vector<double> x;
    auto level = [&](double v, int n) {
        for (int i = 0; i < n; ++i) x.push_back(v + 0.02 * ((i % 2) * 2 - 1));
    };
    level(1.0, 60);
    level(1.5, 30);
    level(3.5, 40);
    return x;
}

inline constexpr std::size_t kStairSecondShift = 90;
inline constexpr std::size_t kStairFirstFailure = 96;

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

#include "chaos/evaluation.hpp"

// Hand-counted report sets. `attf` is empty when ATTF is undefined; `late`
// marks a first report after the failure.
struct EvalFixture {
    std::string name;
    chaos::LabeledTrace trace;
    chaos::DetectionCounts counts;
    std::optional<std::int64_t> attf;
    bool late = false;
};

inline chaos::LabeledTrace make_trace(std::int64_t first, std::int64_t last, std::int64_t step,
                                      std::vector<std::int64_t> positives, std::int64_t failure,
                                      std::int64_t window) {
    chaos::LabeledTrace t;
    for (std::int64_t s = first; s <= last; s += step) {
        t.slots.push_back(s);
        t.verdicts.push_back(std::find(positives.begin(), positives.end(), s) != positives.end());
    }
    t.failure_point = failure;
    t.decision_window = window;
    return t;
}

inline std::vector<EvalFixture> eval_fixtures() {
    std::vector<std::int64_t> every(10);
    for (std::int64_t i = 0; i < 10; ++i) every[static_cast<std::size_t>(i)] = i;
    chaos::LabeledTrace sparse;
    sparse.slots = {0, 100, 130, 1700, 1800};
    sparse.verdicts = {false, false, true, false, true};
    sparse.failure_point = 1800;
    sparse.decision_window = 100;
    return {
        {"all_in_window", make_trace(0, 10, 1, {6, 8, 10}, 10, 5), {3, 0, 0}, 0},
        {"silent", make_trace(0, 10, 1, {}, 10, 5), {0, 0, 1}, std::nullopt},
        {"three_in_two_before", make_trace(0, 20, 1, {3, 7, 15, 18, 20}, 20, 5), {3, 2, 0}, 12},
        {"left_boundary", make_trace(0, 20, 1, {15}, 20, 5), {1, 0, 0}, 0},
        {"far_ahead", sparse, {1, 1, 0}, 1570},
        {"late_only", make_trace(0, 15, 1, {12}, 10, 3), {0, 1, 1}, std::nullopt, true},
        {"one_before_boundary", make_trace(0, 20, 1, {14, 16}, 20, 5), {1, 1, 0}, 1},
        {"zero_width_window", make_trace(0, 10, 1, {9, 10}, 10, 0), {1, 1, 0}, 1},
        {"off_grid_failure", make_trace(0, 200, 10, {180, 200}, 195, 30), {1, 1, 0}, 0},
        {"always_on", make_trace(0, 9, 1, every, 9, 2), {3, 7, 0}, 7},
    };
}

#include "chaos/detectors.hpp"

// Threshold detectors on short streams with thresholds worked out by hand.
// `feedback` is the FT-X normal-state signal per step; empty means the
// detector's own default (normal unless it is reporting a failure).
struct ThresholdFixture {
    std::vector<double> training;
    double beta;
    chaos::BoundaryMode mode;
    std::vector<double> stream;
    std::vector<bool> feedback;
    std::vector<bool> ft_verdicts;
    std::vector<bool> ftx_verdicts;
    double ft;        // static threshold
    double ftx_final; // FT-X threshold after the last step
};

inline std::vector<ThresholdFixture> threshold_fixtures() {
    using chaos::BoundaryMode;
    const bool T = true, F = false;
    return {
        {{1, 2, 3}, 2, BoundaryMode::upper, {5, 6, 7, 6.5, 2}, {T, T, T, T, T},
         {F, F, T, T, F}, {F, F, F, F, F}, 6, 14},
        {{1, 2, 3}, 2, BoundaryMode::upper, {5, 6, 7, 6.5, 2}, {F, F, F, F, F},
         {F, F, T, T, F}, {F, F, T, T, F}, 6, 6},
        {{80, 60, 95}, 2, BoundaryMode::lower, {40, 30, 25, 10, 35}, {T, T, T, T, T},
         {F, F, T, T, F}, {F, F, F, T, F}, 30, 5},
        {{4}, 1.25, BoundaryMode::upper, {5, 5.25, 4, 8, 4.5}, {T, F, T, T, T},
         {F, T, F, T, F}, {F, F, F, T, F}, 5, 10},
        {{2, 2, 2}, 1.5, BoundaryMode::upper, {3, 3, 3.5, 1}, {F, F, F, F},
         {F, F, T, F}, {F, F, T, F}, 3, 3},
        {{0.5, 0.25}, 1, BoundaryMode::upper, {0.5, 0.75, 0.75, 0.5}, {T, T, T, T},
         {F, T, T, F}, {F, T, F, F}, 0.5, 0.75},
        {{8, 16}, 4, BoundaryMode::lower, {2, 1, 4, 0.5}, {T, T, T, F},
         {F, T, F, T}, {F, F, F, F}, 2, 0.25},
        {{0}, 2, BoundaryMode::upper, {0, 0.25, -0.25}, {T, T, T},
         {F, T, F}, {F, T, F}, 0, 0.5},
        {{1, 4, 2}, 3, BoundaryMode::upper, {12, 12.5, 3, 13}, {F, F, T, T},
         {F, T, F, T}, {F, T, F, T}, 12, 39},
        {{0.25, 0.5, 0.75, 1, 0.5}, 2, BoundaryMode::upper, {1.5, 2.5, 1.25, 3, 2}, {},
         {F, T, F, T, F}, {F, F, F, F, F}, 2, 6},
    };
}
