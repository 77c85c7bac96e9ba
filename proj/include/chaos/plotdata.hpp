#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "chaos/entropy.hpp"
#include "chaos/error.hpp"
#include "chaos/io.hpp"
#include "chaos/pipeline.hpp"
#include "chaos/sweep.hpp"
#include "chaos/varselect.hpp"

// Tidy CSV tables for plotting. Every writer emits its header even when there
// are no rows.

namespace chaos {

namespace detail {

inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

} // namespace detail

inline void write_profile_csv(std::ostream& out, const EntropyProfile& profile) {
    out << "scale,entropy,undefined\n";
    for (std::size_t i = 0; i < profile.per_scale.size(); ++i) {
        const std::size_t tau = i + 1;
        const bool undef = std::find(profile.undefined_scales.begin(), profile.undefined_scales.end(),
                                     tau) != profile.undefined_scales.end();
        out << tau << ',' << format_double(profile.per_scale[i]) << ',' << (undef ? 1 : 0) << '\n';
    }
}

/// Variables are listed by name, separated by ';'.
inline void write_elbow_csv(std::ostream& out, std::span<const ElbowRow> rows,
                            const std::vector<std::string>& names) {
    out << "k,gcd,variables\n";
    for (const auto& row : rows) {
        out << row.k << ',' << format_double(row.best.gcd) << ',';
        for (std::size_t i = 0; i < row.best.indices.size(); ++i)
            out << (i ? ";" : "") << names.at(row.best.indices[i]);
        out << '\n';
    }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "detector,beta,window,epsilon,recall,precision,f1,attf,tp,fp,fn,best\n";
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& c = result.cells[i];
        const bool sh = c.spec.kind == DetectorKind::shewhart;
        out << to_string(c.spec.kind) << ',' << (sh ? "" : format_double(c.spec.beta)) << ','
            << (sh ? std::to_string(c.spec.shewhart.window) : "") << ','
            << (sh ? format_double(c.spec.shewhart.epsilon) : "") << ','
            << detail::cell(c.result.recall) << ',' << detail::cell(c.result.precision) << ','
            << detail::cell(c.result.f1) << ',' << detail::cell(c.result.attf) << ','
            << c.result.counts.tp << ',' << c.result.counts.fp << ',' << c.result.counts.fn << ','
            << (result.best && *result.best == i ? 1 : 0) << '\n';
    }
}

/// CE series with one 0/1 verdict column per detector.
inline void write_ce_series_csv(std::ostream& out, const PipelineRun& run) {
    out << "slot,timestamp,ce";
    for (const auto& id : run.detector_ids) out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < run.ce.size(); ++i) {
        out << run.slots[i] << ',' << run.timestamps[i] << ',' << format_double(run.ce[i]);
        for (const auto& v : run.verdicts) out << ',' << (v[i] ? 1 : 0);
        out << '\n';
    }
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Stage::output, "cannot write '" + path + "'");
    return out;
}

template <class Writer>
void export_plotdata(const std::string& path, Writer&& write) {
    std::ofstream out = open_output(path);
    write(out);
    out.flush();
    if (!out) throw Error(Stage::output, "write to '" + path + "' failed");
}

} // namespace chaos
