#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "chaos/error.hpp"
#include "chaos/timeseries.hpp"

namespace chaos {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
bool parse_whole(std::string_view s, T& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

inline bool is_missing(std::string_view s) {
    if (s.empty()) return true;
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "na" || lower == "nan" || lower == "null";
}

} // namespace detail

/// Parses "YYYY-MM-DDTHH:MM:SS" (space also accepted as separator, optional
/// trailing Z) to UTC epoch seconds.
inline std::optional<std::int64_t> parse_iso8601(std::string_view s) {
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':')
        return std::nullopt;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!detail::parse_whole(s.substr(0, 4), y) || !detail::parse_whole(s.substr(5, 2), mo) ||
        !detail::parse_whole(s.substr(8, 2), d) || !detail::parse_whole(s.substr(11, 2), h) ||
        !detail::parse_whole(s.substr(14, 2), mi) || !detail::parse_whole(s.substr(17, 2), sec))
        return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
    const auto days_since = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days_since) * 86400 + h * 3600 + mi * 60 + sec;
}

inline std::string format_iso8601(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    const auto days_since = static_cast<int>(std::floor(static_cast<double>(epoch_seconds) / 86400.0));
    const std::int64_t rem = epoch_seconds - static_cast<std::int64_t>(days_since) * 86400;
    const year_month_day ymd{sys_days{days{days_since}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error(Stage::output, "cannot format value");
    return std::string(buf, ptr);
}

struct IngestResult {
    MetricMatrix matrix;
    std::vector<std::string> warnings;
};

/// Reads a metric CSV. The first column is the timestamp (ISO-8601 or an
/// integer slot); the rest are numeric metrics named in the header row.
///
/// The sampling interval is the smallest step between consecutive timestamps.
/// Missing timestamps and empty cells are forward-filled with a warning; more
/// than kMaxFillableGap consecutive fills is an error.
inline IngestResult read_metrics_csv(std::istream& in, std::optional<std::int64_t> interval = {}) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) -> DataError {
        return DataError("line " + std::to_string(line_no) + ": " + what);
    };

    std::vector<std::string> names;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() < 2) throw fail("header needs a timestamp column and at least one metric");
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (cells[i].empty()) throw fail("empty metric name in column " + std::to_string(i + 1));
            names.emplace_back(cells[i]);
        }
        break;
    }
    if (names.empty()) throw DataError("no header row");
    {
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw DataError("duplicate metric name '" + *dup + "'");
    }

    struct Raw {
        std::int64_t t;
        std::vector<std::optional<double>> v;
        std::size_t line;
    };
    std::vector<Raw> raw;
    std::optional<bool> calendar;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() != names.size() + 1)
            throw fail("expected " + std::to_string(names.size() + 1) + " fields, found " +
                       std::to_string(cells.size()));
        std::int64_t t = 0;
        bool is_cal = false;
        if (!detail::parse_whole(cells[0], t)) {
            const auto iso = parse_iso8601(cells[0]);
            if (!iso) throw fail("unparsable timestamp '" + std::string(cells[0]) + "'");
            t = *iso;
            is_cal = true;
        }
        if (calendar && *calendar != is_cal) throw fail("mixed timestamp formats");
        calendar = is_cal;
        if (!raw.empty() && t <= raw.back().t) throw fail("timestamps not strictly increasing");
        Raw r{t, {}, line_no};
        r.v.reserve(names.size());
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (detail::is_missing(cells[i])) {
                r.v.emplace_back();
                continue;
            }
            double x = 0.0;
            if (!detail::parse_whole(cells[i], x) || !std::isfinite(x))
                throw fail("unparsable value '" + std::string(cells[i]) + "' for metric '" +
                           names[i - 1] + "'");
            r.v.emplace_back(x);
        }
        raw.push_back(std::move(r));
    }
    if (raw.empty()) throw DataError("no data rows");

    std::int64_t step = interval.value_or(0);
    if (step == 0) {
        for (std::size_t i = 1; i < raw.size(); ++i)
            step = step == 0 ? raw[i].t - raw[i - 1].t : std::min(step, raw[i].t - raw[i - 1].t);
        if (step == 0) step = *calendar ? 60 : 1;
    }
    if (step <= 0) throw ParameterError("sampling interval must be positive", Stage::ingestion);

    IngestResult out;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> fill_run(names.size(), 0);
    std::vector<double> last(names.size(), 0.0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        line_no = raw[i].line;
        if (i > 0) {
            const std::int64_t diff = raw[i].t - raw[i - 1].t;
            if (diff % step != 0) throw fail("timestamp off the sampling grid");
            const std::int64_t missing = diff / step - 1;
            if (missing > kMaxFillableGap)
                throw fail("gap of " + std::to_string(missing) + " missing samples exceeds " +
                           std::to_string(kMaxFillableGap));
            if (missing > 0) {
                out.warnings.push_back("line " + std::to_string(line_no) + ": forward-filled " +
                                       std::to_string(missing) + " missing sample(s)");
                for (std::int64_t k = 0; k < missing; ++k) rows.push_back(last);
                for (auto& f : fill_run) f += static_cast<std::size_t>(missing);
            }
        }
        std::vector<double> row(names.size());
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (raw[i].v[c]) {
                row[c] = *raw[i].v[c];
                fill_run[c] = 0;
                continue;
            }
            if (rows.empty()) throw fail("missing value for '" + names[c] + "' in the first row");
            if (++fill_run[c] > static_cast<std::size_t>(kMaxFillableGap))
                throw fail("more than " + std::to_string(kMaxFillableGap) +
                           " consecutive missing values for '" + names[c] + "'");
            row[c] = last[c];
            out.warnings.push_back("line " + std::to_string(line_no) + ": forward-filled '" +
                                   names[c] + "'");
        }
        last = row;
        rows.push_back(std::move(row));
    }
    out.matrix = MetricMatrix::from_rows(rows, names);
    out.matrix.time = TimeAxis{raw.front().t, step, *calendar};
    return out;
}

inline IngestResult ingest(const std::string& path, std::optional<std::int64_t> interval = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return read_metrics_csv(in, interval);
    } catch (const Error& e) {
        throw Error(e.stage(), path + ": " + e.what());
    }
}

inline std::string format_timestamp(const TimeAxis& axis, std::size_t row) {
    const std::int64_t t = axis.at(row);
    return axis.calendar ? format_iso8601(t) : std::to_string(t);
}

inline void write_metrics_csv(std::ostream& out, const MetricMatrix& x) {
    out << (x.time.calendar ? "timestamp" : "slot");
    for (const auto& n : x.names()) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < x.rows(); ++r) {
        out << format_timestamp(x.time, r);
        for (std::size_t c = 0; c < x.cols(); ++c) out << ',' << format_double(x(r, c));
        out << '\n';
    }
}

inline void write_metrics_csv(const std::string& path, const MetricMatrix& x) {
    std::ofstream out(path);
    if (!out) throw Error(Stage::output, "cannot write '" + path + "'");
    write_metrics_csv(out, x);
    if (!out) throw Error(Stage::output, "write to '" + path + "' failed");
}

/// Failure label stored next to a trace. `failure_slot` is a row index into
/// the trace; `failure_timestamp` is in the trace's own time units.
struct FailureLabel {
    std::optional<std::int64_t> failure_slot;
    std::optional<std::int64_t> failure_timestamp;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    /// Row index of the failure, resolved against the trace's time axis if
    /// only a timestamp was recorded.
    std::int64_t slot(const TimeAxis& axis) const {
        if (failure_slot) return *failure_slot;
        if (!failure_timestamp) throw DataError("label has no failure point", Stage::evaluation);
        const std::int64_t d = *failure_timestamp - axis.origin;
        if (d % axis.interval != 0)
            throw DataError("failure timestamp off the sampling grid", Stage::evaluation);
        return d / axis.interval;
    }
};

/// Sidecar path for a trace: "run.csv" -> "run.label.json".
inline std::string label_path_for(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    const auto slash = csv_path.find_last_of("/\\");
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? csv_path.substr(0, dot) : csv_path) + ".label.json";
}

inline void write_label(const std::string& path, const FailureLabel& label) {
    nlohmann::ordered_json j;
    if (label.failure_slot) j["failure_slot"] = *label.failure_slot;
    if (label.failure_timestamp) j["failure_timestamp"] = *label.failure_timestamp;
    for (const auto& [k, v] : label.extra.items()) j[k] = v;
    std::ofstream out(path);
    if (!out) throw Error(Stage::output, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

inline FailureLabel read_label(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label file '" + path + "'", Stage::evaluation);
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what(), Stage::evaluation);
    }
    FailureLabel label;
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "failure_slot") label.failure_slot = v.get<std::int64_t>();
            else if (k == "failure_timestamp") label.failure_timestamp = v.get<std::int64_t>();
            else label.extra[k] = v;
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what(), Stage::evaluation);
    }
    if (!label.failure_slot && !label.failure_timestamp)
        throw DataError(path + ": needs failure_slot or failure_timestamp", Stage::evaluation);
    return label;
}

/// One detector verdict for one CE step.
struct DetectionReport {
    std::int64_t timestamp = 0;
    std::int64_t slot = 0;  // row index of the window's last sample
    std::string detector;
    bool verdict = false;
    double ce = 0.0;
    bool training = false;
    std::optional<double> ft;
    std::optional<double> deviation;
    std::optional<std::size_t> changes_seen;
};

inline nlohmann::ordered_json to_json(const DetectionReport& r) {
    nlohmann::ordered_json j;
    j["timestamp"] = r.timestamp;
    j["slot"] = r.slot;
    j["detector"] = r.detector;
    j["verdict"] = r.verdict;
    j["ce"] = r.ce;
    if (r.training) j["training"] = true;
    if (r.ft) j["ft"] = *r.ft;
    if (r.deviation) j["d_n"] = *r.deviation;
    if (r.changes_seen) j["changes_seen"] = *r.changes_seen;
    return j;
}

inline DetectionReport report_from_json(const nlohmann::ordered_json& j) {
    DetectionReport r;
    r.timestamp = j.at("timestamp").get<std::int64_t>();
    r.slot = j.at("slot").get<std::int64_t>();
    r.detector = j.at("detector").get<std::string>();
    r.verdict = j.at("verdict").get<bool>();
    r.ce = j.at("ce").get<double>();
    r.training = j.value("training", false);
    if (j.contains("ft")) r.ft = j["ft"].get<double>();
    if (j.contains("d_n")) r.deviation = j["d_n"].get<double>();
    if (j.contains("changes_seen")) r.changes_seen = j["changes_seen"].get<std::size_t>();
    return r;
}

/// Reads the report records of a JSON-lines file, skipping summary lines.
inline std::vector<DetectionReport> read_reports(std::istream& in) {
    std::vector<DetectionReport> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::ordered_json::parse(line);
            if (j.contains("summary")) continue;
            out.push_back(report_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("report line " + std::to_string(line_no) + ": " + e.what(),
                            Stage::evaluation);
        }
    }
    return out;
}

} // namespace chaos
