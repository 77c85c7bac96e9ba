// Command-line front end: select, analyze, detect, generate, evaluate, sweep.
//
// Every flag can also be given as "key = value" in the file passed to
// --config; flags on the command line win.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaos/aging.hpp"
#include "chaos/entropy.hpp"
#include "chaos/error.hpp"
#include "chaos/evaluation.hpp"
#include "chaos/io.hpp"
#include "chaos/pipeline.hpp"
#include "chaos/plotdata.hpp"
#include "chaos/sweep.hpp"
#include "chaos/varselect.hpp"

namespace {

using namespace chaos;
using json = nlohmann::ordered_json;

// 0 success, 1 unexpected, 2.. one per stage in Stage order.
int exit_code(Stage s) { return 2 + static_cast<int>(s); }

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }
void info(const std::string& msg) { std::cerr << msg << '\n'; }

/// "-" means stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path == "-" || path.empty()) return;
        file_.open(path);
        if (!file_) throw Error(Stage::output, "cannot write '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void flush() { stream().flush(); }

private:
    std::ofstream file_;
};

MetricMatrix load(const std::string& path) {
    if (path.empty()) throw ParameterError("no input file given");
    IngestResult r = ingest(path);
    for (const auto& w : r.warnings) warn(path + ": " + w);
    return std::move(r.matrix);
}

std::map<const CLI::App*, std::string> config_paths;

void add_config(CLI::App* app) {
    app->add_option("--config", config_paths[app],
                    "Flat key = value file; keys are the long flag names");
}

/// Fills every option of `app` that the command line left unset from its
/// config file. Keys meant for other verbs are skipped.
void apply_config(CLI::App& root, CLI::App* app) {
    const std::string& path = config_paths[app];
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw Error(Stage::config, "cannot open config file '" + path + "'");
    std::vector<CLI::ConfigItem> items;
    try {
        items = app->get_config_formatter()->from_config(in);
    } catch (const CLI::Error& e) {
        throw Error(Stage::config, path + ": " + e.what());
    }
    for (const auto& item : items) {
        // Top-level keys apply to every verb; a [verb] section only to that verb.
        const bool scoped = item.parents.size() == 1 && item.parents[0] == app->get_name();
        if ((!item.parents.empty() && !scoped) || item.name == "++" || item.name == "--") continue;
        if (item.name == "config") throw Error(Stage::config, path + ": config files do not nest");
        CLI::Option* op = app->get_option_no_throw("--" + item.name);
        if (op == nullptr) {
            bool known = false;
            for (const auto* sub : root.get_subcommands({}))
                known = known || sub->get_option_no_throw("--" + item.name) != nullptr;
            if (!known) warn(path + ": unknown key '" + item.name + "'");
            continue;
        }
        if (op->count() > 0) continue;
        try {
            for (const auto& v : item.inputs) op->add_result(v);
            op->run_callback();
        } catch (const CLI::Error& e) {
            throw Error(Stage::config, path + ": key '" + item.name + "': " + e.what());
        }
    }
}

struct EntropyOpts {
    EntropyConfig cfg;
    std::size_t threads = 1;
};

void add_entropy_opts(CLI::App* app, EntropyOpts& o) {
    app->add_option("--m", o.cfg.m, "Embedding dimension")->capture_default_str();
    app->add_option("--scales", o.cfg.scales, "Number of scales T")->capture_default_str();
    app->add_option("--r_factor,--r-factor", o.cfg.r_factor, "Tolerance factor on tr(S)")
        ->capture_default_str();
    app->add_option("--window", o.cfg.window.length, "Window length N")->capture_default_str();
    app->add_option("--stride", o.cfg.window.stride, "Window advance")->capture_default_str();
    app->add_option("--threads", o.threads, "Worker threads for window entropies")
        ->capture_default_str();
}

void add_anneal_opts(CLI::App* app, AnnealConfig& a) {
    app->add_option("--temperature", a.initial_temperature, "Initial annealing temperature")
        ->capture_default_str();
    app->add_option("--cooling", a.cooling_rate, "Geometric cooling rate")->capture_default_str();
    app->add_option("--iterations", a.max_iterations, "Annealing iterations")->capture_default_str();
    app->add_option("--seed", a.seed, "Annealing seed")->capture_default_str();
}

BoundaryMode parse_mode(const std::string& s) {
    if (s == "upper") return BoundaryMode::upper;
    if (s == "lower") return BoundaryMode::lower;
    throw ParameterError("mode must be 'upper' or 'lower', got '" + s + "'");
}


// ---------------------------------------------------------------- select

struct SelectOpts {
    std::string input;
    std::string output = "-";
    std::string elbow_csv;
    std::size_t k = 0;
    std::size_t k_min = 1;
    std::size_t k_max = 0;
    std::size_t selection_rows = 0;
    AnnealConfig anneal;
};

int run_select(const SelectOpts& o) {
    MetricMatrix x = load(o.input);
    if (o.selection_rows > 0 && o.selection_rows < x.rows()) x = x.slice_rows(0, o.selection_rows);
    std::vector<ElbowRow> rows;
    if (o.k > 0) rows = elbow_report(x, o.anneal, o.k, o.k);
    else rows = elbow_report(x, o.anneal, o.k_min, o.k_max);

    Output out(o.output);
    for (const auto& row : rows) {
        json j;
        j["k"] = row.k;
        j["gcd"] = row.best.gcd;
        j["variables"] = json::array();
        for (auto i : row.best.indices) j["variables"].push_back(x.names()[i]);
        out.stream() << j.dump() << '\n';
    }
    if (!o.elbow_csv.empty())
        export_plotdata(o.elbow_csv, [&](std::ostream& s) { write_elbow_csv(s, rows, x.names()); });
    return 0;
}

// --------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::string input;
    std::string output = "-";
    std::string profile_csv;
    long long profile_window = -1;
    std::vector<std::string> metrics;
    EntropyOpts entropy;
};

int run_analyze(const AnalyzeOpts& o) {
    o.entropy.cfg.validate();
    MetricMatrix x = load(o.input);
    if (!o.metrics.empty()) {
        std::vector<std::size_t> cols;
        for (const auto& n : o.metrics) cols.push_back(x.index_of(n));
        x = x.select_columns(cols);
    }
    const EntropyConfig& cfg = o.entropy.cfg;
    const std::size_t n = cfg.window.count(x.rows());
    if (n == 0)
        throw DataError("input has " + std::to_string(x.rows()) + " rows, fewer than one window of " +
                        std::to_string(cfg.window.length));

    std::vector<EntropyProfile> profiles(n);
    const std::size_t threads = std::max<std::size_t>(1, o.entropy.threads);
    auto work = [&](std::size_t first) {
        for (std::size_t k = first; k < n; k += threads)
            profiles[k] = mmse(x.slice_rows(cfg.window.begin(k), cfg.window.length), cfg);
    };
    std::vector<std::future<void>> jobs;
    for (std::size_t t = 1; t < threads; ++t) jobs.push_back(std::async(std::launch::async, work, t));
    work(0);
    for (auto& j : jobs) j.get();

    Output out(o.output);
    auto& s = out.stream();
    s << "slot,timestamp,ce,tolerance,undefined_scales";
    for (std::size_t t = 1; t <= cfg.scales; ++t) s << ",e" << t;
    s << '\n';
    std::size_t flagged = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = profiles[k];
        const std::size_t last = cfg.window.begin(k) + cfg.window.length - 1;
        s << last << ',' << format_timestamp(x.time, last) << ',' << format_double(p.composed) << ','
          << format_double(p.tolerance) << ',';
        for (std::size_t i = 0; i < p.undefined_scales.size(); ++i)
            s << (i ? ";" : "") << p.undefined_scales[i];
        for (double e : p.per_scale) s << ',' << format_double(e);
        s << '\n';
        flagged += p.flagged();
    }
    if (flagged > 0)
        warn(std::to_string(flagged) + " window(s) had undefined entropy at some scale (capped)");

    if (!o.profile_csv.empty()) {
        const long long idx = o.profile_window < 0 ? static_cast<long long>(n) + o.profile_window
                                                   : o.profile_window;
        if (idx < 0 || idx >= static_cast<long long>(n))
            throw ParameterError("profile_window " + std::to_string(o.profile_window) +
                                 " outside the " + std::to_string(n) + " windows");
        export_plotdata(o.profile_csv, [&](std::ostream& f) {
            write_profile_csv(f, profiles[static_cast<std::size_t>(idx)]);
        });
    }
    return 0;
}

// ---------------------------------------------------------------- detect

struct DetectOpts {
    PipelineConfig cfg;
    std::string metrics;  // comma list, or "auto"
    std::vector<std::string> detectors{"ft", "ftx", "shewhart"};
    std::string mode = "upper";
    std::string plot_csv;
};

int run_detect(DetectOpts& o) {
    PipelineConfig& cfg = o.cfg;
    if (o.metrics == "auto") {
        cfg.auto_select = true;
    } else if (!o.metrics.empty()) {
        std::stringstream ss(o.metrics);
        for (std::string name; std::getline(ss, name, ',');)
            if (!name.empty()) cfg.metrics.push_back(name);
    }
    cfg.detectors.clear();
    for (const auto& d : o.detectors) cfg.detectors.push_back(detector_kind_from_string(d));
    cfg.mode = parse_mode(o.mode);
    cfg.validate();

    const MetricMatrix x = load(cfg.input);
    std::optional<FailureLabel> label;
    if (!cfg.labels.empty()) label = read_label(cfg.labels);

    Output out(cfg.output);
    PipelineRun run;
    try {
        run = run_pipeline(cfg, x, [&](const DetectionReport& r) {
            out.stream() << to_json(r).dump() << '\n';
        });
    } catch (...) {
        out.flush();
        throw;
    }
    std::string chosen;
    for (const auto& n : run.selected) chosen += (chosen.empty() ? "" : ", ") + n;
    info("metrics: " + chosen);
    if (run.ce.empty()) warn("input shorter than one window; no reports");

    if (label) {
        const std::int64_t fp = label->slot(x.time);
        for (const auto& s : evaluate_run(run, fp, cfg.decision_window)) {
            const EvalResult r = aggregate(std::span<const TraceEvaluation>(&s.evaluation, 1));
            out.stream() << summary_json(s.detector, r).dump() << '\n';
        }
    }
    if (!o.plot_csv.empty())
        export_plotdata(o.plot_csv, [&](std::ostream& s) { write_ce_series_csv(s, run); });
    return 0;
}

// -------------------------------------------------------------- generate

struct GenerateOpts {
    TraceSpec spec;
    std::string output;
    std::size_t count = 1;
    double start_time = -1.0;
    bool allow_no_failure = false;
};

int run_generate(GenerateOpts& o) {
    if (o.output.empty()) throw ParameterError("--output is required");
    if (o.count < 1) throw ParameterError("count must be >= 1");
    if (o.start_time >= 0.0) o.spec.start_time = o.start_time;
    o.spec.require_failure = !o.allow_no_failure;

    const bool many = o.count > 1;
    if (many) {
        std::error_code ec;
        std::filesystem::create_directories(o.output, ec);
        if (ec) throw Error(Stage::output, "cannot create '" + o.output + "': " + ec.message());
    }
    for (std::size_t i = 0; i < o.count; ++i) {
        TraceSpec spec = o.spec;
        spec.seed = o.spec.seed + i;
        const GeneratedTrace tr = generate_trace(spec);
        const std::string path =
            many ? (std::filesystem::path(o.output) / ("trace_" + std::to_string(spec.seed) + ".csv"))
                       .string()
                 : o.output;
        write_metrics_csv(path, tr.metrics);
        FailureLabel label;
        if (tr.failure) {
            label.failure_slot = static_cast<std::int64_t>(*tr.failure);
            label.failure_timestamp = tr.metrics.time.at(*tr.failure);
        }
        label.extra["seed"] = spec.seed;
        label.extra["rows"] = tr.metrics.rows();
        if (tr.failure) write_label(label_path_for(path), label);
        info(path + ": " + std::to_string(tr.metrics.rows()) + " rows, failure " +
             (tr.failure ? "at slot " + std::to_string(*tr.failure) : std::string("none")));
    }
    return 0;
}

// -------------------------------------------------------------- evaluate

struct EvaluateOpts {
    std::vector<std::string> reports;
    std::vector<std::string> labels;
    std::int64_t decision_window = 100;
    std::string output = "-";
};

/// Failure slot for one report file: taken from the label, or mapped from a
/// timestamp through the slot/timestamp pairs the reports carry.
std::int64_t label_slot(const FailureLabel& label, const std::vector<DetectionReport>& reports) {
    if (label.failure_slot) return *label.failure_slot;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const auto& a = reports.front();
        const auto& b = reports[i];
        if (b.slot == a.slot) continue;
        const std::int64_t interval = (b.timestamp - a.timestamp) / (b.slot - a.slot);
        if (interval <= 0) break;
        return label.slot(TimeAxis{a.timestamp - a.slot * interval, interval, false});
    }
    throw DataError("label has only a timestamp and the reports cannot map it to a slot",
                    Stage::evaluation);
}

int run_evaluate(const EvaluateOpts& o) {
    if (o.reports.empty()) throw ParameterError("no report files given");
    if (o.labels.size() != o.reports.size())
        throw ParameterError("need one label file per report file");
    if (o.decision_window < 0) throw ParameterError("decision_window must be >= 0");

    std::map<std::string, std::vector<TraceEvaluation>> per_detector;
    std::vector<std::string> order;
    for (std::size_t f = 0; f < o.reports.size(); ++f) {
        std::ifstream in(o.reports[f]);
        if (!in) throw DataError("cannot open '" + o.reports[f] + "'", Stage::evaluation);
        const auto reports = read_reports(in);
        const std::int64_t fp = label_slot(read_label(o.labels[f]), reports);
        std::map<std::string, LabeledTrace> traces;
        for (const auto& r : reports) {
            auto [it, fresh] = traces.try_emplace(r.detector);
            if (fresh) {
                it->second.failure_point = fp;
                it->second.decision_window = o.decision_window;
                if (std::find(order.begin(), order.end(), r.detector) == order.end())
                    order.push_back(r.detector);
            }
            it->second.slots.push_back(r.slot);
            it->second.verdicts.push_back(r.verdict);
        }
        for (auto& [id, t] : traces) per_detector[id].push_back(evaluate_trace(t));
    }

    Output out(o.output);
    for (const auto& id : order) {
        const EvalResult r = aggregate(std::span<const TraceEvaluation>(per_detector[id]));
        out.stream() << summary_json(id, r).dump() << '\n';
    }
    return 0;
}

// ----------------------------------------------------------------- sweep

struct SweepOpts {
    std::vector<std::string> inputs;
    std::vector<std::string> labels;
    std::string indicator = "mmse";
    std::string family = "all";
    std::vector<double> betas{1.0, 1.05, 1.1, 1.2, 1.3, 1.5, 1.75, 2.0, 2.5, 3.0, 5.0, 10.0, 20.0};
    std::vector<std::size_t> windows{2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    std::vector<double> epsilons{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5};
    std::size_t p_run = 4;
    std::string mode = "upper";
    Protocol protocol;
    std::string output = "-";
    EntropyOpts entropy;
};

int run_sweep(const SweepOpts& o) {
    if (o.inputs.empty()) throw ParameterError("no input traces given");
    if (!o.labels.empty() && o.labels.size() != o.inputs.size())
        throw ParameterError("need one label file per input, or none to use sidecars");
    const BoundaryMode mode = parse_mode(o.mode);
    std::vector<DetectorSpec> grid;
    if (o.family == "all" || o.family == "ft") {
        auto g = beta_grid(DetectorKind::ft, o.betas, mode);
        grid.insert(grid.end(), g.begin(), g.end());
    }
    if (o.family == "all" || o.family == "ftx") {
        auto g = beta_grid(DetectorKind::ftx, o.betas, mode);
        grid.insert(grid.end(), g.begin(), g.end());
    }
    if (o.family == "all" || o.family == "shewhart") {
        auto g = shewhart_grid(o.windows, o.epsilons, o.p_run);
        grid.insert(grid.end(), g.begin(), g.end());
    }
    if (grid.empty()) throw ParameterError("unknown detector family '" + o.family + "'");
    if (o.indicator == "mmse") o.entropy.cfg.validate();

    std::vector<IndicatorTrace> traces;
    for (std::size_t i = 0; i < o.inputs.size(); ++i) {
        const MetricMatrix x = load(o.inputs[i]);
        const FailureLabel label =
            read_label(o.labels.empty() ? label_path_for(o.inputs[i]) : o.labels[i]);
        const std::int64_t fp = label.slot(x.time);
        if (o.indicator == "mmse")
            traces.push_back(ce_indicator(x, o.entropy.cfg, fp, o.entropy.threads));
        else
            traces.push_back(raw_indicator(x, x.index_of(o.indicator), o.entropy.cfg.window, fp));
    }

    // Best cells go to stdout, or to stderr when the grid itself does.
    // Each family is swept on its own so every family reports its best cell.
    std::vector<SweepResult> results;
    SweepResult all;
    for (DetectorKind k : {DetectorKind::ft, DetectorKind::ftx, DetectorKind::shewhart}) {
        std::vector<DetectorSpec> sub;
        for (const auto& s : grid)
            if (s.kind == k) sub.push_back(s);
        if (sub.empty()) continue;
        SweepResult r;
        try {
            r = sweep(sub, traces, o.protocol);
        } catch (const Error& e) {
            throw Error(Stage::detection, e.what());
        }
        if (r.best) {
            const auto& c = r.cells[*r.best];
            json j;
            j["best"] = c.spec.id();
            j["indicator"] = o.indicator;
            const json metrics = to_json(c.result);
            for (const auto& [key, v] : metrics.items()) j[key] = v;
            (o.output == "-" ? std::cerr : std::cout) << j.dump() << '\n';
        }
        for (auto& c : r.cells) all.cells.push_back(std::move(c));
    }
    Output out(o.output);
    write_sweep_csv(out.stream(), all);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Software aging failure detection with multidimensional multiscale entropy"};
    app.require_subcommand(1);

    SelectOpts sel;
    auto* select = app.add_subcommand("select", "Variable-selection elbow report");
    add_config(select);
    select->add_option("--input", sel.input, "Metric CSV");
    select->add_option("--output", sel.output, "JSON-lines report ('-' for stdout)");
    select->add_option("--elbow_csv", sel.elbow_csv, "Elbow curve CSV");
    select->add_option("--k", sel.k, "Single subset size (0: sweep k_min..k_max)");
    select->add_option("--k_min", sel.k_min, "Smallest subset size")->capture_default_str();
    select->add_option("--k_max", sel.k_max, "Largest subset size (0: all metrics)");
    select->add_option("--selection_rows", sel.selection_rows, "Use only the first rows (0: all)");
    add_anneal_opts(select, sel.anneal);

    AnalyzeOpts an;
    auto* analyze = app.add_subcommand("analyze", "Composed entropy over sliding windows");
    add_config(analyze);
    analyze->add_option("--input", an.input, "Metric CSV");
    analyze->add_option("--output", an.output, "CE series CSV ('-' for stdout)");
    analyze->add_option("--metrics", an.metrics, "Metric names (default: all)")->delimiter(',');
    analyze->add_option("--profile_csv", an.profile_csv, "Per-scale table of one window");
    analyze->add_option("--profile_window", an.profile_window,
                        "Window index for --profile_csv (negative counts from the end)")
        ->capture_default_str();
    add_entropy_opts(analyze, an.entropy);

    DetectOpts det;
    det.cfg.entropy.window.stride = 1;
    auto* detect = app.add_subcommand("detect", "Full pipeline: entropy, detectors, reports");
    add_config(detect);
    detect->add_option("--input", det.cfg.input, "Metric CSV");
    detect->add_option("--output", det.cfg.output, "JSON-lines reports ('-' for stdout)");
    detect->add_option("--labels", det.cfg.labels, "Failure label JSON; appends a summary");
    detect->add_option("--metrics", det.metrics, "Comma-separated metric names, or 'auto'");
    detect->add_option("--select_k", det.cfg.select_k, "Subset size for auto selection")
        ->capture_default_str();
    detect->add_option("--selection_rows", det.cfg.selection_rows,
                       "Training prefix for auto selection (0: one window)");
    add_anneal_opts(detect, det.cfg.anneal);
    EntropyOpts det_entropy;
    add_entropy_opts(detect, det_entropy);
    detect->add_option("--detectors", det.detectors, "Detector roster")->delimiter(',')
        ->capture_default_str();
    detect->add_option("--ft_beta", det.cfg.ft_beta, "FT fluctuation factor")->capture_default_str();
    detect->add_option("--ftx_beta", det.cfg.ftx_beta, "FT-X fluctuation factor")
        ->capture_default_str();
    detect->add_option("--mode", det.mode, "Threshold boundary: upper or lower")
        ->capture_default_str();
    detect->add_option("--training_windows", det.cfg.training_windows,
                       "CE values FT and FT-X train on")
        ->capture_default_str();
    detect->add_option("--shewhart_window", det.cfg.shewhart.window, "Shewhart N'")
        ->capture_default_str();
    detect->add_option("--epsilon", det.cfg.shewhart.epsilon, "Shewhart deviation threshold")
        ->capture_default_str();
    detect->add_option("--p_run", det.cfg.shewhart.p_run, "Exceedances confirming a change")
        ->capture_default_str();
    detect->add_option("--decision_window", det.cfg.decision_window, "Decision window L (slots)")
        ->capture_default_str();
    detect->add_option("--plot_csv", det.plot_csv, "CE series with verdict columns");

    GenerateOpts gen;
    auto* generate = app.add_subcommand("generate", "Synthetic aging traces with failure labels");
    add_config(generate);
    generate->add_option("--output", gen.output, "CSV path, or a directory when count > 1")
        ;
    generate->add_option("--count", gen.count, "Number of traces (seeds seed .. seed+count-1)")
        ->capture_default_str();
    generate->add_option("--seed", gen.spec.seed, "First seed")->capture_default_str();
    generate->add_option("--p", gen.spec.p, "Metric channels")->capture_default_str();
    generate->add_option("--length", gen.spec.length, "Slots before truncation")
        ->capture_default_str();
    generate->add_option("--noise_level", gen.spec.noise_level, "Background noise")
        ->capture_default_str();
    generate->add_option("--failure_amplitude", gen.spec.failure_amplitude, "Failure burst size")
        ->capture_default_str();
    generate->add_option("--failure_correlation", gen.spec.failure_correlation,
                         "Cross-channel burst correlation")
        ->capture_default_str();
    generate->add_option("--persistence", gen.spec.persistence, "State stickiness")
        ->capture_default_str();
    generate->add_option("--peak_failure_probability", gen.spec.peak_failure_probability,
                         "Per-slot failure probability at the peak")
        ->capture_default_str();
    generate->add_option("--start_time", gen.start_time, "Model time of slot 0 (default 0.6 horizon)");
    generate->add_option("--alpha", gen.spec.model.alpha, "Weibull scale")->capture_default_str();
    generate->add_option("--shape", gen.spec.model.shape, "Weibull shape")->capture_default_str();
    generate->add_option("--horizon", gen.spec.model.horizon, "Model time of the last slot")
        ->capture_default_str();
    generate->add_option("--workload_period", gen.spec.workload_period, "Workload cycle in slots")
        ->capture_default_str();
    generate->add_option("--workload_amplitude", gen.spec.workload_amplitude, "Workload swing")
        ->capture_default_str();
    generate->add_option("--sustained_run", gen.spec.sustained_run,
                         "Failure slots in a row that make the label")
        ->capture_default_str();
    generate->add_flag("--allow_no_failure", gen.allow_no_failure,
                       "Write traces that never reach a sustained failure");

    EvaluateOpts ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score report files against failure labels");
    add_config(evaluate);
    evaluate->add_option("--reports", ev.reports, "JSON-lines report files");
    evaluate->add_option("--labels", ev.labels, "Label files, one per report file");
    evaluate->add_option("--decision_window", ev.decision_window, "Decision window L (slots)")
        ->capture_default_str();
    evaluate->add_option("--output", ev.output, "JSON-lines metrics ('-' for stdout)");

    SweepOpts sw;
    sw.entropy.cfg.window.stride = 10;
    auto* sweepc = app.add_subcommand("sweep", "Parameter grids over labeled traces");
    add_config(sweepc);
    sweepc->add_option("--inputs", sw.inputs, "Trace CSVs");
    sweepc->add_option("--labels", sw.labels, "Label files (default: sidecars)");
    sweepc->add_option("--indicator", sw.indicator, "'mmse' or a raw metric name")
        ->capture_default_str();
    sweepc->add_option("--family", sw.family, "ft, ftx, shewhart or all")->capture_default_str();
    sweepc->add_option("--betas", sw.betas, "Beta grid")->delimiter(',');
    sweepc->add_option("--windows", sw.windows, "Shewhart N' grid")->delimiter(',');
    sweepc->add_option("--epsilons", sw.epsilons, "Shewhart epsilon grid")->delimiter(',');
    sweepc->add_option("--p_run", sw.p_run, "Exceedances confirming a change")->capture_default_str();
    sweepc->add_option("--mode", sw.mode, "Threshold boundary: upper or lower")
        ->capture_default_str();
    sweepc->add_option("--decision_window", sw.protocol.decision_window, "Decision window L")
        ->capture_default_str();
    sweepc->add_option("--training_gap", sw.protocol.training_gap,
                       "Slots between the end of training and the decision window")
        ->capture_default_str();
    sweepc->add_option("--output", sw.output, "Grid CSV ('-' for stdout)");
    add_entropy_opts(sweepc, sw.entropy);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code(Stage::config);
    }

    try {
        for (CLI::App* sub : app.get_subcommands()) apply_config(app, sub);
        if (*select) return run_select(sel);
        if (*analyze) return run_analyze(an);
        if (*detect) {
            det.cfg.entropy = det_entropy.cfg;
            det.cfg.threads = det_entropy.threads;
            return run_detect(det);
        }
        if (*generate) return run_generate(gen);
        if (*evaluate) return run_evaluate(ev);
        if (*sweepc) return run_sweep(sw);
    } catch (const Error& e) {
        std::cout.flush();
        std::cerr << "error [" << to_string(e.stage()) << "]: " << e.what() << '\n';
        return exit_code(e.stage());
    } catch (const std::exception& e) {
        std::cout.flush();
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
