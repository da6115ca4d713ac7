#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "emglrt/config.hpp"
#include "emglrt/report.hpp"

namespace fs = std::filesystem;
using namespace emglrt;

namespace {

struct Options {
    std::string config_path;
    std::string out = "out";
    std::string records;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string detectors;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path, "flat key = value config file");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "master seed (overrides scenario.seed)");
    cmd->add_option("--trials", o.trials, "paired trials per point (overrides sweep.trials)");
    cmd->add_option("--detectors", o.detectors, "comma-separated detector list (overrides detector.list)");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Options& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed) c.scenario.seed = *o.seed;
    if (o.trials) c.sweep.trials = *o.trials;
    if (!o.detectors.empty()) set_config_value(c, "detector.list", o.detectors);
    return c;
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

// Detector names and (axis, value) points in order of first appearance.
struct Grouped {
    std::vector<std::string> detectors;
    std::vector<std::pair<std::string, double>> points;
    std::map<std::pair<std::string, double>, std::vector<TrialRecord>> by_point;
};

Grouped group(const std::vector<TrialRecord>& records) {
    Grouped g;
    for (const auto& r : records) {
        if (std::find(g.detectors.begin(), g.detectors.end(), r.detector) == g.detectors.end())
            g.detectors.push_back(r.detector);
        const auto key = std::make_pair(r.axis, r.value);
        auto [it, fresh] = g.by_point.try_emplace(key);
        if (fresh) g.points.push_back(key);
        it->second.push_back(r);
    }
    return g;
}

std::vector<SummaryRow> summarize_records(const std::vector<TrialRecord>& records, const Metric& metric) {
    const auto g = group(records);
    std::vector<SummaryRow> rows;
    for (const auto& p : g.points) {
        auto part = summarize(g.by_point.at(p), g.detectors, metric, p.first, p.second);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::string summary_name(const std::vector<SummaryRow>& rows) {
    return rows.empty() || rows.front().axis.empty() ? "summary.csv" : "sweep_" + rows.front().axis + ".csv";
}

void emit(const Options& o, const RunConfig& c, const std::string& cmd, const std::vector<TrialRecord>& records,
          const std::vector<SummaryRow>& rows, const std::vector<TimingRow>& timing) {
    const fs::path out(o.out);
    const std::string name = summary_name(rows);
    write_records((out / "records.jsonl").string(), records);
    write_summary((out / name).string(), rows);
    write_timing((out / "timing.csv").string(), timing);
    write_plot_script((out / "plot.py").string(), {name});
    write_manifest((out / "manifest.json").string(), c, cmd);
    std::cout << summary_csv(rows);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive GLRT detection experiments"};
    app.require_subcommand(1);
    Options o;
    auto* simulate = app.add_subcommand("simulate", "run one scenario point");
    auto* sweep = app.add_subcommand("sweep", "run every value of the configured sweep axis");
    auto* calibrate = app.add_subcommand("calibrate", "thresholds from saved records");
    auto* report = app.add_subcommand("report", "re-emit summaries from saved records");
    for (auto* cmd : {simulate, sweep, calibrate, report}) add_common(cmd, o);
    for (auto* cmd : {calibrate, report})
        cmd->add_option("--records", o.records, "records file (default <out>/records.jsonl)");

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = command_line(argc, argv);

    try {
        const RunConfig c = resolve(o);
        if (simulate->parsed()) {
            const auto specs = detector_specs(c);
            if (c.sweep.trials < 1) throw Error(ErrorKind::Config, "need at least one trial");
            DetectorTiming t;
            const auto records = run_point(c.scenario, specs, c.sweep.trials, o.threads, &t);
            std::vector<std::string> names;
            for (const auto& s : specs) names.emplace_back(to_string(s.kind));
            const auto rows = summarize(records, names, c.sweep.metric, "", 0.0);
            std::vector<TimingRow> timing;
            for (const auto& n : names) timing.push_back({"", 0.0, n, t[n]});
            emit(o, c, cmd, records, rows, timing);
        } else if (sweep->parsed()) {
            const auto result = run_sweep(c.sweep, c.scenario, detector_specs(c), o.threads);
            emit(o, c, cmd, result.records, result.rows, result.timing);
        } else {
            const std::string path = o.records.empty() ? (fs::path(o.out) / "records.jsonl").string() : o.records;
            const auto records = read_records(path);
            const auto rows = summarize_records(records, c.sweep.metric);
            if (calibrate->parsed()) {
                std::cout << "axis,value,detector,metric,pfa,eta,metric_value\n";
                for (const auto& r : rows)
                    std::cout << r.axis << ',' << format_double(r.value) << ',' << r.detector << ',' << r.metric << ','
                              << format_double(r.pfa) << ',' << format_double(r.eta) << ','
                              << format_double(r.metric_value) << '\n';
                write_summary((fs::path(o.out) / "calibration.csv").string(), rows);
            } else {
                const std::string name = summary_name(rows);
                write_summary((fs::path(o.out) / name).string(), rows);
                write_plot_script((fs::path(o.out) / "plot.py").string(), {name});
                write_manifest((fs::path(o.out) / "manifest.json").string(), c, cmd);
                std::cout << summary_csv(rows);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Config ? 2 : 1;
    }
    return 0;
}
