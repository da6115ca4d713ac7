#include "emglrt/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef EMGLRT_VERSION
#define EMGLRT_VERSION "0.0.0"
#endif

namespace emglrt {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    return f;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double parse_cell(const std::string& s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorKind::Io, "bad CSV number '" + s + "'");
    return v;
}

std::uint64_t parse_count(const std::string& s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorKind::Io, "bad CSV count '" + s + "'");
    return v;
}

} // namespace

const char* version() noexcept { return EMGLRT_VERSION; }

std::string record_to_json(const TrialRecord& r) {
    json j;
    j["trial"] = r.trial;
    j["hypothesis"] = r.hypothesis == Hypothesis::H1 ? "H1" : "H0";
    j["detector"] = r.detector;
    j["statistic"] = r.ok() ? num(r.statistic) : json(nullptr);
    j["error"] = r.ok() ? json(nullptr) : json(r.error);
    j["n_hat"] = r.N_hat;
    j["iters"] = r.iters;
    j["sigma_i2"] = r.sigma_i2;
    j["nu"] = r.nu;
    j["Q"] = r.Q;
    j["N_true"] = r.N_true;
    j["tau_resid"] = r.tau_resid;
    j["fo_T"] = r.fo_T;
    j["axis"] = r.axis;
    j["value"] = r.value;
    return j.dump();
}

TrialRecord record_from_json(const std::string& line) {
    try {
        const json j = json::parse(line);
        TrialRecord r;
        r.trial = j.at("trial").get<std::uint64_t>();
        const auto hyp = j.at("hypothesis").get<std::string>();
        if (hyp != "H0" && hyp != "H1") throw Error(ErrorKind::Io, "bad hypothesis '" + hyp + "'");
        r.hypothesis = hyp == "H1" ? Hypothesis::H1 : Hypothesis::H0;
        r.detector = j.at("detector").get<std::string>();
        if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
        if (!j.at("statistic").is_null()) r.statistic = j.at("statistic").get<double>();
        else if (r.error.empty()) r.error = "NonFiniteStatistic";
        r.N_hat = j.at("n_hat").get<Eigen::Index>();
        r.iters = j.at("iters").get<int>();
        r.sigma_i2 = j.at("sigma_i2").get<double>();
        r.nu = j.at("nu").get<double>();
        r.Q = j.at("Q").get<Eigen::Index>();
        r.N_true = j.at("N_true").get<Eigen::Index>();
        r.tau_resid = j.at("tau_resid").get<double>();
        r.fo_T = j.at("fo_T").get<double>();
        r.axis = j.at("axis").get<std::string>();
        r.value = j.at("value").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed record: ") + e.what());
    }
}

void write_records(const std::string& path, const std::vector<TrialRecord>& records) {
    auto f = open_out(path);
    for (const auto& r : records) f << record_to_json(r) << '\n';
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

std::vector<TrialRecord> read_records(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot open records file '" + path + "'");
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) out.push_back(record_from_json(line));
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "# pd_at_pfa: eta = ceil((1-pfa)*n)-th smallest H0 statistic, metric = fraction of H1 above eta; "
        "min_error: eta minimizes (miss + false alarm)/2; failed trials count as -inf under H1 and +inf under H0\n";
    out += kSummaryHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.axis + ',' + format_double(r.value) + ',' + r.detector + ',' + r.metric + ',' + format_double(r.pfa) +
               ',' + format_double(r.eta) + ',' + format_double(r.metric_value) + ',' + format_double(r.mean_N_hat_H1) +
               ',' + format_double(r.mean_iters_H1) + ',' + std::to_string(r.failures_H1) + ',' +
               std::to_string(r.failures_H0) + ',' + std::to_string(r.trials) + '\n';
    }
    return out;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<SummaryRow> out;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kSummaryHeader) throw Error(ErrorKind::Io, "unexpected summary header");
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 12) throw Error(ErrorKind::Io, "summary row has wrong column count");
        SummaryRow r;
        r.axis = cells[0];
        r.value = parse_cell(cells[1]);
        r.detector = cells[2];
        r.metric = cells[3];
        r.pfa = parse_cell(cells[4]);
        r.eta = parse_cell(cells[5]);
        r.metric_value = parse_cell(cells[6]);
        r.mean_N_hat_H1 = parse_cell(cells[7]);
        r.mean_iters_H1 = parse_cell(cells[8]);
        r.failures_H1 = parse_count(cells[9]);
        r.failures_H0 = parse_count(cells[10]);
        r.trials = parse_count(cells[11]);
        out.push_back(r);
    }
    if (!header) throw Error(ErrorKind::Io, "summary has no header");
    return out;
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
    auto f = open_out(path);
    f << summary_csv(rows);
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

void write_timing(const std::string& path, const std::vector<TimingRow>& rows) {
    auto f = open_out(path);
    f << "axis,value,detector,seconds\n";
    for (const auto& r : rows)
        f << r.axis << ',' << format_double(r.value) << ',' << r.detector << ',' << format_double(r.seconds) << '\n';
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

void write_plot_script(const std::string& path, const std::vector<std::string>& csv_names) {
    auto f = open_out(path);
    f << R"(#!/usr/bin/env python3
"""Plot metric (and mean rank estimate) against the sweep axis for each summary CSV."""
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

HERE = os.path.dirname(os.path.abspath(__file__))
CSVS = [)";
    for (std::size_t i = 0; i < csv_names.size(); ++i) f << (i ? ", " : "") << json(csv_names[i]).dump();
    f << R"(]


def plot(name):
    df = pd.read_csv(os.path.join(HERE, name), comment="#")
    if df.empty:
        return
    axis = df["axis"].iloc[0] or "point"
    stem = os.path.splitext(name)[0]
    for column, label, suffix in (
        ("metric_value", df["metric"].iloc[0], ""),
        ("mean_N_hat_H1", "mean N_hat under H1", "_nhat"),
    ):
        fig, ax = plt.subplots()
        for det, g in df.groupby("detector", sort=False):
            ax.plot(g["value"], g[column], marker="o", label=det)
        ax.set_xlabel(axis)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.savefig(os.path.join(HERE, stem + suffix + ".png"), dpi=120)
        plt.close(fig)


if __name__ == "__main__":
    for name in sys.argv[1:] or CSVS:
        plot(name)
)";
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

void write_manifest(const std::string& path, const RunConfig& config, const std::string& command) {
    json j;
    j["version"] = version();
    j["command"] = command;
    j["seed"] = config.scenario.seed;
    json cfg = json::object();
    for (const auto& [k, v] : config_entries(config)) cfg[k] = v;
    j["config"] = cfg;
    auto f = open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

} // namespace emglrt
