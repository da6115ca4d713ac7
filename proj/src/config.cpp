#include "emglrt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace emglrt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* what) {
    throw Error(ErrorKind::Config, "bad value '" + value + "' for " + key + ": " + what);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad(key, v, "expected a finite number");
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected an integer");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected an unsigned integer");
    return out;
}

Eigen::Index to_count(const std::string& key, const std::string& v) {
    const long long n = to_int(key, v);
    if (n < 0) bad(key, v, "expected a nonnegative count");
    return static_cast<Eigen::Index>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(key, v, "expected true or false");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
    if (out.empty()) bad(key, v, "expected a comma-separated list");
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out;
}

std::string alphabet_name(const std::vector<cplx>& a) {
    if (a == qpsk_alphabet()) return "qpsk";
    if (a == bpsk_alphabet()) return "bpsk";
    if (a == psk8_alphabet()) return "8psk";
    return "custom";
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& v) {
    auto& s = c.scenario;
    auto& d = c.detector;
    auto& w = c.sweep;
    if (key == "scenario.M") s.M = to_count(key, v);
    else if (key == "scenario.L") s.L = to_count(key, v);
    else if (key == "scenario.Q") s.Q = to_count(key, v);
    else if (key == "scenario.N") s.N_true = to_count(key, v);
    else if (key == "scenario.nu") s.nu = to_double(key, v);
    else if (key == "scenario.sigma_i2") s.sigma_i2 = to_double(key, v);
    else if (key == "scenario.alphabet") {
        if (v == "qpsk") s.alphabet = qpsk_alphabet();
        else if (v == "bpsk") s.alphabet = bpsk_alphabet();
        else if (v == "8psk") s.alphabet = psk8_alphabet();
        else bad(key, v, "expected qpsk, bpsk or 8psk");
    } else if (key == "scenario.data_model") {
        if (v == "discrete") s.data_model = DiscreteData{};
        else if (v == "gaussian") s.data_model = GaussianData{1.0};
        else bad(key, v, "expected discrete or gaussian");
    } else if (key == "scenario.interference") {
        try {
            s.interference = parse_interference(v);
        } catch (const Error&) {
            bad(key, v, "expected gauss, qpsk_unsync, sinusoid or spike");
        }
    } else if (key == "scenario.oversample") s.oversample = static_cast<int>(to_count(key, v));
    else if (key == "scenario.rolloff") s.rolloff = to_double(key, v);
    else if (key == "scenario.fo_min") s.fo_min = to_double(key, v);
    else if (key == "scenario.fo_max") s.fo_max = to_double(key, v);
    else if (key == "scenario.tau_fixed") {
        if (v == "none") s.tau_fixed.reset();
        else s.tau_fixed = to_double(key, v);
    } else if (key == "scenario.seed") s.seed = to_u64(key, v);
    else if (key == "scenario.grid_az") s.grid_az = static_cast<int>(to_count(key, v));
    else if (key == "scenario.grid_el") s.grid_el = static_cast<int>(to_count(key, v));
    else if (key == "detector.list") {
        c.detectors.clear();
        for (const auto& name : split_list(v)) c.detectors.push_back(parse_detector(name));
        if (c.detectors.empty()) bad(key, v, "expected at least one detector");
    } else if (key == "detector.max_iters") d.max_iters = static_cast<int>(to_count(key, v));
    else if (key == "detector.rel_tol") d.rel_tol = to_double(key, v);
    else if (key == "detector.fast_eig") d.fast_eig = to_bool(key, v);
    else if (key == "detector.n_max") d.n_max = static_cast<Eigen::Index>(to_int(key, v));
    else if (key == "detector.freeze_rank") d.freeze_rank = to_bool(key, v);
    else if (key == "detector.alpha_grid") d.alpha_grid = to_doubles(key, v);
    else if (key.rfind("detector.gain.", 0) == 0) {
        const std::string name = key.substr(14);
        const auto kind = parse_detector(name);
        if (default_gain(kind) == 0.0) bad(key, v, "detector has no rank criterion");
        d.gain[name] = to_double(key, v);
    } else if (key == "sweep.axis") w.axis = parse_axis(v);
    else if (key == "sweep.values") w.values = to_doubles(key, v);
    else if (key == "sweep.trials") w.trials = to_u64(key, v);
    else if (key == "sweep.metric") {
        if (v == "pd_at_pfa") w.metric.kind = MetricKind::PdAtPfa;
        else if (v == "min_error") w.metric.kind = MetricKind::MinError;
        else bad(key, v, "expected pd_at_pfa or min_error");
    } else if (key == "sweep.pfa") w.metric.pfa = to_double(key, v);
    else if (key == "sweep.tie_power") w.tie_power = to_bool(key, v);
    else throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        try {
            set_config_value(c, key, value);
        } catch (const Error& e) {
            std::string msg = e.what();
            const std::string tag = std::string(error_tag(e.kind())) + ": ";
            if (msg.rfind(tag, 0) == 0) msg.erase(0, tag.size());
            throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": " + msg);
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    const auto& s = c.scenario;
    const auto& d = c.detector;
    const auto& w = c.sweep;
    const auto n = [](auto v) { return std::to_string(v); };
    std::string list;
    for (std::size_t i = 0; i < c.detectors.size(); ++i) list += (i ? "," : "") + std::string(to_string(c.detectors[i]));
    std::vector<std::pair<std::string, std::string>> out = {
        {"scenario.M", n(s.M)},
        {"scenario.L", n(s.L)},
        {"scenario.Q", n(s.Q)},
        {"scenario.N", n(s.N_true)},
        {"scenario.nu", format_double(s.nu)},
        {"scenario.sigma_i2", format_double(s.sigma_i2)},
        {"scenario.alphabet", alphabet_name(s.alphabet)},
        {"scenario.data_model", std::holds_alternative<DiscreteData>(s.data_model) ? "discrete" : "gaussian"},
        {"scenario.interference", std::string(to_string(s.interference))},
        {"scenario.oversample", n(s.oversample)},
        {"scenario.rolloff", format_double(s.rolloff)},
        {"scenario.fo_min", format_double(s.fo_min)},
        {"scenario.fo_max", format_double(s.fo_max)},
        {"scenario.tau_fixed", s.tau_fixed ? format_double(*s.tau_fixed) : "none"},
        {"scenario.seed", n(s.seed)},
        {"scenario.grid_az", n(s.grid_az)},
        {"scenario.grid_el", n(s.grid_el)},
        {"detector.list", list},
        {"detector.max_iters", n(d.max_iters)},
        {"detector.rel_tol", format_double(d.rel_tol)},
        {"detector.fast_eig", d.fast_eig ? "true" : "false"},
        {"detector.n_max", n(d.n_max)},
        {"detector.freeze_rank", d.freeze_rank ? "true" : "false"},
        {"detector.alpha_grid", join_doubles(d.alpha_grid)},
    };
    for (const auto kind : all_detectors()) {
        if (default_gain(kind) == 0.0) continue;
        const std::string name(to_string(kind));
        const auto it = d.gain.find(name);
        out.emplace_back("detector.gain." + name, format_double(it == d.gain.end() ? default_gain(kind) : it->second));
    }
    out.emplace_back("sweep.axis", std::string(to_string(w.axis)));
    out.emplace_back("sweep.values", w.values.empty() ? "" : join_doubles(w.values));
    out.emplace_back("sweep.trials", n(w.trials));
    out.emplace_back("sweep.metric", w.metric.kind == MetricKind::PdAtPfa ? "pd_at_pfa" : "min_error");
    out.emplace_back("sweep.pfa", format_double(w.metric.pfa));
    out.emplace_back("sweep.tie_power", w.tie_power ? "true" : "false");
    return out;
}

std::vector<DetectorSpec> detector_specs(const RunConfig& c) {
    std::vector<DetectorSpec> out;
    for (const auto kind : c.detectors) out.push_back(make_detector(kind, c.detector));
    return out;
}

} // namespace emglrt
