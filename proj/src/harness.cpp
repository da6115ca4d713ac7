#include "emglrt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "emglrt/closed_form.hpp"
#include "emglrt/em_det.hpp"
#include "emglrt/em_gauss.hpp"

namespace emglrt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Named {
    DetectorKind kind;
    std::string_view name;
};

constexpr Named kNames[] = {
    {DetectorKind::KelTr, "kel-tr"},       {DetectorKind::KmrTr, "kmr-tr"},
    {DetectorKind::McwTr, "mcw-tr"},       {DetectorKind::KelEm, "kel-em"},
    {DetectorKind::KmrEm, "kmr-em"},       {DetectorKind::McwEm, "mcw-em"},
    {DetectorKind::Forsythe, "forsythe"},  {DetectorKind::ForsytheLowrank, "forsythe-lowrank"},
    {DetectorKind::HardMcwEm, "hard-mcw-em"},
};

bool full_rank(DetectorKind k) { return k == DetectorKind::KelEm || k == DetectorKind::Forsythe; }
bool is_det(DetectorKind k) { return k == DetectorKind::McwEm || k == DetectorKind::HardMcwEm; }
bool is_hard(DetectorKind k) {
    return k == DetectorKind::Forsythe || k == DetectorKind::ForsytheLowrank || k == DetectorKind::HardMcwEm;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::round(v); }

} // namespace

std::string_view to_string(DetectorKind kind) noexcept {
    for (const auto& n : kNames)
        if (n.kind == kind) return n.name;
    return "unknown";
}

DetectorKind parse_detector(std::string_view name) {
    for (const auto& n : kNames)
        if (n.name == name) return n.kind;
    throw Error(ErrorKind::Config, "unknown detector '" + std::string(name) + "'");
}

const std::vector<DetectorKind>& all_detectors() {
    static const std::vector<DetectorKind> all = [] {
        std::vector<DetectorKind> v;
        for (const auto& n : kNames) v.push_back(n.kind);
        return v;
    }();
    return all;
}

double default_gain(DetectorKind kind) noexcept {
    switch (kind) {
    case DetectorKind::KmrEm:
    case DetectorKind::ForsytheLowrank: return 10.0;
    case DetectorKind::McwEm:
    case DetectorKind::HardMcwEm: return 1.7;
    case DetectorKind::KmrTr: return 1.1;
    case DetectorKind::McwTr: return 1.25;
    default: return 0.0;
    }
}

DetectorSpec make_detector(DetectorKind kind, const DetectorSettings& settings) {
    DetectorSpec spec;
    spec.kind = kind;
    double gain = default_gain(kind);
    if (auto it = settings.gain.find(std::string(to_string(kind))); it != settings.gain.end()) gain = it->second;
    spec.criterion = RankCriterion{Penalty::GIC, gain, settings.n_max};

    spec.em.max_iters = settings.max_iters;
    spec.em.rel_tol = settings.rel_tol;
    spec.em.fast_eig = settings.fast_eig;
    spec.em.alpha_grid = settings.alpha_grid;
    spec.em.decision = is_hard(kind) ? DecisionMode::Hard : DecisionMode::Soft;
    spec.em.rank.estimate = !full_rank(kind);
    spec.em.rank.criterion = spec.criterion;
    spec.em.rank.freeze_after_first = settings.freeze_rank;
    validate(spec.em);
    return spec;
}

DetectorOutcome evaluate(const DetectorSpec& spec, const CMatrix& Y, const CVector& s, const SignalPrior& prior,
                         Eigen::Index Q) {
    DetectorOutcome out;
    try {
        const Eigen::Index M = Y.rows();
        const CMatrix Yt = Y.leftCols(Q);
        const CVector st = s.head(Q);
        switch (spec.kind) {
        case DetectorKind::KelTr: {
            const auto r = kelly_statistic(Yt, st);
            out.statistic = r.log_statistic;
            out.N_hat = r.rank_used;
            break;
        }
        case DetectorKind::KmrTr:
        case DetectorKind::McwTr: {
            const bool det = spec.kind == DetectorKind::McwTr;
            const auto spectra = known_signal_spectra(Yt, st);
            const auto model = det ? InterferenceModel::Det : InterferenceModel::Gauss;
            const Eigen::Index N = estimate_rank(spectra.lams1, model, spec.criterion, M, Q).N_hat;
            const auto r = det ? mcwhorter_statistic(Yt, st, N) : kmr_statistic(Yt, st, N);
            out.statistic = r.log_statistic;
            out.N_hat = N;
            break;
        }
        default: {
            EmConfig cfg = spec.em;
            if (full_rank(spec.kind)) cfg.rank.fixed_N = M;
            const auto r = is_det(spec.kind) ? glrt_det(Y, prior, cfg) : glrt_gauss(Y, prior, cfg);
            out.statistic = r.log_statistic;
            out.N_hat = r.N_hat;
            out.iters = r.iters;
            break;
        }
        }
        if (!std::isfinite(out.statistic)) out.error = "NonFiniteStatistic";
    } catch (const Error& e) {
        out.error = std::string(error_tag(e.kind()));
    } catch (const std::exception&) {
        out.error = "Internal";
    }
    if (!out.error.empty()) out.statistic = std::numeric_limits<double>::quiet_NaN();
    return out;
}

std::vector<TrialRecord> run_point(const ScenarioConfig& config, const std::vector<DetectorSpec>& detectors,
                                   std::uint64_t trials, unsigned threads, DetectorTiming* timing) {
    if (detectors.empty()) throw Error(ErrorKind::InvalidInput, "no detectors requested");
    validate(config);
    std::vector<std::vector<TrialRecord>> slots(trials);
    std::atomic<std::uint64_t> next{0};
    std::mutex timing_mutex;

    const auto worker = [&] {
        DetectorTiming local;
        for (std::uint64_t t = next++; t < trials; t = next++) {
            auto& slot = slots[t];
            for (const Hypothesis hyp : {Hypothesis::H1, Hypothesis::H0}) {
                const Scenario sc = synthesize(config, t, hyp);
                const SignalPrior prior = scenario_prior(config, sc.s);
                for (const auto& d : detectors) {
                    const auto start = std::chrono::steady_clock::now();
                    const auto res = evaluate(d, sc.Y, sc.s, prior, config.Q);
                    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
                    const std::string name(to_string(d.kind));
                    local[name] += dt.count();
                    TrialRecord rec;
                    rec.trial = t;
                    rec.hypothesis = hyp;
                    rec.detector = name;
                    rec.statistic = res.statistic;
                    rec.error = res.error;
                    rec.N_hat = res.N_hat;
                    rec.iters = res.iters;
                    rec.sigma_i2 = config.sigma_i2;
                    rec.nu = config.nu;
                    rec.Q = config.Q;
                    rec.N_true = config.N_true;
                    rec.tau_resid = sc.tau_resid;
                    rec.fo_T = sc.fo_T;
                    slot.push_back(std::move(rec));
                }
            }
        }
        if (timing) {
            std::lock_guard lock(timing_mutex);
            for (const auto& [k, v] : local) (*timing)[k] += v;
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(trials, 1))));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<TrialRecord> out;
    out.reserve(trials * 2 * detectors.size());
    for (auto& slot : slots)
        for (auto& r : slot) out.push_back(std::move(r));
    return out;
}

Calibration calibrate_threshold(std::vector<double> h0, const std::vector<double>& h1, const Metric& metric) {
    if (h0.empty() || h1.empty()) throw Error(ErrorKind::InvalidInput, "calibration needs statistics under both hypotheses");
    std::sort(h0.begin(), h0.end());
    std::vector<double> s1 = h1;
    std::sort(s1.begin(), s1.end());
    const double n0 = static_cast<double>(h0.size());
    // fraction of a sorted sample strictly above eta
    const auto above = [](const std::vector<double>& v, double eta) {
        return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), eta)) / static_cast<double>(v.size());
    };

    Calibration out;
    if (metric.kind == MetricKind::PdAtPfa) {
        if (!(metric.pfa > 0.0 && metric.pfa < 1.0)) throw Error(ErrorKind::InvalidInput, "pfa must lie in (0, 1)");
        auto k = static_cast<long long>(std::ceil((1.0 - metric.pfa) * n0 - 1e-9));
        k = std::clamp<long long>(k, 1, static_cast<long long>(h0.size()));
        out.eta = h0[static_cast<std::size_t>(k - 1)];
        out.achieved = above(s1, out.eta);
        return out;
    }

    std::vector<double> cand;
    cand.reserve(h0.size() + s1.size() + 1);
    cand.push_back(-kInf);
    cand.insert(cand.end(), h0.begin(), h0.end());
    cand.insert(cand.end(), s1.begin(), s1.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    out.achieved = kInf;
    for (double eta : cand) {
        const double miss = 1.0 - above(s1, eta);
        const double fa = above(h0, eta);
        const double err = 0.5 * (miss + fa);
        if (err < out.achieved) {
            out.achieved = err;
            out.eta = eta;
        }
    }
    return out;
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
    case SweepAxis::Q: return "Q";
    case SweepAxis::Snr: return "snr";
    case SweepAxis::Sir: return "sir";
    case SweepAxis::N: return "N";
    case SweepAxis::Tau: return "tau";
    }
    return "snr";
}

SweepAxis parse_axis(std::string_view name) {
    for (SweepAxis a : {SweepAxis::Q, SweepAxis::Snr, SweepAxis::Sir, SweepAxis::N, SweepAxis::Tau})
        if (to_string(a) == name) return a;
    throw Error(ErrorKind::Config, "unknown sweep axis '" + std::string(name) + "'");
}

void validate(const SweepSpec& sweep) {
    if (sweep.values.empty()) throw Error(ErrorKind::Config, "sweep needs at least one value");
    if (sweep.trials < 2) throw Error(ErrorKind::Config, "sweep needs at least two trials per point");
    if (sweep.metric.kind == MetricKind::PdAtPfa && !(sweep.metric.pfa > 0.0 && sweep.metric.pfa < 1.0))
        throw Error(ErrorKind::Config, "pfa must lie in (0, 1)");
    if (sweep.axis == SweepAxis::Q || sweep.axis == SweepAxis::N)
        for (double v : sweep.values)
            if (!is_integer(v) || v < 0) throw Error(ErrorKind::Config, "Q and N sweep values must be counts");
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const SweepSpec& sweep, double value) {
    ScenarioConfig c = base;
    switch (sweep.axis) {
    case SweepAxis::Q:
        c.Q = static_cast<Eigen::Index>(value);
        if (sweep.tie_power) c.nu = c.sigma_i2 = value;
        break;
    case SweepAxis::Snr: c.nu = c.sigma_i2 = value; break;
    case SweepAxis::Sir: c.sigma_i2 = value; break;
    case SweepAxis::N:
        c.N_true = static_cast<Eigen::Index>(value);
        if (sweep.tie_power) c.sigma_i2 = c.nu * value;
        break;
    case SweepAxis::Tau: c.tau_fixed = value; break;
    }
    validate(c);
    return c;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records, const std::vector<std::string>& detectors,
                                  const Metric& metric, const std::string& axis, double value) {
    std::vector<SummaryRow> rows;
    for (const auto& name : detectors) {
        std::vector<double> h0, h1;
        SummaryRow row;
        row.axis = axis;
        row.value = value;
        row.detector = name;
        row.metric = metric.kind == MetricKind::PdAtPfa ? "pd_at_pfa" : "min_error";
        row.pfa = metric.kind == MetricKind::PdAtPfa ? metric.pfa : 0.0;
        double n_sum = 0.0, it_sum = 0.0;
        std::uint64_t ok1 = 0;
        for (const auto& r : records) {
            if (r.detector != name) continue;
            if (r.hypothesis == Hypothesis::H1) {
                h1.push_back(r.ok() ? r.statistic : -kInf);
                if (r.ok()) {
                    n_sum += static_cast<double>(r.N_hat);
                    it_sum += r.iters;
                    ++ok1;
                } else {
                    ++row.failures_H1;
                }
            } else {
                h0.push_back(r.ok() ? r.statistic : kInf);
                if (!r.ok()) ++row.failures_H0;
            }
        }
        row.trials = h1.size();
        if (ok1 > 0) {
            row.mean_N_hat_H1 = n_sum / static_cast<double>(ok1);
            row.mean_iters_H1 = it_sum / static_cast<double>(ok1);
        }
        if (!h0.empty() && !h1.empty()) {
            const auto cal = calibrate_threshold(h0, h1, metric);
            row.eta = cal.eta;
            row.metric_value = cal.achieved;
        }
        rows.push_back(row);
    }
    return rows;
}

SweepResult run_sweep(const SweepSpec& sweep, const ScenarioConfig& base, const std::vector<DetectorSpec>& detectors,
                      unsigned threads) {
    validate(sweep);
    std::vector<std::string> names;
    for (const auto& d : detectors) names.emplace_back(to_string(d.kind));
    const std::string axis(to_string(sweep.axis));
    SweepResult out;
    for (double v : sweep.values) {
        const ScenarioConfig c = apply_axis(base, sweep, v);
        DetectorTiming timing;
        auto recs = run_point(c, detectors, sweep.trials, threads, &timing);
        for (auto& r : recs) {
            r.axis = axis;
            r.value = v;
        }
        auto rows = summarize(recs, names, sweep.metric, axis, v);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
        for (const auto& n : names) out.timing.push_back({axis, v, n, timing[n]});
        out.records.insert(out.records.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    return out;
}

} // namespace emglrt
