#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "emglrt/em_common.hpp"
#include "emglrt/scenario.hpp"

namespace emglrt {

enum class DetectorKind { KelTr, KmrTr, McwTr, KelEm, KmrEm, McwEm, Forsythe, ForsytheLowrank, HardMcwEm };

std::string_view to_string(DetectorKind kind) noexcept;
DetectorKind parse_detector(std::string_view name);
const std::vector<DetectorKind>& all_detectors();

/// Knobs shared by every detector; each detector takes the subset it needs.
struct DetectorSettings {
    int max_iters = 50;
    double rel_tol = 0.01;
    bool fast_eig = true;
    Eigen::Index n_max = -1;
    bool freeze_rank = false;
    std::vector<double> alpha_grid = EmConfig{}.alpha_grid;
    std::map<std::string, double> gain; // per-detector GIC gain overrides
};

/// GIC gain used by `kind` unless overridden: 10 for kmr-em style, 1.7 for
/// mcw-em style, 1.1 for kmr-tr, 1.25 for mcw-tr. Zero for full-rank detectors.
double default_gain(DetectorKind kind) noexcept;

struct DetectorSpec {
    DetectorKind kind = DetectorKind::KmrEm;
    EmConfig em;            // EM detectors
    RankCriterion criterion; // training-only rank estimate
};

DetectorSpec make_detector(DetectorKind kind, const DetectorSettings& settings = {});

struct DetectorOutcome {
    double statistic = std::numeric_limits<double>::quiet_NaN();
    std::string error; // empty on success
    Eigen::Index N_hat = 0;
    int iters = 0;
};

/// Runs one detector on Y, with the first Q symbols of `s` as training.
/// Library errors are captured in `error` rather than thrown.
DetectorOutcome evaluate(const DetectorSpec& spec, const CMatrix& Y, const CVector& s, const SignalPrior& prior,
                         Eigen::Index Q);

struct TrialRecord {
    std::uint64_t trial = 0;
    Hypothesis hypothesis = Hypothesis::H1;
    std::string detector;
    double statistic = std::numeric_limits<double>::quiet_NaN();
    std::string error;
    Eigen::Index N_hat = 0;
    int iters = 0;
    double sigma_i2 = 0.0;
    double nu = 0.0;
    Eigen::Index Q = 0;
    Eigen::Index N_true = 0;
    double tau_resid = 0.0;
    double fo_T = 0.0;
    std::string axis;
    double value = 0.0;

    bool ok() const noexcept { return error.empty(); }
};

/// Wall-clock seconds spent in each detector, summed over trials and threads.
using DetectorTiming = std::map<std::string, double>;

/// Per trial: H1 then H0, each evaluated by every detector in order. Records
/// come back in that order regardless of `threads`.
std::vector<TrialRecord> run_point(const ScenarioConfig& config, const std::vector<DetectorSpec>& detectors,
                                   std::uint64_t trials, unsigned threads = 1, DetectorTiming* timing = nullptr);

enum class MetricKind { PdAtPfa, MinError };

struct Metric {
    MetricKind kind = MetricKind::PdAtPfa;
    double pfa = 0.01;
};

struct Calibration {
    double eta = 0.0;
    double achieved = 0.0;
};

/// pd_at_pfa: eta is the ceil((1 - pfa) n)-th smallest H0 statistic and
/// achieved = fraction of H1 statistics above eta. min_error: eta minimizes
/// (miss + false alarm) / 2 over the merged statistics, ties to the smallest eta.
Calibration calibrate_threshold(std::vector<double> stats_h0, const std::vector<double>& stats_h1,
                                const Metric& metric);

enum class SweepAxis { Q, Snr, Sir, N, Tau };

std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_axis(std::string_view name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Snr;
    std::vector<double> values;
    std::uint64_t trials = 100;
    Metric metric;
    bool tie_power = false; // Q axis: nu = sigma_i2 = Q; N axis: sigma_i2 = nu * N
};

void validate(const SweepSpec& sweep);

/// Scenario at one sweep point.
ScenarioConfig apply_axis(const ScenarioConfig& base, const SweepSpec& sweep, double value);

struct SummaryRow {
    std::string axis;
    double value = 0.0;
    std::string detector;
    std::string metric;
    double pfa = 0.0;
    double eta = 0.0;
    double metric_value = 0.0;
    double mean_N_hat_H1 = 0.0;
    double mean_iters_H1 = 0.0;
    std::uint64_t failures_H1 = 0;
    std::uint64_t failures_H0 = 0;
    std::uint64_t trials = 0;
};

struct TimingRow {
    std::string axis;
    double value = 0.0;
    std::string detector;
    double seconds = 0.0;
};

/// Calibrates each detector over a batch of records. Failed trials count as
/// errors: -inf under H1 and +inf under H0.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records, const std::vector<std::string>& detectors,
                                  const Metric& metric, const std::string& axis, double value);

struct SweepResult {
    std::vector<SummaryRow> rows;
    std::vector<TrialRecord> records;
    std::vector<TimingRow> timing;
};

/// Every sweep point reuses the base seed, so points share their draws.
SweepResult run_sweep(const SweepSpec& sweep, const ScenarioConfig& base, const std::vector<DetectorSpec>& detectors,
                      unsigned threads = 1);

} // namespace emglrt
