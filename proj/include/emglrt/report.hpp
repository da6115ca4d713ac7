#pragma once

#include <string>
#include <vector>

#include "emglrt/config.hpp"
#include "emglrt/harness.hpp"

namespace emglrt {

/// One JSON object per line. Field names: trial, hypothesis ("H0"/"H1"),
/// detector, statistic (null on error), error (null on success), n_hat, iters,
/// sigma_i2, nu, Q, N_true, tau_resid, fo_T, axis, value.
std::string record_to_json(const TrialRecord& record);
TrialRecord record_from_json(const std::string& line);

void write_records(const std::string& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records(const std::string& path);

inline constexpr const char* kSummaryHeader =
    "axis,value,detector,metric,pfa,eta,metric_value,mean_N_hat_H1,mean_iters_H1,failures_H1,failures_H0,trials";

/// Summary table with a leading `#` line stating the threshold conventions.
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary_csv(const std::string& text);

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows);
void write_timing(const std::string& path, const std::vector<TimingRow>& rows);

/// Matplotlib script that plots every summary CSV it is given.
void write_plot_script(const std::string& path, const std::vector<std::string>& csv_names);

/// Config echo, seed, code version and the command that produced the run.
void write_manifest(const std::string& path, const RunConfig& config, const std::string& command);

const char* version() noexcept;

} // namespace emglrt
