#pragma once

#include <string>
#include <utility>
#include <vector>

#include "emglrt/harness.hpp"

namespace emglrt {

/// Everything a CLI run needs, loaded from a flat `key = value` file.
struct RunConfig {
    ScenarioConfig scenario;
    DetectorSettings detector;
    std::vector<DetectorKind> detectors = all_detectors();
    SweepSpec sweep;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys and malformed values raise a Config error naming the line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies one setting; shared by the parser and command-line overrides.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Every effective setting as key/value strings, in schema order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

std::vector<DetectorSpec> detector_specs(const RunConfig& config);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

} // namespace emglrt
