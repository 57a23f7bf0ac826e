#pragma once

// JSON configuration for experiments. A config document has up to four
// sections, each optional, each mirroring one struct field for field:
//
//   {"tracker": {...}, "kalman": {...}, "aggregation": {...}, "sim": {...}}
//
// Unknown keys are rejected so typos surface as ConfigError.

#include <filesystem>
#include <stdexcept>

#include "json.hpp"

#include "beltrack/byte_tracker.hpp"
#include "beltrack/conveyor_sim.hpp"
#include "beltrack/metrics.hpp"

namespace beltrack {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Overlays the "tracker" and "kalman" sections onto base.
TrackerConfig tracker_config_from_json(const nlohmann::json& doc, TrackerConfig base = {});
/// Overlays the "sim" section onto base.
SimConfig sim_config_from_json(const nlohmann::json& doc, SimConfig base = {});
/// Overlays the "aggregation" section onto base.
StabilityOptions stability_options_from_json(const nlohmann::json& doc, StabilityOptions base = {});

nlohmann::json to_json(const TrackerConfig& c);  // {"tracker": ..., "kalman": ...}
nlohmann::json to_json(const SimConfig& c);      // {"sim": ...}
nlohmann::json to_json(const StabilityOptions& o);  // {"aggregation": ...}

/// Reads a config document; ConfigError on I/O or syntax problems, or on
/// unknown top-level sections.
nlohmann::json load_config_file(const std::filesystem::path& path);

}  // namespace beltrack
