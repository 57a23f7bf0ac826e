#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "beltrack/aggregation.hpp"
#include "beltrack/byte_tracker.hpp"
#include "beltrack/conveyor_sim.hpp"
#include "beltrack/metrics.hpp"
#include "beltrack/stream_io.hpp"

namespace beltrack {

struct PipelineConfig {
    TrackerConfig tracker;
    /// Aggregation rules plus the frame-wise baseline settings.
    StabilityOptions stability;
    int num_categories = kDefaultNumCategories;
    /// Re-emit each track's running majority every frame.
    bool streaming = false;
};

/// Running majority for one track at one frame (streaming mode only).
struct StreamUpdate {
    int frame_index;
    int track_id;
    CategoryLabel category;
    BinaryQuality binary;
};

struct PipelineResult {
    std::vector<Track> tracks;             // finalized tracks, id order
    std::vector<VerdictRecord> verdicts;   // tracks with at least one prediction
    std::optional<VideoQualityReport> frame_wise;  // empty when no track has predictions
    std::optional<VideoQualityReport> aggregated;
    std::vector<StreamUpdate> stream;
    std::vector<std::string> warnings;
};

/// Detect/associate/classify loop over an ingested stream, then per-track
/// majority voting. Frames may arrive unsorted (sorted with a warning);
/// missing frame indices between the first and last frame are stepped as
/// empty frames so lost-track aging stays in frame units.
PipelineResult run_pipeline(std::vector<FrameDetections> frames, const PipelineConfig& config = {});

struct PipelineRun {
    std::variant<std::filesystem::path, SimConfig> input;
    PipelineConfig config;
    IngestOptions ingest;
    bool mot_format = false;  // path input only
};

/// Loads or simulates the input, then runs the pipeline. Ingestion warnings
/// are carried into the result.
PipelineResult execute(const PipelineRun& run);

/// Machine-readable run summary: both video-quality reports plus counts.
nlohmann::ordered_json summary_json(const PipelineResult& result);
nlohmann::ordered_json to_json(const VideoQualityReport& report);

}  // namespace beltrack
