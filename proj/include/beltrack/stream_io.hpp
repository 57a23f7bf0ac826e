#pragma once

// JSON Lines formats exchanged with external detectors and between CLI
// verbs. One record per line; field names are fixed.
//
//   detections    {"frame","x","y","w","h","score","category"}  category may be null
//   ground truth  {"frame","object_id","x","y","w","h","true_category"}
//   tracks        {"frame","track_id","x","y","w","h"}
//   verdicts      {"track_id","category","binary","k","votes","stability_frame_wise"}

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beltrack/aggregation.hpp"
#include "beltrack/box.hpp"
#include "beltrack/byte_tracker.hpp"
#include "beltrack/conveyor_sim.hpp"

namespace beltrack {

/// Malformed or invalid input. line() is 1-based, 0 when not line-specific.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& source, int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

struct IngestOptions {
    bool skip_malformed = false;
    int num_categories = kDefaultNumCategories;
};

struct IngestResult {
    std::vector<FrameDetections> frames;  // ascending frame index, non-empty frames only
    std::vector<std::string> warnings;
    int skipped_lines = 0;
};

/// Parses detection JSONL. Lines are grouped by frame; files whose frames
/// are out of order are sorted in memory with a warning.
IngestResult ingest_detections(std::istream& in, const IngestOptions& options = {},
                               const std::string& source = "<stream>");
IngestResult ingest_detections(const std::filesystem::path& path, const IngestOptions& options = {});

/// MOT-challenge text rows "frame,id,x,y,w,h,score,...". No categories.
IngestResult ingest_mot(std::istream& in, const IngestOptions& options = {},
                        const std::string& source = "<stream>");
IngestResult ingest_mot(const std::filesystem::path& path, const IngestOptions& options = {});

void write_detections(std::ostream& out, const std::vector<FrameDetections>& frames);

void write_ground_truth(std::ostream& out, const SceneGroundTruth& gt);
SceneGroundTruth read_ground_truth(std::istream& in, const std::string& source = "<stream>");
SceneGroundTruth read_ground_truth(const std::filesystem::path& path);

void write_tracks(std::ostream& out, const std::vector<Track>& tracks);
/// Rebuilds track histories (id and boxes only) from a tracks file.
std::vector<Track> read_tracks(std::istream& in, const std::string& source = "<stream>");
std::vector<Track> read_tracks(const std::filesystem::path& path);

struct VerdictRecord {
    TrackVerdict verdict;
    std::optional<double> stability_frame_wise;
};

void write_verdicts(std::ostream& out, const std::vector<VerdictRecord>& verdicts);
std::vector<VerdictRecord> read_verdicts(std::istream& in, const std::string& source = "<stream>");
std::vector<VerdictRecord> read_verdicts(const std::filesystem::path& path);

}  // namespace beltrack
