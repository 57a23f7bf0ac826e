#pragma once

#include <optional>
#include <vector>

#include "beltrack/box.hpp"
#include "beltrack/kalman.hpp"

namespace beltrack {

enum class TrackStatus { Tentative, Active, Lost, Removed };

std::string_view to_string(TrackStatus s);

using TrackObservation = FrameBox;

struct TrackPrediction {
    int frame_index;
    CategoryLabel label;
};

/// One persistent object identity. history holds the detection boxes the
/// track was matched to, in frame order; predictions holds category
/// observations attached on a subset of those frames.
struct Track {
    int id = 0;
    KalmanState state;
    TrackStatus status = TrackStatus::Tentative;
    std::vector<TrackObservation> history;
    std::vector<TrackPrediction> predictions;
    int last_update_frame = -1;
    int hit_count = 0;

    int length() const { return int(history.size()); }
    /// Box at the given frame, when the track matched a detection there.
    std::optional<BoundingBox> box_at(int frame_index) const;
};

struct TrackerConfig {
    double high_score_threshold = 0.6;
    double low_score_threshold = 0.1;
    /// Maximum 1 - IoU accepted in the high-score stage (min IoU 0.2).
    double match_threshold_first = 0.8;
    /// Maximum 1 - IoU accepted in the low-score stage (min IoU 0.5).
    double match_threshold_second = 0.5;
    /// Defaults to high_score_threshold when unset.
    std::optional<double> new_track_min_score;
    int max_frames_lost = 30;
    int min_hits_to_activate = 1;
    int min_track_length_report = 1;
    KalmanParams kalman;

    double spawn_threshold() const { return new_track_min_score.value_or(high_score_threshold); }
    /// Throws std::invalid_argument on inconsistent thresholds.
    void validate() const;
};

struct ActiveTrack {
    int track_id;
    BoundingBox box;      // posterior filter estimate
    int detection_index;  // index into the frame's detection list
};

struct TrackerOutput {
    int frame_index = 0;
    std::vector<ActiveTrack> active_tracks;
    std::vector<int> newly_removed_track_ids;
};

/// BYTE two-stage tracker. One instance per video stream; not thread-safe.
class ByteTracker {
public:
    explicit ByteTracker(TrackerConfig config = {});

    /// Advances the tracker by one frame. Frame indices must strictly
    /// increase between calls; std::invalid_argument otherwise.
    TrackerOutput step(const FrameDetections& frame);

    /// Every track ever created (Removed included) whose history length is
    /// at least min_track_length_report, in id order.
    std::vector<Track> finalize() const;

    /// Attaches a category observation to a track at a frame where it
    /// matched a detection.
    void record_prediction(int track_id, int frame_index, const CategoryLabel& label);

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return config_; }

private:
    Track& track_by_id(int id);
    void apply_match(Track& track, const Detection& det, int frame_index);

    TrackerConfig config_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    std::optional<int> last_frame_;
};

}  // namespace beltrack
