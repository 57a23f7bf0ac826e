#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "beltrack/aggregation.hpp"
#include "beltrack/box.hpp"
#include "beltrack/byte_tracker.hpp"
#include "beltrack/conveyor_sim.hpp"

namespace beltrack {

/// Fraction of verdicts whose binary label is defect. Throws
/// std::invalid_argument for an empty list (the ratio is undefined).
double defect_ratio(const std::vector<TrackVerdict>& verdicts);
double defect_ratio(const std::vector<BinaryQuality>& decisions);

/// 1 - (label changes) / k for a length-k sequence. Note the divisor is k,
/// not k - 1, so a maximally oscillating track scores 1/k.
template <typename Label>
double temporal_stability(const std::vector<Label>& labels);

extern template double temporal_stability(const std::vector<BinaryQuality>&);
extern template double temporal_stability(const std::vector<int>&);

enum class StabilityMode { frame_wise, aggregated };

/// How the frame-wise baseline turns a per-frame label sequence into one
/// decision per track.
enum class FrameWiseDecision { last_frame, first_frame, random_frame };

/// Which labels label-change counting sees.
enum class ChangeGranularity { binary, category };

struct StabilityOptions {
    AggregationConfig aggregation;
    FrameWiseDecision decision = FrameWiseDecision::last_frame;
    ChangeGranularity granularity = ChangeGranularity::binary;
    std::uint64_t random_seed = 0;  // random_frame decisions only
};

struct VideoQualityReport {
    double defect_ratio = 0.0;
    std::map<int, double> per_track_stability;
    double mean_stability = 0.0;
    int n_total_tracks = 0;
    int n_defect_tracks = 0;
};

/// Video-level report. frame_wise scores the raw per-frame labels and uses
/// one frame per track as its decision; aggregated scores the constant
/// post-vote sequence, whose stability is exactly 1.
VideoQualityReport stability_report(const std::vector<PredictionBuffer>& buffers, StabilityMode mode,
                                    const StabilityOptions& options = {});

/// Per-track decisions of the frame-wise baseline, in buffer order.
std::vector<BinaryQuality> frame_wise_decisions(const std::vector<PredictionBuffer>& buffers,
                                                const StabilityOptions& options = {});

/// Defect is the positive class. Ratios with a zero denominator are
/// reported as std::nullopt rather than 0.
struct ClassificationMetrics {
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    int tp = 0, fp = 0, fn = 0, tn = 0;
};

ClassificationMetrics classification_metrics(const std::vector<BinaryQuality>& pred,
                                             const std::vector<BinaryQuality>& truth);

/// Single-class average precision: score-descending sweep, greedy matching to
/// the highest-IoU unmatched ground-truth box in the same frame, all-point
/// interpolated precision-recall area.
double detection_map(const std::vector<FrameDetections>& dets, const std::vector<FrameDetections>& gt,
                     double iou_threshold = 0.5);

/// Per ground-truth object: the covering track at each frame is the one with
/// the highest IoU >= min_iou; each change of covering id is one switch.
int count_id_switches(const std::vector<Track>& tracks, const SceneGroundTruth& gt, double min_iou = 0.5);

/// Object id each track overlaps (IoU >= min_iou) on the most frames, or
/// std::nullopt for tracks that never cover an object. Keyed by track id.
std::map<int, std::optional<int>> match_tracks_to_objects(const std::vector<Track>& tracks,
                                                          const SceneGroundTruth& gt, double min_iou = 0.5);

}  // namespace beltrack
