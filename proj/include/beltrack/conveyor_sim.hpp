#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "beltrack/box.hpp"

namespace beltrack {

/// Synthetic conveyor scene parameters. Objects travel along +x in
/// horizontal lanes; noise knobs stand in for blur, occlusion and lighting.
struct SimConfig {
    std::uint64_t seed = 0;
    int n_lanes = 2;
    double lane_spacing = 80.0;  // px between lane centres
    double belt_velocity = 5.0;  // px per frame
    int spawn_interval_frames = 20;
    int spawn_jitter_frames = 3;
    double box_size_mean = 40.0;
    double box_size_std = 2.0;
    int n_frames = 300;
    int max_objects = 0;  // 0 = no cap
    double frame_width = 640.0;
    double frame_height = 160.0;
    double defect_probability = 0.3;
    std::array<double, 3> defect_category_weights = {1.0, 1.0, 1.0};  // bruise, rot, scab
    double detection_dropout_prob = 0.05;
    double bbox_jitter_std = 1.0;
    double false_positive_rate = 0.0;  // expected false positives per frame
    double score_mean_true = 0.85;
    double score_std_true = 0.08;
    double score_mean_fp = 0.3;
    double score_std_fp = 0.1;
    double label_flip_prob = 0.1;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

struct GroundTruthObject {
    int object_id = 0;
    CategoryLabel true_category{0};
    int lane = 0;
    int spawn_frame = 0;
    std::vector<FrameBox> boxes;  // one per visible frame, consecutive
};

struct SceneGroundTruth {
    std::vector<GroundTruthObject> objects;
};

struct Scene {
    SceneGroundTruth truth;
    std::vector<FrameDetections> frames;  // one entry per frame, possibly empty
};

/// Deterministic for a given config: the same seed reproduces the same
/// scene bit for bit (std::mt19937_64 driven).
Scene generate_scene(const SimConfig& config);

struct SceneStatistics {
    int object_count = 0;
    double defect_fraction = 0.0;
    double mean_lifetime = 0.0;  // mean visible frames per object
};

SceneStatistics scene_statistics(const SceneGroundTruth& gt);

/// Ground-truth boxes regrouped per frame (score 1, true category attached),
/// for detection evaluation.
std::vector<FrameDetections> ground_truth_frames(const SceneGroundTruth& gt);

}  // namespace beltrack
