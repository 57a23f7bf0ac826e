#include "beltrack/conveyor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace beltrack {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid simulator config: " + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct LiveObject {
    int index;  // into truth.objects
    double size;
};

}  // namespace

void SimConfig::validate() const {
    require(n_lanes >= 1, "n_lanes must be >= 1");
    require(lane_spacing > 0.0, "lane_spacing must be positive");
    require(belt_velocity > 0.0, "belt_velocity must be positive");
    require(spawn_interval_frames >= 1, "spawn_interval_frames must be >= 1");
    require(spawn_jitter_frames >= 0 && spawn_jitter_frames < spawn_interval_frames,
            "spawn_jitter_frames must lie in [0, spawn_interval_frames)");
    require(box_size_mean > 0.0 && box_size_std >= 0.0, "box size mean must be positive, std non-negative");
    require(n_frames >= 0, "n_frames must be non-negative");
    require(max_objects >= 0, "max_objects must be non-negative");
    require(frame_width > 0.0 && frame_height > 0.0, "frame dimensions must be positive");
    require(is_probability(defect_probability), "defect_probability must lie in [0, 1]");
    double wsum = 0.0;
    for (double w : defect_category_weights) {
        require(w >= 0.0, "defect_category_weights must be non-negative");
        wsum += w;
    }
    require(wsum > 0.0, "defect_category_weights must not all be zero");
    require(is_probability(detection_dropout_prob), "detection_dropout_prob must lie in [0, 1]");
    require(bbox_jitter_std >= 0.0, "bbox_jitter_std must be non-negative");
    require(false_positive_rate >= 0.0, "false_positive_rate must be non-negative");
    require(is_probability(score_mean_true) && is_probability(score_mean_fp), "score means must lie in [0, 1]");
    require(score_std_true >= 0.0 && score_std_fp >= 0.0, "score stds must be non-negative");
    require(is_probability(label_flip_prob), "label_flip_prob must lie in [0, 1]");
}

Scene generate_scene(const SimConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto gaussian = [&](double mean, double std) { return std > 0.0 ? mean + std * normal(rng) : mean; };
    auto draw_size = [&] {
        return std::clamp(gaussian(cfg.box_size_mean, cfg.box_size_std), 0.5 * cfg.box_size_mean,
                          1.5 * cfg.box_size_mean);
    };
    auto draw_score = [&](double mean, double std) { return std::clamp(gaussian(mean, std), 0.0, 1.0); };
    auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::discrete_distribution<int> defect_kind(cfg.defect_category_weights.begin(),
                                                cfg.defect_category_weights.end());

    Scene scene;
    scene.frames.reserve(std::size_t(cfg.n_frames));
    std::vector<int> next_spawn(std::size_t(cfg.n_lanes));
    for (auto& s : next_spawn) s = uniform_int(0, cfg.spawn_interval_frames - 1);

    std::vector<LiveObject> live;
    int spawned = 0;
    for (int t = 0; t < cfg.n_frames; ++t) {
        for (int lane = 0; lane < cfg.n_lanes; ++lane) {
            if (t != next_spawn[std::size_t(lane)]) continue;
            next_spawn[std::size_t(lane)] =
                t + cfg.spawn_interval_frames + uniform_int(-cfg.spawn_jitter_frames, cfg.spawn_jitter_frames);
            if (cfg.max_objects > 0 && spawned >= cfg.max_objects) continue;
            GroundTruthObject obj;
            obj.object_id = ++spawned;
            obj.lane = lane;
            obj.spawn_frame = t;
            const double size = draw_size();
            const bool defect = unit(rng) < cfg.defect_probability;
            obj.true_category = CategoryLabel(defect ? 1 + defect_kind(rng) : 0);
            live.push_back({int(scene.truth.objects.size()), size});
            scene.truth.objects.push_back(std::move(obj));
        }

        FrameDetections frame;
        frame.frame_index = t;
        std::vector<LiveObject> still_live;
        for (const LiveObject& lo : live) {
            GroundTruthObject& obj = scene.truth.objects[std::size_t(lo.index)];
            const double x = -lo.size + cfg.belt_velocity * double(t - obj.spawn_frame + 1);
            if (x >= cfg.frame_width) continue;  // left the frame for good
            still_live.push_back(lo);
            const double lane_center = cfg.lane_spacing * (double(obj.lane) + 0.5);
            const BoundingBox truth_box(x, lane_center - 0.5 * lo.size, lo.size, lo.size);
            obj.boxes.push_back({t, truth_box});

            if (unit(rng) < cfg.detection_dropout_prob) continue;
            const double jx = gaussian(0.0, cfg.bbox_jitter_std);
            const double jy = gaussian(0.0, cfg.bbox_jitter_std);
            const double jw = gaussian(0.0, cfg.bbox_jitter_std);
            const double jh = gaussian(0.0, cfg.bbox_jitter_std);
            const BoundingBox det_box(x + jx, truth_box.y() + jy, std::max(1.0, lo.size + jw),
                                      std::max(1.0, lo.size + jh));
            const double score = draw_score(cfg.score_mean_true, cfg.score_std_true);
            int label = obj.true_category.index();
            if (unit(rng) < cfg.label_flip_prob) {
                const int other = uniform_int(0, kDefaultNumCategories - 2);
                label = other >= label ? other + 1 : other;
            }
            frame.detections.emplace_back(t, det_box, score, CategoryLabel(label));
        }
        live = std::move(still_live);

        if (cfg.false_positive_rate > 0.0) {
            const int n_fp = std::poisson_distribution<int>(cfg.false_positive_rate)(rng);
            for (int f = 0; f < n_fp; ++f) {
                const double size = draw_size();
                const double x = unit(rng) * std::max(1.0, cfg.frame_width - size);
                const double y = unit(rng) * std::max(1.0, cfg.frame_height - size);
                const double score = draw_score(cfg.score_mean_fp, cfg.score_std_fp);
                const int label = uniform_int(0, kDefaultNumCategories - 1);
                frame.detections.emplace_back(t, BoundingBox(x, y, size, size), score, CategoryLabel(label));
            }
        }
        scene.frames.push_back(std::move(frame));
    }
    return scene;
}

SceneStatistics scene_statistics(const SceneGroundTruth& gt) {
    SceneStatistics s;
    s.object_count = int(gt.objects.size());
    if (gt.objects.empty()) return s;
    int defects = 0;
    double frames = 0.0;
    for (const auto& o : gt.objects) {
        if (to_binary(o.true_category) == BinaryQuality::defect) ++defects;
        frames += double(o.boxes.size());
    }
    s.defect_fraction = double(defects) / double(s.object_count);
    s.mean_lifetime = frames / double(s.object_count);
    return s;
}

std::vector<FrameDetections> ground_truth_frames(const SceneGroundTruth& gt) {
    std::map<int, FrameDetections> by_frame;
    for (const auto& o : gt.objects) {
        for (const auto& fb : o.boxes) {
            auto& fd = by_frame[fb.frame_index];
            fd.frame_index = fb.frame_index;
            fd.detections.emplace_back(fb.frame_index, fb.box, 1.0, o.true_category);
        }
    }
    std::vector<FrameDetections> out;
    out.reserve(by_frame.size());
    for (auto& [f, fd] : by_frame) out.push_back(std::move(fd));
    return out;
}

}  // namespace beltrack
