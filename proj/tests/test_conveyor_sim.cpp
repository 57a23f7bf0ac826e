#include "doctest.h"

#include <cmath>
#include <map>
#include <tuple>
#include <sstream>

#include "beltrack/conveyor_sim.hpp"
#include "beltrack/stream_io.hpp"

using namespace beltrack;

namespace {

std::string serialize(const Scene& s) {
    std::ostringstream out;
    write_detections(out, s.frames);
    write_ground_truth(out, s.truth);
    return out.str();
}

// within k standard errors of a binomial proportion
bool near_rate(double observed, double p, double n, double k = 4.0) {
    return std::abs(observed - p) <= k * std::sqrt(p * (1 - p) / n) + 1e-12;
}

}  // namespace

TEST_CASE("same seed, same scene; different seed, different scene") {
    SimConfig c;
    c.seed = 42;
    c.false_positive_rate = 0.3;
    CHECK(serialize(generate_scene(c)) == serialize(generate_scene(c)));
    SimConfig d = c;
    d.seed = 43;
    CHECK(serialize(generate_scene(c)) != serialize(generate_scene(d)));
}

TEST_CASE("one frame entry per simulated frame") {
    SimConfig c;
    c.n_frames = 77;
    const Scene s = generate_scene(c);
    REQUIRE(s.frames.size() == 77);
    for (int t = 0; t < 77; ++t) CHECK(s.frames[std::size_t(t)].frame_index == t);
}

TEST_CASE("objects cross the frame at belt speed in their lane") {
    SimConfig c;
    c.box_size_std = 0.0;
    c.n_frames = 600;
    c.n_lanes = 3;
    const Scene s = generate_scene(c);
    const int lifetime = int(std::ceil((c.frame_width + c.box_size_mean) / c.belt_velocity)) - 1;
    int complete = 0;
    for (const auto& o : s.truth.objects) {
        REQUIRE_FALSE(o.boxes.empty());
        CHECK(o.boxes.front().frame_index == o.spawn_frame);
        CHECK(o.boxes.front().box.x() == doctest::Approx(-c.box_size_mean + c.belt_velocity));
        for (std::size_t i = 0; i < o.boxes.size(); ++i) {
            const auto& fb = o.boxes[i];
            CHECK(fb.frame_index == o.spawn_frame + int(i));
            CHECK(fb.box.center_y() == doctest::Approx(c.lane_spacing * (o.lane + 0.5)));
            CHECK(fb.box.w() == fb.box.h());
            if (i > 0) CHECK(fb.box.x() - o.boxes[i - 1].box.x() == doctest::Approx(c.belt_velocity));
        }
        if (o.spawn_frame + lifetime < c.n_frames) {
            ++complete;
            CHECK(int(o.boxes.size()) == lifetime);
        }
    }
    CHECK(complete > 20);
}

TEST_CASE("spawns stay roughly periodic per lane") {
    SimConfig c;
    c.n_frames = 1000;
    const Scene s = generate_scene(c);
    std::vector<int> last(std::size_t(c.n_lanes), -1);
    for (const auto& o : s.truth.objects) {
        int& prev = last[std::size_t(o.lane)];
        if (prev >= 0) {
            const int gap = o.spawn_frame - prev;
            CHECK(gap >= c.spawn_interval_frames - c.spawn_jitter_frames);
            CHECK(gap <= c.spawn_interval_frames + c.spawn_jitter_frames);
        }
        prev = o.spawn_frame;
    }
}

TEST_CASE("max_objects caps the scene") {
    SimConfig c;
    c.n_frames = 2000;
    c.max_objects = 10;
    const Scene s = generate_scene(c);
    CHECK(s.truth.objects.size() == 10);
    for (std::size_t i = 0; i < s.truth.objects.size(); ++i) CHECK(s.truth.objects[i].object_id == int(i) + 1);
}

TEST_CASE("defect fraction, label flips and dropout follow their probabilities") {
    SimConfig c;
    c.seed = 7;
    c.n_frames = 6000;
    c.defect_probability = 0.3;
    c.label_flip_prob = 0.2;
    c.detection_dropout_prob = 0.1;
    c.box_size_std = 0.0;
    c.bbox_jitter_std = 0.0;
    const Scene s = generate_scene(c);
    const SceneStatistics st = scene_statistics(s.truth);
    CHECK(near_rate(st.defect_fraction, 0.3, st.object_count));

    // without jitter every detection sits exactly on its object's box
    std::map<std::tuple<int, int, double>, int> truth_at;  // (frame, lane, x) -> category
    long visible = 0;
    for (const auto& o : s.truth.objects) {
        for (const auto& fb : o.boxes) {
            truth_at[{fb.frame_index, o.lane, fb.box.x()}] = o.true_category.index();
            ++visible;
        }
    }
    long detected = 0, flipped = 0;
    for (const auto& f : s.frames) {
        for (const auto& d : f.detections) {
            const int lane = int(std::lround(d.box.center_y() / c.lane_spacing - 0.5));
            const auto it = truth_at.find({f.frame_index, lane, d.box.x()});
            REQUIRE(it != truth_at.end());
            ++detected;
            REQUIRE(d.category_observation.has_value());
            if (d.category_observation->index() != it->second) ++flipped;
        }
    }
    CHECK(near_rate(1.0 - double(detected) / double(visible), 0.1, double(visible)));
    CHECK(near_rate(double(flipped) / double(detected), 0.2, double(detected)));
}

TEST_CASE("flipped labels land uniformly on the other categories") {
    SimConfig c;
    c.n_frames = 4000;
    c.defect_probability = 0.0;
    c.label_flip_prob = 0.5;
    const Scene s = generate_scene(c);
    std::array<long, 4> counts{};
    for (const auto& f : s.frames)
        for (const auto& d : f.detections) ++counts[std::size_t(d.category_observation->index())];
    const double flips = double(counts[1] + counts[2] + counts[3]);
    for (int k = 1; k < 4; ++k) CHECK(near_rate(counts[std::size_t(k)] / flips, 1.0 / 3.0, flips));
}

TEST_CASE("false positives arrive at the configured rate") {
    SimConfig c;
    c.n_frames = 3000;
    c.detection_dropout_prob = 0.0;
    c.false_positive_rate = 0.5;
    const Scene s = generate_scene(c);
    std::map<int, long> visible;
    for (const auto& o : s.truth.objects)
        for (const auto& fb : o.boxes) ++visible[fb.frame_index];
    long fps = 0;
    for (const auto& f : s.frames) fps += long(f.detections.size()) - visible[f.frame_index];
    const double rate = double(fps) / c.n_frames;
    CHECK(std::abs(rate - 0.5) < 4.0 * std::sqrt(0.5 / c.n_frames));
}

TEST_CASE("scores and boxes are always valid") {
    SimConfig c;
    c.n_frames = 500;
    c.bbox_jitter_std = 30.0;
    c.score_std_true = 1.0;
    c.false_positive_rate = 2.0;
    const Scene s = generate_scene(c);
    for (const auto& f : s.frames) {
        for (const auto& d : f.detections) {
            CHECK(d.score >= 0.0);
            CHECK(d.score <= 1.0);
            CHECK(d.box.w() > 0.0);
            CHECK(d.box.h() > 0.0);
        }
    }
}

TEST_CASE("invalid configs are rejected") {
    auto rejects = [](auto mutate) {
        SimConfig c;
        mutate(c);
        CHECK_THROWS_AS(generate_scene(c), std::invalid_argument);
    };
    rejects([](SimConfig& c) { c.n_lanes = 0; });
    rejects([](SimConfig& c) { c.belt_velocity = 0; });
    rejects([](SimConfig& c) { c.label_flip_prob = 1.5; });
    rejects([](SimConfig& c) { c.defect_category_weights = {0, 0, 0}; });
    rejects([](SimConfig& c) { c.spawn_jitter_frames = c.spawn_interval_frames; });
    rejects([](SimConfig& c) { c.false_positive_rate = -1; });
}

TEST_CASE("ground-truth frames regroup object boxes by frame") {
    SimConfig c;
    c.n_frames = 100;
    const Scene s = generate_scene(c);
    const auto frames = ground_truth_frames(s.truth);
    std::size_t total = 0, expected = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0) CHECK(frames[i].frame_index > frames[i - 1].frame_index);
        total += frames[i].detections.size();
    }
    for (const auto& o : s.truth.objects) expected += o.boxes.size();
    CHECK(total == expected);
}
