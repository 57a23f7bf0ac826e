#include "beltrack/pipeline.hpp"

#include <algorithm>

namespace beltrack {

namespace {

std::vector<FrameDetections> normalize_frames(std::vector<FrameDetections> frames,
                                              std::vector<std::string>& warnings) {
    const bool sorted = std::is_sorted(frames.begin(), frames.end(), [](const auto& a, const auto& b) {
        return a.frame_index < b.frame_index;
    });
    if (!sorted) {
        warnings.push_back("input frames out of order; sorted in memory");
        std::stable_sort(frames.begin(), frames.end(),
                         [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
    }
    std::vector<FrameDetections> out;
    out.reserve(frames.size());
    for (auto& f : frames) {
        f.validate();
        if (!out.empty() && out.back().frame_index == f.frame_index) {
            auto& dst = out.back().detections;
            dst.insert(dst.end(), std::make_move_iterator(f.detections.begin()),
                       std::make_move_iterator(f.detections.end()));
            continue;
        }
        while (!out.empty() && out.back().frame_index + 1 < f.frame_index) {
            out.push_back(FrameDetections{out.back().frame_index + 1, {}});
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

PipelineResult run_pipeline(std::vector<FrameDetections> frames, const PipelineConfig& config) {
    PipelineResult result;
    frames = normalize_frames(std::move(frames), result.warnings);

    ByteTracker tracker(config.tracker);
    std::map<int, PredictionBuffer> buffers;
    for (const auto& frame : frames) {
        const TrackerOutput out = tracker.step(frame);
        for (const auto& active : out.active_tracks) {
            const Detection& det = frame.detections[std::size_t(active.detection_index)];
            if (!det.category_observation) continue;
            const CategoryLabel label(det.category_observation->index(), config.num_categories);
            tracker.record_prediction(active.track_id, frame.frame_index, label);
            auto [it, inserted] =
                buffers.try_emplace(active.track_id, PredictionBuffer(active.track_id, config.num_categories));
            it->second.record(frame.frame_index, label);
            if (config.streaming) {
                const TrackVerdict running = majority_vote(it->second, config.stability.aggregation);
                result.stream.push_back({frame.frame_index, active.track_id, running.final_category, running.final_binary});
            }
        }
    }

    result.tracks = tracker.finalize();
    std::vector<PredictionBuffer> reported;
    for (const auto& tr : result.tracks) {
        auto it = buffers.find(tr.id);
        if (it == buffers.end()) continue;
        reported.push_back(it->second);
    }
    if (reported.empty()) return result;

    result.frame_wise = stability_report(reported, StabilityMode::frame_wise, config.stability);
    result.aggregated = stability_report(reported, StabilityMode::aggregated, config.stability);
    for (const auto& b : reported) {
        VerdictRecord rec;
        rec.verdict = majority_vote(b, config.stability.aggregation);
        rec.stability_frame_wise = result.frame_wise->per_track_stability.at(b.track_id());
        result.verdicts.push_back(std::move(rec));
    }
    return result;
}

PipelineResult execute(const PipelineRun& run) {
    std::vector<FrameDetections> frames;
    std::vector<std::string> warnings;
    if (const auto* path = std::get_if<std::filesystem::path>(&run.input)) {
        IngestOptions opts = run.ingest;
        opts.num_categories = run.config.num_categories;
        IngestResult ingested = run.mot_format ? ingest_mot(*path, opts) : ingest_detections(*path, opts);
        frames = std::move(ingested.frames);
        warnings = std::move(ingested.warnings);
    } else {
        frames = generate_scene(std::get<SimConfig>(run.input)).frames;
    }
    PipelineResult result = run_pipeline(std::move(frames), run.config);
    result.warnings.insert(result.warnings.begin(), warnings.begin(), warnings.end());
    return result;
}

nlohmann::ordered_json to_json(const VideoQualityReport& report) {
    nlohmann::ordered_json j;
    j["defect_ratio"] = report.defect_ratio;
    j["mean_stability"] = report.mean_stability;
    j["n_total_tracks"] = report.n_total_tracks;
    j["n_defect_tracks"] = report.n_defect_tracks;
    nlohmann::ordered_json per_track = nlohmann::ordered_json::object();
    for (const auto& [id, s] : report.per_track_stability) per_track[std::to_string(id)] = s;
    j["per_track_stability"] = std::move(per_track);
    return j;
}

nlohmann::ordered_json summary_json(const PipelineResult& result) {
    nlohmann::ordered_json j;
    j["n_tracks"] = result.tracks.size();
    j["n_tracks_with_predictions"] = result.verdicts.size();
    j["frame_wise"] = result.frame_wise ? to_json(*result.frame_wise) : nlohmann::ordered_json();
    j["aggregated"] = result.aggregated ? to_json(*result.aggregated) : nlohmann::ordered_json();
    return j;
}

}  // namespace beltrack
