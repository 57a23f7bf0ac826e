#include "beltrack/byte_tracker.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "beltrack/assignment.hpp"

namespace beltrack {

std::string_view to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tentative: return "tentative";
        case TrackStatus::Active: return "active";
        case TrackStatus::Lost: return "lost";
        case TrackStatus::Removed: return "removed";
    }
    return "unknown";
}

std::optional<BoundingBox> Track::box_at(int frame_index) const {
    auto it = std::lower_bound(history.begin(), history.end(), frame_index,
                               [](const TrackObservation& o, int f) { return o.frame_index < f; });
    if (it != history.end() && it->frame_index == frame_index) return it->box;
    return std::nullopt;
}

void TrackerConfig::validate() const {
    auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    };
    unit(high_score_threshold, "high_score_threshold");
    unit(low_score_threshold, "low_score_threshold");
    unit(match_threshold_first, "match_threshold_first");
    unit(match_threshold_second, "match_threshold_second");
    if (new_track_min_score) unit(*new_track_min_score, "new_track_min_score");
    if (low_score_threshold > high_score_threshold) {
        throw std::invalid_argument("low_score_threshold must not exceed high_score_threshold");
    }
    if (max_frames_lost < 1) throw std::invalid_argument("max_frames_lost must be >= 1");
    if (min_hits_to_activate < 1) throw std::invalid_argument("min_hits_to_activate must be >= 1");
    if (min_track_length_report < 1) throw std::invalid_argument("min_track_length_report must be >= 1");
}

ByteTracker::ByteTracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

Track& ByteTracker::track_by_id(int id) {
    // ids are assigned sequentially from 1 and tracks are never erased
    if (id < 1 || id > int(tracks_.size())) throw std::out_of_range("unknown track id " + std::to_string(id));
    return tracks_[std::size_t(id - 1)];
}

void ByteTracker::apply_match(Track& track, const Detection& det, int frame_index) {
    track.state = kf_update(track.state, det.box, config_.kalman);
    track.history.push_back({frame_index, det.box});
    track.last_update_frame = frame_index;
    ++track.hit_count;
    track.status = track.hit_count >= config_.min_hits_to_activate ? TrackStatus::Active
                                                                    : TrackStatus::Tentative;
}

TrackerOutput ByteTracker::step(const FrameDetections& frame) {
    frame.validate();
    if (last_frame_ && frame.frame_index <= *last_frame_) {
        throw std::invalid_argument("frame " + std::to_string(frame.frame_index) +
                                    " is not after previous frame " + std::to_string(*last_frame_));
    }
    last_frame_ = frame.frame_index;
    const int t = frame.frame_index;
    const auto& dets = frame.detections;

    std::vector<int> high, low;
    for (int j = 0; j < int(dets.size()); ++j) {
        const double s = dets[std::size_t(j)].score;
        if (s >= config_.high_score_threshold) {
            high.push_back(j);
        } else if (s >= config_.low_score_threshold) {
            low.push_back(j);
        }
    }

    TrackerOutput out;
    out.frame_index = t;

    // Predict every live track; a diverged filter retires its track.
    std::vector<int> pool;  // indices into tracks_
    for (int k = 0; k < int(tracks_.size()); ++k) {
        Track& tr = tracks_[std::size_t(k)];
        if (tr.status == TrackStatus::Removed) continue;
        tr.state = kf_predict(tr.state, config_.kalman);
        try {
            (void)state_to_box(tr.state);
        } catch (const FilterDivergence&) {
            tr.status = TrackStatus::Removed;
            out.newly_removed_track_ids.push_back(tr.id);
            continue;
        }
        pool.push_back(k);
    }

    std::vector<char> track_matched(tracks_.size(), 0);
    std::vector<int> det_track(dets.size(), -1);

    auto associate = [&](const std::vector<int>& track_idx, const std::vector<int>& det_idx,
                         double gate) {
        std::vector<BoundingBox> tb, db;
        tb.reserve(track_idx.size());
        db.reserve(det_idx.size());
        for (int k : track_idx) tb.push_back(state_to_box(tracks_[std::size_t(k)].state));
        for (int j : det_idx) db.push_back(dets[std::size_t(j)].box);
        const CostMatrix costs = build_cost_matrix(std::span<const BoundingBox>(tb),
                                                   std::span<const BoundingBox>(db));
        const AssignmentResult res = solve_assignment(costs, gate);
        for (auto [r, c] : res.matches) {
            const int k = track_idx[std::size_t(r)];
            const int j = det_idx[std::size_t(c)];
            track_matched[std::size_t(k)] = 1;
            det_track[std::size_t(j)] = k;
            apply_match(tracks_[std::size_t(k)], dets[std::size_t(j)], t);
        }
    };

    // Stage 1: every live track against high-score detections.
    associate(pool, high, config_.match_threshold_first);

    // Stage 2: still-unmatched Active tracks against low-score detections.
    std::vector<int> remaining_active;
    for (int k : pool) {
        const Track& tr = tracks_[std::size_t(k)];
        if (!track_matched[std::size_t(k)] && tr.status == TrackStatus::Active) remaining_active.push_back(k);
    }
    associate(remaining_active, low, config_.match_threshold_second);

    for (int k : pool) {
        if (track_matched[std::size_t(k)]) continue;
        Track& tr = tracks_[std::size_t(k)];
        switch (tr.status) {
            case TrackStatus::Tentative:
                tr.status = TrackStatus::Removed;
                break;
            case TrackStatus::Active:
                tr.status = TrackStatus::Lost;
                break;
            default:
                break;
        }
        if (tr.status == TrackStatus::Lost && t - tr.last_update_frame > config_.max_frames_lost) {
            tr.status = TrackStatus::Removed;
        }
        if (tr.status == TrackStatus::Removed) out.newly_removed_track_ids.push_back(tr.id);
    }

    // Only unmatched high-score detections may start tracks.
    for (int j : high) {
        const Detection& det = dets[std::size_t(j)];
        if (det_track[std::size_t(j)] >= 0 || det.score < config_.spawn_threshold()) continue;
        Track tr;
        tr.id = next_id_++;
        tr.state = kf_initiate(det.box, config_.kalman);
        tr.history.push_back({t, det.box});
        tr.last_update_frame = t;
        tr.hit_count = 1;
        tr.status = tr.hit_count >= config_.min_hits_to_activate ? TrackStatus::Active
                                                                  : TrackStatus::Tentative;
        det_track[std::size_t(j)] = int(tracks_.size());
        tracks_.push_back(std::move(tr));
    }

    for (int j = 0; j < int(dets.size()); ++j) {
        const int k = det_track[std::size_t(j)];
        if (k < 0) continue;
        const Track& tr = tracks_[std::size_t(k)];
        if (tr.status == TrackStatus::Active) out.active_tracks.push_back({tr.id, state_to_box(tr.state), j});
    }
    std::sort(out.active_tracks.begin(), out.active_tracks.end(),
              [](const ActiveTrack& a, const ActiveTrack& b) { return a.track_id < b.track_id; });
    std::sort(out.newly_removed_track_ids.begin(), out.newly_removed_track_ids.end());
    return out;
}

void ByteTracker::record_prediction(int track_id, int frame_index, const CategoryLabel& label) {
    Track& tr = track_by_id(track_id);
    if (!tr.box_at(frame_index)) {
        throw std::invalid_argument("track " + std::to_string(track_id) + " has no observation at frame " +
                                    std::to_string(frame_index));
    }
    if (!tr.predictions.empty() && tr.predictions.back().frame_index >= frame_index) {
        throw std::invalid_argument("prediction frames must strictly increase");
    }
    tr.predictions.push_back({frame_index, label});
}

std::vector<Track> ByteTracker::finalize() const {
    std::vector<Track> out;
    for (const Track& tr : tracks_) {
        if (tr.length() >= config_.min_track_length_report) out.push_back(tr);
    }
    return out;
}

}  // namespace beltrack
