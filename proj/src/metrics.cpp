#include "beltrack/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace beltrack {

double defect_ratio(const std::vector<BinaryQuality>& decisions) {
    if (decisions.empty()) throw std::invalid_argument("defect ratio is undefined for zero tracks");
    const auto defects = std::count(decisions.begin(), decisions.end(), BinaryQuality::defect);
    return double(defects) / double(decisions.size());
}

double defect_ratio(const std::vector<TrackVerdict>& verdicts) {
    std::vector<BinaryQuality> decisions;
    decisions.reserve(verdicts.size());
    for (const auto& v : verdicts) decisions.push_back(v.final_binary);
    return defect_ratio(decisions);
}

template <typename Label>
double temporal_stability(const std::vector<Label>& labels) {
    if (labels.empty()) throw std::invalid_argument("temporal stability needs a non-empty label sequence");
    int changes = 0;
    for (std::size_t t = 1; t < labels.size(); ++t) {
        if (labels[t] != labels[t - 1]) ++changes;
    }
    return 1.0 - double(changes) / double(labels.size());
}

template double temporal_stability(const std::vector<BinaryQuality>&);
template double temporal_stability(const std::vector<int>&);

std::vector<BinaryQuality> frame_wise_decisions(const std::vector<PredictionBuffer>& buffers,
                                                const StabilityOptions& options) {
    std::mt19937_64 rng(options.random_seed);
    std::vector<BinaryQuality> out;
    out.reserve(buffers.size());
    for (const auto& b : buffers) {
        const auto labels = frame_wise_verdicts(b);
        switch (options.decision) {
            case FrameWiseDecision::last_frame: out.push_back(labels.back()); break;
            case FrameWiseDecision::first_frame: out.push_back(labels.front()); break;
            case FrameWiseDecision::random_frame: {
                std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
                out.push_back(labels[pick(rng)]);
                break;
            }
        }
    }
    return out;
}

VideoQualityReport stability_report(const std::vector<PredictionBuffer>& buffers, StabilityMode mode,
                                    const StabilityOptions& options) {
    if (buffers.empty()) throw std::invalid_argument("stability report needs at least one track");
    VideoQualityReport report;
    std::vector<BinaryQuality> decisions;
    decisions.reserve(buffers.size());

    if (mode == StabilityMode::frame_wise) {
        decisions = frame_wise_decisions(buffers, options);
        for (const auto& b : buffers) {
            double s = 0.0;
            if (options.granularity == ChangeGranularity::binary) {
                s = temporal_stability(frame_wise_verdicts(b));
            } else {
                std::vector<int> idx;
                idx.reserve(b.entries().size());
                for (const auto& e : b.entries()) idx.push_back(e.label.index());
                s = temporal_stability(idx);
            }
            report.per_track_stability[b.track_id()] = s;
        }
    } else {
        for (const auto& b : buffers) {
            const TrackVerdict v = majority_vote(b, options.aggregation);
            decisions.push_back(v.final_binary);
            const std::vector<int> constant(std::size_t(v.track_length), v.final_category.index());
            report.per_track_stability[b.track_id()] = temporal_stability(constant);
        }
    }

    report.n_total_tracks = int(decisions.size());
    report.n_defect_tracks = int(std::count(decisions.begin(), decisions.end(), BinaryQuality::defect));
    report.defect_ratio = defect_ratio(decisions);
    double sum = 0.0;
    for (const auto& [id, s] : report.per_track_stability) sum += s;
    report.mean_stability = sum / double(report.per_track_stability.size());
    return report;
}

ClassificationMetrics classification_metrics(const std::vector<BinaryQuality>& pred,
                                             const std::vector<BinaryQuality>& truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("prediction and truth lengths differ (" + std::to_string(pred.size()) +
                                    " vs " + std::to_string(truth.size()) + ")");
    }
    if (pred.empty()) throw std::invalid_argument("classification metrics need at least one sample");
    ClassificationMetrics m;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == BinaryQuality::defect;
        const bool t = truth[i] == BinaryQuality::defect;
        if (p && t) ++m.tp;
        else if (p && !t) ++m.fp;
        else if (!p && t) ++m.fn;
        else ++m.tn;
    }
    m.accuracy = double(m.tp + m.tn) / double(pred.size());
    if (m.tp + m.fp > 0) m.precision = double(m.tp) / double(m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = double(m.tp) / double(m.tp + m.fn);
    if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    } else if (m.precision && m.recall) {
        m.f1 = 0.0;
    }
    return m;
}

double detection_map(const std::vector<FrameDetections>& dets, const std::vector<FrameDetections>& gt,
                     double iou_threshold) {
    std::map<int, std::vector<BoundingBox>> gt_by_frame;
    std::size_t n_gt = 0;
    for (const auto& f : gt) {
        auto& boxes = gt_by_frame[f.frame_index];
        for (const auto& d : f.detections) boxes.push_back(d.box);
        n_gt += f.detections.size();
    }
    if (n_gt == 0) throw std::invalid_argument("average precision is undefined without ground-truth boxes");

    struct Ranked {
        double score;
        int frame;
        const BoundingBox* box;
    };
    std::vector<Ranked> ranked;
    for (const auto& f : dets) {
        for (const auto& d : f.detections) ranked.push_back({d.score, f.frame_index, &d.box});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

    std::map<int, std::vector<char>> used;
    for (const auto& [frame, boxes] : gt_by_frame) used[frame].assign(boxes.size(), 0);

    std::vector<double> precision, recall;
    precision.reserve(ranked.size());
    recall.reserve(ranked.size());
    int tp = 0, fp = 0;
    for (const auto& r : ranked) {
        int best = -1;
        double best_iou = iou_threshold;
        if (auto it = gt_by_frame.find(r.frame); it != gt_by_frame.end()) {
            auto& flags = used[r.frame];
            for (std::size_t g = 0; g < it->second.size(); ++g) {
                if (flags[g]) continue;
                const double o = iou(*r.box, it->second[g]);
                if (o >= best_iou && (best < 0 || o > best_iou)) {
                    best = int(g);
                    best_iou = o;
                }
            }
            if (best >= 0) flags[std::size_t(best)] = 1;
        }
        if (best >= 0) ++tp;
        else ++fp;
        precision.push_back(double(tp) / double(tp + fp));
        recall.push_back(double(tp) / double(n_gt));
    }

    // All-point interpolation: precision envelope integrated over recall steps.
    for (int i = int(precision.size()) - 2; i >= 0; --i) {
        precision[std::size_t(i)] = std::max(precision[std::size_t(i)], precision[std::size_t(i) + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return ap;
}

namespace {

using FrameIndex = std::map<int, std::vector<std::pair<int, BoundingBox>>>;

FrameIndex index_tracks_by_frame(const std::vector<Track>& tracks) {
    FrameIndex by_frame;
    for (const auto& tr : tracks) {
        for (const auto& obs : tr.history) by_frame[obs.frame_index].emplace_back(tr.id, obs.box);
    }
    return by_frame;
}

std::optional<int> covering_track(const FrameIndex& by_frame, const FrameBox& truth, double min_iou) {
    auto it = by_frame.find(truth.frame_index);
    if (it == by_frame.end()) return std::nullopt;
    std::optional<int> best;
    double best_iou = min_iou;
    for (const auto& [id, box] : it->second) {
        const double o = iou(box, truth.box);
        if (o >= best_iou && (!best || o > best_iou)) {
            best = id;
            best_iou = o;
        }
    }
    return best;
}

}  // namespace

int count_id_switches(const std::vector<Track>& tracks, const SceneGroundTruth& gt, double min_iou) {
    const FrameIndex by_frame = index_tracks_by_frame(tracks);
    int switches = 0;
    for (const auto& obj : gt.objects) {
        std::optional<int> previous;
        for (const auto& fb : obj.boxes) {
            const auto current = covering_track(by_frame, fb, min_iou);
            if (!current) continue;
            if (previous && *previous != *current) ++switches;
            previous = current;
        }
    }
    return switches;
}

std::map<int, std::optional<int>> match_tracks_to_objects(const std::vector<Track>& tracks,
                                                          const SceneGroundTruth& gt, double min_iou) {
    std::map<int, std::map<int, int>> overlap_frames;  // track -> object -> frames
    const FrameIndex by_frame = index_tracks_by_frame(tracks);
    for (const auto& obj : gt.objects) {
        for (const auto& fb : obj.boxes) {
            auto it = by_frame.find(fb.frame_index);
            if (it == by_frame.end()) continue;
            for (const auto& [id, box] : it->second) {
                if (iou(box, fb.box) >= min_iou) ++overlap_frames[id][obj.object_id];
            }
        }
    }
    std::map<int, std::optional<int>> out;
    for (const auto& tr : tracks) {
        std::optional<int> best;
        int best_count = 0;
        if (auto it = overlap_frames.find(tr.id); it != overlap_frames.end()) {
            for (const auto& [obj_id, count] : it->second) {
                if (count > best_count) {
                    best = obj_id;
                    best_count = count;
                }
            }
        }
        out[tr.id] = best;
    }
    return out;
}

}  // namespace beltrack
