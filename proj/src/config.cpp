#include "beltrack/config.hpp"

#include <fstream>
#include <set>
#include <string>

namespace beltrack {

using nlohmann::json;

namespace {

/// Reads named keys out of one config section, remembering which keys it
/// has seen so leftovers can be reported.
class SectionReader {
public:
    SectionReader(const json& doc, const char* section) : name_(section) {
        if (auto it = doc.find(section); it != doc.end()) {
            if (!it->is_object()) throw ConfigError(std::string("config section \"") + section + "\" must be an object");
            section_ = &*it;
        }
    }

    template <typename T>
    void read(const char* key, T& target) {
        known_.insert(key);
        if (!section_) return;
        auto it = section_->find(key);
        if (it == section_->end()) return;
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!it->is_number()) throw ConfigError("expected a number");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError("expected an integer");
            }
            target = it->get<T>();
        } catch (const std::exception& e) {
            throw ConfigError(name_ + "." + key + ": " + e.what());
        }
    }

    void read(const char* key, std::optional<double>& target) {
        known_.insert(key);
        if (!section_) return;
        auto it = section_->find(key);
        if (it == section_->end()) return;
        if (it->is_null()) {
            target.reset();
        } else if (it->is_number()) {
            target = it->get<double>();
        } else {
            throw ConfigError(name_ + "." + key + ": expected a number or null");
        }
    }

    template <typename Enum, std::size_t N>
    void read_enum(const char* key, Enum& target, const std::pair<const char*, Enum> (&names)[N]) {
        known_.insert(key);
        if (!section_) return;
        auto it = section_->find(key);
        if (it == section_->end()) return;
        if (it->is_string()) {
            for (const auto& [n, v] : names) {
                if (it->get<std::string>() == n) {
                    target = v;
                    return;
                }
            }
        }
        std::string allowed;
        for (const auto& [n, v] : names) allowed += std::string(allowed.empty() ? "" : ", ") + n;
        throw ConfigError(name_ + "." + key + ": expected one of " + allowed);
    }

    void finish() const {
        if (!section_) return;
        for (const auto& [k, v] : section_->items()) {
            if (!known_.count(k)) throw ConfigError("unknown config key " + name_ + "." + k);
        }
    }

private:
    std::string name_;
    const json* section_ = nullptr;
    std::set<std::string> known_;
};

constexpr std::pair<const char*, TieBreak> kTieBreaks[] = {{"prefer_defect", TieBreak::prefer_defect},
                                                           {"lowest_index", TieBreak::lowest_index}};
constexpr std::pair<const char*, VoteOrder> kVoteOrders[] = {
    {"vote_then_collapse", VoteOrder::vote_then_collapse}, {"collapse_then_vote", VoteOrder::collapse_then_vote}};
constexpr std::pair<const char*, FrameWiseDecision> kDecisions[] = {{"last_frame", FrameWiseDecision::last_frame},
                                                                    {"first_frame", FrameWiseDecision::first_frame},
                                                                    {"random_frame", FrameWiseDecision::random_frame}};
constexpr std::pair<const char*, ChangeGranularity> kGranularities[] = {
    {"binary", ChangeGranularity::binary}, {"category", ChangeGranularity::category}};

template <typename Enum, std::size_t N>
const char* enum_name(Enum v, const std::pair<const char*, Enum> (&names)[N]) {
    for (const auto& [n, e] : names) {
        if (e == v) return n;
    }
    return "";
}

void require_object(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
}

}  // namespace

TrackerConfig tracker_config_from_json(const json& doc, TrackerConfig c) {
    require_object(doc);
    SectionReader t(doc, "tracker");
    t.read("high_score_threshold", c.high_score_threshold);
    t.read("low_score_threshold", c.low_score_threshold);
    t.read("match_threshold_first", c.match_threshold_first);
    t.read("match_threshold_second", c.match_threshold_second);
    t.read("new_track_min_score", c.new_track_min_score);
    t.read("max_frames_lost", c.max_frames_lost);
    t.read("min_hits_to_activate", c.min_hits_to_activate);
    t.read("min_track_length_report", c.min_track_length_report);
    t.finish();

    SectionReader k(doc, "kalman");
    k.read("std_position", c.kalman.std_position);
    k.read("std_velocity", c.kalman.std_velocity);
    k.read("std_measurement", c.kalman.std_measurement);
    k.read("init_position_factor", c.kalman.init_position_factor);
    k.read("init_velocity_factor", c.kalman.init_velocity_factor);
    k.read("std_aspect", c.kalman.std_aspect);
    k.read("std_aspect_velocity", c.kalman.std_aspect_velocity);
    k.read("std_aspect_measurement", c.kalman.std_aspect_measurement);
    k.finish();

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

SimConfig sim_config_from_json(const json& doc, SimConfig c) {
    require_object(doc);
    SectionReader s(doc, "sim");
    s.read("seed", c.seed);
    s.read("n_lanes", c.n_lanes);
    s.read("lane_spacing", c.lane_spacing);
    s.read("belt_velocity", c.belt_velocity);
    s.read("spawn_interval_frames", c.spawn_interval_frames);
    s.read("spawn_jitter_frames", c.spawn_jitter_frames);
    s.read("box_size_mean", c.box_size_mean);
    s.read("box_size_std", c.box_size_std);
    s.read("n_frames", c.n_frames);
    s.read("max_objects", c.max_objects);
    s.read("frame_width", c.frame_width);
    s.read("frame_height", c.frame_height);
    s.read("defect_probability", c.defect_probability);
    s.read("defect_category_weights", c.defect_category_weights);
    s.read("detection_dropout_prob", c.detection_dropout_prob);
    s.read("bbox_jitter_std", c.bbox_jitter_std);
    s.read("false_positive_rate", c.false_positive_rate);
    s.read("score_mean_true", c.score_mean_true);
    s.read("score_std_true", c.score_std_true);
    s.read("score_mean_fp", c.score_mean_fp);
    s.read("score_std_fp", c.score_std_fp);
    s.read("label_flip_prob", c.label_flip_prob);
    s.finish();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

StabilityOptions stability_options_from_json(const json& doc, StabilityOptions o) {
    require_object(doc);
    SectionReader a(doc, "aggregation");
    a.read_enum("tie_break", o.aggregation.tie_break, kTieBreaks);
    a.read_enum("vote_order", o.aggregation.order, kVoteOrders);
    a.read_enum("frame_wise_decision", o.decision, kDecisions);
    a.read_enum("change_granularity", o.granularity, kGranularities);
    a.read("random_seed", o.random_seed);
    a.finish();
    return o;
}

json to_json(const TrackerConfig& c) {
    json doc;
    doc["tracker"] = {
        {"high_score_threshold", c.high_score_threshold},
        {"low_score_threshold", c.low_score_threshold},
        {"match_threshold_first", c.match_threshold_first},
        {"match_threshold_second", c.match_threshold_second},
        {"new_track_min_score", c.new_track_min_score ? json(*c.new_track_min_score) : json()},
        {"max_frames_lost", c.max_frames_lost},
        {"min_hits_to_activate", c.min_hits_to_activate},
        {"min_track_length_report", c.min_track_length_report},
    };
    doc["kalman"] = {
        {"std_position", c.kalman.std_position},
        {"std_velocity", c.kalman.std_velocity},
        {"std_measurement", c.kalman.std_measurement},
        {"init_position_factor", c.kalman.init_position_factor},
        {"init_velocity_factor", c.kalman.init_velocity_factor},
        {"std_aspect", c.kalman.std_aspect},
        {"std_aspect_velocity", c.kalman.std_aspect_velocity},
        {"std_aspect_measurement", c.kalman.std_aspect_measurement},
    };
    return doc;
}

json to_json(const SimConfig& c) {
    json doc;
    doc["sim"] = {
        {"seed", c.seed},
        {"n_lanes", c.n_lanes},
        {"lane_spacing", c.lane_spacing},
        {"belt_velocity", c.belt_velocity},
        {"spawn_interval_frames", c.spawn_interval_frames},
        {"spawn_jitter_frames", c.spawn_jitter_frames},
        {"box_size_mean", c.box_size_mean},
        {"box_size_std", c.box_size_std},
        {"n_frames", c.n_frames},
        {"max_objects", c.max_objects},
        {"frame_width", c.frame_width},
        {"frame_height", c.frame_height},
        {"defect_probability", c.defect_probability},
        {"defect_category_weights", c.defect_category_weights},
        {"detection_dropout_prob", c.detection_dropout_prob},
        {"bbox_jitter_std", c.bbox_jitter_std},
        {"false_positive_rate", c.false_positive_rate},
        {"score_mean_true", c.score_mean_true},
        {"score_std_true", c.score_std_true},
        {"score_mean_fp", c.score_mean_fp},
        {"score_std_fp", c.score_std_fp},
        {"label_flip_prob", c.label_flip_prob},
    };
    return doc;
}

json to_json(const StabilityOptions& o) {
    json doc;
    doc["aggregation"] = {
        {"tie_break", enum_name(o.aggregation.tie_break, kTieBreaks)},
        {"vote_order", enum_name(o.aggregation.order, kVoteOrders)},
        {"frame_wise_decision", enum_name(o.decision, kDecisions)},
        {"change_granularity", enum_name(o.granularity, kGranularities)},
        {"random_seed", o.random_seed},
    };
    return doc;
}

json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    require_object(doc);
    static const std::set<std::string> sections = {"tracker", "kalman", "aggregation", "sim"};
    for (const auto& [k, v] : doc.items()) {
        if (!sections.count(k)) throw ConfigError("unknown config section \"" + k + "\" in " + path.string());
    }
    return doc;
}

}  // namespace beltrack
