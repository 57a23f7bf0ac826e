// beltrack - track, simulate, evaluate and report on conveyor inspection streams.
//
// Exit codes: 0 success, 1 input error, 2 config error.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "beltrack/config.hpp"
#include "beltrack/conveyor_sim.hpp"
#include "beltrack/metrics.hpp"
#include "beltrack/pipeline.hpp"
#include "beltrack/stream_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace beltrack;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

std::mutex g_log_mutex;

void warn(const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << "warning: " << msg << '\n';
}

/// Command-line flags that mirror config-file keys. Each flag records the
/// section/key it overrides; only flags the user actually passed are applied.
class ConfigFlags {
public:
    template <typename T>
    void add(CLI::App& app, const std::string& flag, const std::string& section, const std::string& key,
             const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app.add_option(flag, *value, help);
        entries_.push_back({section, key, opt, [value] { return json(*value); }});
    }

    json overrides() const {
        json doc = json::object();
        for (const auto& e : entries_) {
            if (e.option->count() > 0) doc[e.section][e.key] = e.value();
        }
        return doc;
    }

    std::string flag_for(const std::string& section, const std::string& key) const {
        for (const auto& e : entries_) {
            if (e.section == section && e.key == key) return e.option->get_name();
        }
        return section + "." + key;
    }

private:
    struct Entry {
        std::string section;
        std::string key;
        CLI::Option* option;
        std::function<json()> value;
    };
    std::vector<Entry> entries_;
};

void add_tracker_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add<double>(app, "--high-score-threshold", "tracker", "high_score_threshold", "first-stage score threshold");
    flags.add<double>(app, "--low-score-threshold", "tracker", "low_score_threshold", "lowest score considered");
    flags.add<double>(app, "--match-threshold-first", "tracker", "match_threshold_first", "max 1-IoU, high stage");
    flags.add<double>(app, "--match-threshold-second", "tracker", "match_threshold_second", "max 1-IoU, low stage");
    flags.add<double>(app, "--new-track-min-score", "tracker", "new_track_min_score", "min score to start a track");
    flags.add<int>(app, "--max-frames-lost", "tracker", "max_frames_lost", "frames a lost track is kept");
    flags.add<int>(app, "--min-hits-to-activate", "tracker", "min_hits_to_activate", "hits before a track reports");
    flags.add<int>(app, "--min-track-length", "tracker", "min_track_length_report", "shortest reported track");
    flags.add<double>(app, "--kf-std-position", "kalman", "std_position", "position noise / height");
    flags.add<double>(app, "--kf-std-velocity", "kalman", "std_velocity", "velocity noise / height");
    flags.add<double>(app, "--kf-std-measurement", "kalman", "std_measurement", "measurement noise / height");
}

void add_aggregation_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add<std::string>(app, "--tie-break", "aggregation", "tie_break", "prefer_defect | lowest_index");
    flags.add<std::string>(app, "--vote-order", "aggregation", "vote_order", "vote_then_collapse | collapse_then_vote");
    flags.add<std::string>(app, "--frame-wise-decision", "aggregation", "frame_wise_decision",
                           "last_frame | first_frame | random_frame");
    flags.add<std::string>(app, "--change-granularity", "aggregation", "change_granularity", "binary | category");
    flags.add<std::uint64_t>(app, "--decision-seed", "aggregation", "random_seed", "seed for random_frame");
}

void add_sim_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add<std::uint64_t>(app, "--seed", "sim", "seed", "PRNG seed");
    flags.add<int>(app, "--lanes", "sim", "n_lanes", "number of belt lanes");
    flags.add<double>(app, "--lane-spacing", "sim", "lane_spacing", "px between lane centres");
    flags.add<double>(app, "--belt-velocity", "sim", "belt_velocity", "px per frame");
    flags.add<int>(app, "--spawn-interval", "sim", "spawn_interval_frames", "frames between spawns per lane");
    flags.add<int>(app, "--spawn-jitter", "sim", "spawn_jitter_frames", "+/- frames of spawn jitter");
    flags.add<double>(app, "--box-size-mean", "sim", "box_size_mean", "mean object size in px");
    flags.add<double>(app, "--box-size-std", "sim", "box_size_std", "object size std in px");
    flags.add<int>(app, "--frames", "sim", "n_frames", "number of frames");
    flags.add<int>(app, "--max-objects", "sim", "max_objects", "stop spawning after this many (0 = no cap)");
    flags.add<double>(app, "--frame-width", "sim", "frame_width", "frame width in px");
    flags.add<double>(app, "--frame-height", "sim", "frame_height", "frame height in px");
    flags.add<double>(app, "--defect-probability", "sim", "defect_probability", "P(object is defective)");
    flags.add<double>(app, "--dropout", "sim", "detection_dropout_prob", "P(detection missing)");
    flags.add<double>(app, "--jitter", "sim", "bbox_jitter_std", "box jitter std in px");
    flags.add<double>(app, "--fp-rate", "sim", "false_positive_rate", "expected false positives per frame");
    flags.add<double>(app, "--score-mean-true", "sim", "score_mean_true", "mean score of true detections");
    flags.add<double>(app, "--score-std-true", "sim", "score_std_true", "score std of true detections");
    flags.add<double>(app, "--score-mean-fp", "sim", "score_mean_fp", "mean score of false positives");
    flags.add<double>(app, "--score-std-fp", "sim", "score_std_fp", "score std of false positives");
    flags.add<double>(app, "--flip-prob", "sim", "label_flip_prob", "per-frame label flip probability");
}

/// Flags first, then the config file on top: the file wins every
/// conflict, and each conflict is reported.
json merged_config(const ConfigFlags& flags, const std::string& config_path) {
    json doc = flags.overrides();
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("BELTRACK_CONFIG"); env && *env) path = env;
    }
    if (path.empty()) return doc;
    const json file = load_config_file(path);
    for (const auto& [section, values] : file.items()) {
        if (!values.is_object()) throw ConfigError("config section \"" + section + "\" must be an object");
        for (const auto& [key, value] : values.items()) {
            if (doc.contains(section) && doc[section].contains(key) && doc[section][key] != value) {
                warn("config file " + path + " overrides " + flags.flag_for(section, key) + " (" +
                     doc[section][key].dump() + " -> " + value.dump() + ")");
            }
            doc[section][key] = value;
        }
    }
    return doc;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string(), 0, "cannot open output file");
    return out;
}

struct TrackOutputs {
    fs::path verdicts, summary, tracks, stream;
};

void write_outputs(const PipelineResult& result, const TrackOutputs& outs, const json& config_doc) {
    if (!outs.verdicts.empty()) {
        auto f = open_output(outs.verdicts);
        write_verdicts(f, result.verdicts);
    }
    if (!outs.tracks.empty()) {
        auto f = open_output(outs.tracks);
        write_tracks(f, result.tracks);
    }
    if (!outs.stream.empty()) {
        auto f = open_output(outs.stream);
        for (const auto& u : result.stream) {
            ordered_json r;
            r["frame"] = u.frame_index;
            r["track_id"] = u.track_id;
            r["category"] = u.category.index();
            r["binary"] = std::string(to_string(u.binary));
            f << r.dump() << '\n';
        }
    }
    ordered_json summary = summary_json(result);
    summary["config"] = config_doc;
    if (!outs.summary.empty()) {
        auto f = open_output(outs.summary);
        f << summary.dump(2) << '\n';
    } else if (outs.verdicts.empty() && outs.tracks.empty()) {
        std::cout << summary.dump(2) << '\n';
    }
}

int run_track(const std::vector<std::string>& inputs, bool mot, bool skip_malformed, TrackOutputs outs,
              const std::string& output_dir, const json& doc) {
    PipelineRun base;
    base.config.tracker = tracker_config_from_json(doc);
    base.config.stability = stability_options_from_json(doc);
    base.config.streaming = !outs.stream.empty() || !output_dir.empty();
    base.ingest.skip_malformed = skip_malformed;
    base.mot_format = mot;
    json config_doc = to_json(base.config.tracker);
    config_doc.update(to_json(base.config.stability));

    if (inputs.size() > 1 && output_dir.empty()) {
        throw ConfigError("several inputs need --output-dir");
    }

    auto process = [&](const std::string& input) {
        PipelineRun run = base;
        run.input = fs::path(input);
        TrackOutputs o = outs;
        if (!output_dir.empty()) {
            const fs::path dir(output_dir);
            const std::string stem = fs::path(input).stem().string();
            o.verdicts = dir / (stem + ".verdicts.jsonl");
            o.summary = dir / (stem + ".summary.json");
            o.tracks = dir / (stem + ".tracks.jsonl");
            o.stream = dir / (stem + ".stream.jsonl");
        }
        const PipelineResult result = execute(run);
        for (const auto& w : result.warnings) warn(w);
        write_outputs(result, o, config_doc);
    };

    if (inputs.size() == 1) {
        process(inputs.front());
        return 0;
    }
    // One pipeline per file; files are independent.
    std::vector<std::future<void>> jobs;
    for (const auto& input : inputs) jobs.push_back(std::async(std::launch::async, process, input));
    int status = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            jobs[i].get();
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(g_log_mutex);
            std::cerr << "error: " << inputs[i] << ": " << e.what() << '\n';
            status = kExitInput;
        }
    }
    return status;
}

int run_simulate(const json& doc, const std::string& detections_path, const std::string& gt_path) {
    const SimConfig cfg = sim_config_from_json(doc);
    const Scene scene = generate_scene(cfg);
    if (!detections_path.empty()) {
        auto f = open_output(detections_path);
        write_detections(f, scene.frames);
    } else {
        write_detections(std::cout, scene.frames);
    }
    if (!gt_path.empty()) {
        auto f = open_output(gt_path);
        write_ground_truth(f, scene.truth);
    }
    const SceneStatistics stats = scene_statistics(scene.truth);
    std::cerr << "simulated " << stats.object_count << " objects, defect fraction " << stats.defect_fraction
              << ", mean lifetime " << stats.mean_lifetime << " frames\n";
    return 0;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); }

int run_evaluate(const std::string& gt_path, const std::string& tracks_path, const std::string& verdicts_path,
                 const std::string& detections_path, double iou_threshold, const std::string& output) {
    const SceneGroundTruth gt = read_ground_truth(fs::path(gt_path));
    ordered_json report;
    report["n_objects"] = gt.objects.size();

    if (!tracks_path.empty()) {
        const std::vector<Track> tracks = read_tracks(fs::path(tracks_path));
        report["n_tracks"] = tracks.size();
        report["id_switches"] = count_id_switches(tracks, gt, iou_threshold);

        if (!verdicts_path.empty()) {
            const auto verdicts = read_verdicts(fs::path(verdicts_path));
            const auto owner = match_tracks_to_objects(tracks, gt, iou_threshold);
            std::map<int, BinaryQuality> truth_of;
            for (const auto& o : gt.objects) truth_of[o.object_id] = to_binary(o.true_category);
            std::vector<BinaryQuality> pred, truth;
            int unmatched = 0;
            for (const auto& rec : verdicts) {
                auto it = owner.find(rec.verdict.track_id);
                if (it == owner.end() || !it->second) {
                    ++unmatched;
                    continue;
                }
                pred.push_back(rec.verdict.final_binary);
                truth.push_back(truth_of.at(*it->second));
            }
            report["verdicts_without_object"] = unmatched;
            if (!pred.empty()) {
                const ClassificationMetrics m = classification_metrics(pred, truth);
                report["classification"] = {{"accuracy", m.accuracy},
                                            {"precision", optional_number(m.precision)},
                                            {"recall", optional_number(m.recall)},
                                            {"f1", optional_number(m.f1)},
                                            {"tp", m.tp},
                                            {"fp", m.fp},
                                            {"fn", m.fn},
                                            {"tn", m.tn}};
            }
        }
    } else if (!verdicts_path.empty()) {
        throw ConfigError("--verdicts needs --tracks to map tracks onto objects");
    }

    if (!detections_path.empty()) {
        const IngestResult dets = ingest_detections(fs::path(detections_path));
        report["average_precision"] = detection_map(dets.frames, ground_truth_frames(gt), iou_threshold);
    }

    if (output.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        auto f = open_output(output);
        f << report.dump(2) << '\n';
    }
    return 0;
}

ordered_json verdict_summary(const std::vector<VerdictRecord>& records) {
    ordered_json j;
    j["n_tracks"] = records.size();
    if (records.empty()) return j;
    std::vector<TrackVerdict> verdicts;
    double stability_sum = 0.0;
    int stability_n = 0;
    for (const auto& r : records) {
        verdicts.push_back(r.verdict);
        if (r.stability_frame_wise) {
            stability_sum += *r.stability_frame_wise;
            ++stability_n;
        }
    }
    j["defect_ratio"] = defect_ratio(verdicts);
    j["n_defect_tracks"] = std::count_if(verdicts.begin(), verdicts.end(),
                                         [](const TrackVerdict& v) { return v.final_binary == BinaryQuality::defect; });
    j["mean_stability_frame_wise"] = stability_n > 0 ? ordered_json(stability_sum / stability_n) : ordered_json();
    j["mean_stability_aggregated"] = 1.0;
    return j;
}

int run_report(const std::vector<std::string>& files) {
    ordered_json out;
    std::vector<VerdictRecord> all;
    ordered_json per_file = ordered_json::object();
    for (const auto& f : files) {
        auto records = read_verdicts(fs::path(f));
        per_file[f] = verdict_summary(records);
        all.insert(all.end(), records.begin(), records.end());
    }
    out["files"] = std::move(per_file);
    out["combined"] = verdict_summary(all);
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conveyor-belt inspection: BYTE tracking with track-level quality aggregation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (default: $BELTRACK_CONFIG)");

    // track
    ConfigFlags track_flags;
    auto* track = app.add_subcommand("track", "run tracking and aggregation over detection streams");
    std::vector<std::string> inputs;
    bool mot = false, skip_malformed = false;
    TrackOutputs outs;
    std::string output_dir;
    track->add_option("--input,-i", inputs, "detection JSONL file(s)")->required();
    track->add_flag("--mot", mot, "inputs are MOT-challenge text files");
    track->add_flag("--skip-malformed", skip_malformed, "skip malformed input lines instead of aborting");
    track->add_option("--verdicts", outs.verdicts, "verdicts JSONL output");
    track->add_option("--summary", outs.summary, "run summary JSON output");
    track->add_option("--tracks", outs.tracks, "track boxes JSONL output");
    track->add_option("--stream-out", outs.stream, "per-frame running majority JSONL output");
    track->add_option("--output-dir", output_dir, "write <stem>.* outputs per input here");
    add_tracker_flags(*track, track_flags);
    add_aggregation_flags(*track, track_flags);

    // simulate
    ConfigFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic conveyor scene");
    std::string sim_detections, sim_gt;
    simulate->add_option("--detections", sim_detections, "detection JSONL output (default stdout)");
    simulate->add_option("--ground-truth", sim_gt, "ground-truth JSONL output");
    add_sim_flags(*simulate, sim_flags);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score tracks, verdicts and detections against ground truth");
    std::string eval_gt, eval_tracks, eval_verdicts, eval_dets, eval_out;
    double eval_iou = 0.5;
    evaluate->add_option("--ground-truth", eval_gt, "ground-truth JSONL")->required();
    evaluate->add_option("--tracks", eval_tracks, "tracks JSONL from `track --tracks`");
    evaluate->add_option("--verdicts", eval_verdicts, "verdicts JSONL from `track --verdicts`");
    evaluate->add_option("--detections", eval_dets, "detection JSONL for average precision");
    evaluate->add_option("--iou-threshold", eval_iou, "IoU threshold for matching")->check(CLI::Range(0.0, 1.0));
    evaluate->add_option("--output,-o", eval_out, "metrics JSON output (default stdout)");

    // report
    auto* report = app.add_subcommand("report", "summarize verdict files");
    std::vector<std::string> report_files;
    report->add_option("verdicts", report_files, "verdict JSONL files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*track) return run_track(inputs, mot, skip_malformed, outs, output_dir, merged_config(track_flags, config_path));
        if (*simulate) return run_simulate(merged_config(sim_flags, config_path), sim_detections, sim_gt);
        if (*evaluate) return run_evaluate(eval_gt, eval_tracks, eval_verdicts, eval_dets, eval_iou, eval_out);
        if (*report) return run_report(report_files);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
