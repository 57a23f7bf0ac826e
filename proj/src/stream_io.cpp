#include "beltrack/stream_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace beltrack {

using nlohmann::json;
using nlohmann::ordered_json;

InputError::InputError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string(), 0, "cannot open file");
    return in;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

/// Calls fn(record, line_number) for every non-blank line. Parse and
/// validation failures become InputError, or are counted and skipped.
template <typename Fn>
int for_each_json_line(std::istream& in, const std::string& source, bool skip_malformed,
                       std::vector<std::string>* warnings, Fn&& fn) {
    std::string line;
    int line_no = 0;
    int skipped = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            const json record = json::parse(line);
            if (!record.is_object()) throw std::invalid_argument("expected a JSON object");
            fn(record, line_no);
        } catch (const std::exception& e) {
            if (!skip_malformed) throw InputError(source, line_no, e.what());
            ++skipped;
            if (warnings) warnings->push_back(InputError(source, line_no, e.what()).what());
        }
    }
    return skipped;
}

const json& field(const json& record, const char* name) {
    auto it = record.find(name);
    if (it == record.end()) throw std::invalid_argument(std::string("missing field \"") + name + "\"");
    return *it;
}

double number(const json& record, const char* name) {
    const json& v = field(record, name);
    if (!v.is_number()) throw std::invalid_argument(std::string("field \"") + name + "\" must be a number");
    return v.get<double>();
}

int integer(const json& record, const char* name) {
    const json& v = field(record, name);
    if (!v.is_number_integer()) throw std::invalid_argument(std::string("field \"") + name + "\" must be an integer");
    return v.get<int>();
}

BoundingBox box_of(const json& record) {
    return BoundingBox(number(record, "x"), number(record, "y"), number(record, "w"), number(record, "h"));
}

IngestResult group_frames(std::vector<Detection> dets, bool file_order_sorted, const std::string& source,
                          std::vector<std::string> warnings, int skipped) {
    IngestResult result;
    result.warnings = std::move(warnings);
    result.skipped_lines = skipped;
    if (!file_order_sorted) {
        result.warnings.push_back(source + ": frames out of order; sorted in memory");
    }
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection& a, const Detection& b) { return a.frame_index < b.frame_index; });
    for (auto& d : dets) {
        if (result.frames.empty() || result.frames.back().frame_index != d.frame_index) {
            result.frames.push_back(FrameDetections{d.frame_index, {}});
        }
        result.frames.back().detections.push_back(std::move(d));
    }
    return result;
}

template <typename Record>
void put_box(Record& r, const BoundingBox& b) {
    r["x"] = b.x();
    r["y"] = b.y();
    r["w"] = b.w();
    r["h"] = b.h();
}

}  // namespace

IngestResult ingest_detections(std::istream& in, const IngestOptions& options, const std::string& source) {
    std::vector<Detection> dets;
    std::vector<std::string> warnings;
    bool sorted = true;
    const int skipped = for_each_json_line(in, source, options.skip_malformed, &warnings, [&](const json& r, int) {
        const int frame = integer(r, "frame");
        std::optional<CategoryLabel> category;
        if (auto it = r.find("category"); it != r.end() && !it->is_null()) {
            if (!it->is_number_integer()) throw std::invalid_argument("field \"category\" must be an integer or null");
            category = CategoryLabel(it->get<int>(), options.num_categories);
        }
        Detection d(frame, box_of(r), number(r, "score"), category);
        if (!dets.empty() && frame < dets.back().frame_index) sorted = false;
        dets.push_back(std::move(d));
    });
    return group_frames(std::move(dets), sorted, source, std::move(warnings), skipped);
}

IngestResult ingest_detections(const std::filesystem::path& path, const IngestOptions& options) {
    auto in = open_input(path);
    return ingest_detections(in, options, path.string());
}

IngestResult ingest_mot(std::istream& in, const IngestOptions& options, const std::string& source) {
    std::vector<Detection> dets;
    std::vector<std::string> warnings;
    bool sorted = true;
    int skipped = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            std::vector<double> cols;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                std::size_t used = 0;
                cols.push_back(std::stod(cell, &used));
                if (!blank(cell.substr(used))) throw std::invalid_argument("non-numeric column \"" + cell + "\"");
            }
            if (cols.size() < 7) throw std::invalid_argument("expected at least 7 comma-separated columns");
            if (cols[0] != double(int(cols[0]))) throw std::invalid_argument("frame must be an integer");
            Detection d(int(cols[0]), BoundingBox(cols[2], cols[3], cols[4], cols[5]), cols[6]);
            if (!dets.empty() && d.frame_index < dets.back().frame_index) sorted = false;
            dets.push_back(std::move(d));
        } catch (const std::exception& e) {
            if (!options.skip_malformed) throw InputError(source, line_no, e.what());
            ++skipped;
            warnings.push_back(InputError(source, line_no, e.what()).what());
        }
    }
    return group_frames(std::move(dets), sorted, source, std::move(warnings), skipped);
}

IngestResult ingest_mot(const std::filesystem::path& path, const IngestOptions& options) {
    auto in = open_input(path);
    return ingest_mot(in, options, path.string());
}

void write_detections(std::ostream& out, const std::vector<FrameDetections>& frames) {
    for (const auto& f : frames) {
        for (const auto& d : f.detections) {
            ordered_json r;
            r["frame"] = d.frame_index;
            put_box(r, d.box);
            r["score"] = d.score;
            r["category"] = d.category_observation ? ordered_json(d.category_observation->index()) : ordered_json();
            out << r.dump() << '\n';
        }
    }
}

void write_ground_truth(std::ostream& out, const SceneGroundTruth& gt) {
    // frame-major order, like a detection stream
    std::vector<std::tuple<int, int, const GroundTruthObject*, const BoundingBox*>> rows;
    for (const auto& o : gt.objects) {
        for (const auto& fb : o.boxes) rows.emplace_back(fb.frame_index, o.object_id, &o, &fb.box);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    for (const auto& [frame, id, obj, box] : rows) {
        ordered_json r;
        r["frame"] = frame;
        r["object_id"] = id;
        put_box(r, *box);
        r["true_category"] = obj->true_category.index();
        out << r.dump() << '\n';
    }
}

SceneGroundTruth read_ground_truth(std::istream& in, const std::string& source) {
    std::map<int, GroundTruthObject> objects;
    for_each_json_line(in, source, false, nullptr, [&](const json& r, int) {
        const int id = integer(r, "object_id");
        const int frame = integer(r, "frame");
        const CategoryLabel category(integer(r, "true_category"));
        auto [it, inserted] = objects.try_emplace(id);
        GroundTruthObject& o = it->second;
        if (inserted) {
            o.object_id = id;
            o.true_category = category;
            o.spawn_frame = frame;
        } else if (!(o.true_category == category)) {
            throw std::invalid_argument("object " + std::to_string(id) + " changes true_category");
        }
        o.boxes.push_back({frame, box_of(r)});
    });
    SceneGroundTruth gt;
    for (auto& [id, o] : objects) {
        std::stable_sort(o.boxes.begin(), o.boxes.end(),
                         [](const FrameBox& a, const FrameBox& b) { return a.frame_index < b.frame_index; });
        o.spawn_frame = o.boxes.front().frame_index;
        gt.objects.push_back(std::move(o));
    }
    return gt;
}

SceneGroundTruth read_ground_truth(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_ground_truth(in, path.string());
}

void write_tracks(std::ostream& out, const std::vector<Track>& tracks) {
    std::vector<std::tuple<int, int, const BoundingBox*>> rows;
    for (const auto& t : tracks) {
        for (const auto& obs : t.history) rows.emplace_back(obs.frame_index, t.id, &obs.box);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    for (const auto& [frame, id, box] : rows) {
        ordered_json r;
        r["frame"] = frame;
        r["track_id"] = id;
        put_box(r, *box);
        out << r.dump() << '\n';
    }
}

std::vector<Track> read_tracks(std::istream& in, const std::string& source) {
    std::map<int, Track> tracks;
    for_each_json_line(in, source, false, nullptr, [&](const json& r, int) {
        const int id = integer(r, "track_id");
        Track& t = tracks[id];
        t.id = id;
        const int frame = integer(r, "frame");
        if (!t.history.empty() && t.history.back().frame_index >= frame) {
            throw std::invalid_argument("track " + std::to_string(id) + " frames must strictly increase");
        }
        t.history.push_back({frame, box_of(r)});
        t.last_update_frame = frame;
        t.hit_count = int(t.history.size());
        t.status = TrackStatus::Removed;
    });
    std::vector<Track> out;
    out.reserve(tracks.size());
    for (auto& [id, t] : tracks) out.push_back(std::move(t));
    return out;
}

std::vector<Track> read_tracks(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_tracks(in, path.string());
}

void write_verdicts(std::ostream& out, const std::vector<VerdictRecord>& verdicts) {
    for (const auto& rec : verdicts) {
        const TrackVerdict& v = rec.verdict;
        ordered_json r;
        r["track_id"] = v.track_id;
        r["category"] = v.final_category.index();
        r["binary"] = std::string(to_string(v.final_binary));
        r["k"] = v.track_length;
        r["votes"] = v.vote_counts;
        r["stability_frame_wise"] = rec.stability_frame_wise ? ordered_json(*rec.stability_frame_wise) : ordered_json();
        out << r.dump() << '\n';
    }
}

std::vector<VerdictRecord> read_verdicts(std::istream& in, const std::string& source) {
    std::vector<VerdictRecord> out;
    for_each_json_line(in, source, false, nullptr, [&](const json& r, int) {
        VerdictRecord rec;
        TrackVerdict& v = rec.verdict;
        v.track_id = integer(r, "track_id");
        const json& votes = field(r, "votes");
        if (!votes.is_array() || votes.size() < 2) throw std::invalid_argument("field \"votes\" must be an array");
        for (const auto& c : votes) {
            if (!c.is_number_integer() || c.get<int>() < 0) throw std::invalid_argument("vote counts must be non-negative integers");
            v.vote_counts.push_back(c.get<int>());
        }
        v.final_category = CategoryLabel(integer(r, "category"), int(v.vote_counts.size()));
        const json& binary = field(r, "binary");
        if (!binary.is_string()) throw std::invalid_argument("field \"binary\" must be a string");
        v.final_binary = binary_from_string(binary.get<std::string>());
        v.track_length = integer(r, "k");
        if (auto it = r.find("stability_frame_wise"); it != r.end() && !it->is_null()) {
            if (!it->is_number()) throw std::invalid_argument("field \"stability_frame_wise\" must be a number");
            rec.stability_frame_wise = it->get<double>();
        }
        out.push_back(std::move(rec));
    });
    return out;
}

std::vector<VerdictRecord> read_verdicts(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_verdicts(in, path.string());
}

}  // namespace beltrack
