#pragma once

#include <vector>

#include "beltrack/box.hpp"

namespace beltrack {

/// Per-track store of per-frame category predictions, frame indices
/// strictly increasing.
class PredictionBuffer {
public:
    struct Entry {
        int frame_index;
        CategoryLabel label;
    };

    explicit PredictionBuffer(int track_id = 0, int num_categories = kDefaultNumCategories);

    /// Appends a prediction; std::invalid_argument when frame_index does not
    /// exceed the last recorded frame or the label's category count differs.
    void record(int frame_index, const CategoryLabel& label);

    int track_id() const { return track_id_; }
    int num_categories() const { return num_categories_; }
    const std::vector<Entry>& entries() const { return entries_; }
    int size() const { return int(entries_.size()); }
    bool empty() const { return entries_.empty(); }

private:
    int track_id_;
    int num_categories_;
    std::vector<Entry> entries_;
};

enum class TieBreak {
    prefer_defect,  // any defect category beats fresh, then lowest index
    lowest_index,
};

enum class VoteOrder {
    vote_then_collapse,  // argmax over all categories, then binary collapse
    collapse_then_vote,  // binary majority first, then best category inside it
};

struct AggregationConfig {
    TieBreak tie_break = TieBreak::prefer_defect;
    VoteOrder order = VoteOrder::vote_then_collapse;
};

struct TrackVerdict {
    int track_id = 0;
    CategoryLabel final_category{0};
    BinaryQuality final_binary = BinaryQuality::normal;
    std::vector<int> vote_counts;
    int track_length = 0;  // number of votes k
};

/// Winning index of a count vector under the given tie rule.
int argmax_votes(const std::vector<int>& counts, TieBreak tie_break);

/// Track-level label by majority vote over the buffer. Throws
/// std::invalid_argument for an empty buffer.
TrackVerdict majority_vote(const PredictionBuffer& buffer, const AggregationConfig& config = {});

/// Per-frame binary labels with no aggregation.
std::vector<BinaryQuality> frame_wise_verdicts(const PredictionBuffer& buffer);

/// Incremental voter for live displays: current() re-evaluates the running
/// majority after each add().
class StreamingVoter {
public:
    explicit StreamingVoter(int track_id, int num_categories = kDefaultNumCategories,
                            AggregationConfig config = {});
    void add(int frame_index, const CategoryLabel& label);
    TrackVerdict current() const;

private:
    PredictionBuffer buffer_;
    AggregationConfig config_;
};

}  // namespace beltrack
