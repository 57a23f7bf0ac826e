#include "beltrack/aggregation.hpp"

#include <stdexcept>
#include <string>

namespace beltrack {

PredictionBuffer::PredictionBuffer(int track_id, int num_categories)
    : track_id_(track_id), num_categories_(num_categories) {
    if (num_categories < 2) throw std::invalid_argument("need at least two categories");
}

void PredictionBuffer::record(int frame_index, const CategoryLabel& label) {
    if (!entries_.empty() && frame_index <= entries_.back().frame_index) {
        throw std::invalid_argument("prediction for track " + std::to_string(track_id_) + " at frame " +
                                    std::to_string(frame_index) + " is not after frame " +
                                    std::to_string(entries_.back().frame_index));
    }
    if (label.num_categories() != num_categories_) {
        throw std::invalid_argument("label category count does not match buffer");
    }
    entries_.push_back({frame_index, label});
}

int argmax_votes(const std::vector<int>& counts, TieBreak tie_break) {
    if (counts.empty()) throw std::invalid_argument("no categories to vote over");
    int best = 0;
    for (int c = 1; c < int(counts.size()); ++c) {
        if (counts[std::size_t(c)] > counts[std::size_t(best)]) best = c;
    }
    if (tie_break == TieBreak::prefer_defect && best == 0) {
        for (int c = 1; c < int(counts.size()); ++c) {
            if (counts[std::size_t(c)] == counts[0]) return c;
        }
    }
    return best;
}

TrackVerdict majority_vote(const PredictionBuffer& buffer, const AggregationConfig& config) {
    if (buffer.empty()) {
        throw std::invalid_argument("track " + std::to_string(buffer.track_id()) + " has no predictions");
    }
    const int n = buffer.num_categories();
    TrackVerdict v;
    v.track_id = buffer.track_id();
    v.vote_counts.assign(std::size_t(n), 0);
    for (const auto& e : buffer.entries()) ++v.vote_counts[std::size_t(e.label.index())];
    v.track_length = buffer.size();

    int winner = 0;
    if (config.order == VoteOrder::vote_then_collapse) {
        winner = argmax_votes(v.vote_counts, config.tie_break);
    } else {
        const int normal = v.vote_counts[0];
        const int defect = v.track_length - normal;
        const bool is_defect = defect > normal || (defect == normal && config.tie_break == TieBreak::prefer_defect);
        if (is_defect) {
            std::vector<int> defect_counts(v.vote_counts.begin() + 1, v.vote_counts.end());
            winner = 1 + argmax_votes(defect_counts, TieBreak::lowest_index);
        }
    }
    v.final_category = CategoryLabel(winner, n);
    v.final_binary = to_binary(v.final_category);
    return v;
}

std::vector<BinaryQuality> frame_wise_verdicts(const PredictionBuffer& buffer) {
    if (buffer.empty()) {
        throw std::invalid_argument("track " + std::to_string(buffer.track_id()) + " has no predictions");
    }
    std::vector<BinaryQuality> out;
    out.reserve(buffer.entries().size());
    for (const auto& e : buffer.entries()) out.push_back(to_binary(e.label));
    return out;
}

StreamingVoter::StreamingVoter(int track_id, int num_categories, AggregationConfig config)
    : buffer_(track_id, num_categories), config_(config) {}

void StreamingVoter::add(int frame_index, const CategoryLabel& label) { buffer_.record(frame_index, label); }

TrackVerdict StreamingVoter::current() const { return majority_vote(buffer_, config_); }

}  // namespace beltrack
