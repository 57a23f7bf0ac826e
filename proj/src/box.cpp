#include "beltrack/box.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beltrack {

BoundingBox::BoundingBox(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h)) {
        throw std::invalid_argument("bounding box has non-finite coordinates");
    }
    if (w <= 0.0 || h <= 0.0) {
        throw std::invalid_argument("bounding box must have positive width and height (w=" +
                                    std::to_string(w) + ", h=" + std::to_string(h) + ")");
    }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (a == b) return 1.0;
    const double iw = std::min(a.right(), b.right()) - std::max(a.x(), b.x());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y(), b.y());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

CategoryLabel::CategoryLabel(int index, int num_categories)
    : index_(index), num_categories_(num_categories) {
    if (num_categories < 2) throw std::invalid_argument("need at least two categories");
    if (index < 0 || index >= num_categories) {
        throw std::invalid_argument("category index " + std::to_string(index) +
                                    " outside [0, " + std::to_string(num_categories - 1) + "]");
    }
}

std::string category_name(int index) {
    static constexpr std::array<const char*, 4> names = {"fresh", "bruise_defect", "rot_defect",
                                                         "scab_defect"};
    if (index >= 0 && index < static_cast<int>(names.size())) return names[index];
    return "category_" + std::to_string(index);
}

BinaryQuality to_binary(const CategoryLabel& label) {
    return label.index() == 0 ? BinaryQuality::normal : BinaryQuality::defect;
}

std::string_view to_string(BinaryQuality q) {
    return q == BinaryQuality::normal ? "normal" : "defect";
}

BinaryQuality binary_from_string(std::string_view s) {
    if (s == "normal") return BinaryQuality::normal;
    if (s == "defect") return BinaryQuality::defect;
    throw std::invalid_argument("expected \"normal\" or \"defect\", got \"" + std::string(s) + "\"");
}

Detection::Detection(int frame, BoundingBox b, double s, std::optional<CategoryLabel> category)
    : frame_index(frame), box(b), score(s), category_observation(category) {
    if (frame < 0) throw std::invalid_argument("frame index must be non-negative");
    if (!(s >= 0.0 && s <= 1.0)) {
        throw std::invalid_argument("detection score " + std::to_string(s) + " outside [0, 1]");
    }
}

void FrameDetections::validate() const {
    for (const auto& d : detections) {
        if (d.frame_index != frame_index) {
            throw std::invalid_argument("detection at frame " + std::to_string(d.frame_index) +
                                        " grouped under frame " + std::to_string(frame_index));
        }
    }
}

}  // namespace beltrack
