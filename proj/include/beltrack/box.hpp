#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beltrack {

/// Axis-aligned box in pixel coordinates, stored as top-left corner plus
/// width and height. Construction rejects non-positive extents and
/// non-finite coordinates, so every live BoundingBox is valid.
class BoundingBox {
public:
    BoundingBox(double x, double y, double w, double h);

    double x() const { return x_; }
    double y() const { return y_; }
    double w() const { return w_; }
    double h() const { return h_; }

    double right() const { return x_ + w_; }
    double bottom() const { return y_ + h_; }
    double center_x() const { return x_ + 0.5 * w_; }
    double center_y() const { return y_ + 0.5 * h_; }
    double area() const { return w_ * h_; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

private:
    double x_;
    double y_;
    double w_;
    double h_;
};

/// A box observed at a given frame.
struct FrameBox {
    int frame_index;
    BoundingBox box;

    friend bool operator==(const FrameBox&, const FrameBox&) = default;
};

/// Intersection over union; 0 for disjoint boxes, exactly 1 for identical ones.
double iou(const BoundingBox& a, const BoundingBox& b);

inline constexpr int kDefaultNumCategories = 4;

/// Canonical category indices. Index 0 must stay "fresh": the binary
/// collapse treats every other index as a defect.
enum class Category : int { fresh = 0, bruise_defect = 1, rot_defect = 2, scab_defect = 3 };

class CategoryLabel {
public:
    CategoryLabel(int index, int num_categories = kDefaultNumCategories);
    CategoryLabel(Category c) : CategoryLabel(static_cast<int>(c)) {}

    int index() const { return index_; }
    int num_categories() const { return num_categories_; }

    friend bool operator==(const CategoryLabel&, const CategoryLabel&) = default;

private:
    int index_;
    int num_categories_;
};

/// Name of a default-ordering category ("fresh", "bruise_defect", ...), or
/// "category_<n>" for indices beyond the default set.
std::string category_name(int index);

enum class BinaryQuality { normal, defect };

BinaryQuality to_binary(const CategoryLabel& label);

std::string_view to_string(BinaryQuality q);
/// Parses "normal" / "defect"; throws std::invalid_argument otherwise.
BinaryQuality binary_from_string(std::string_view s);

struct Detection {
    Detection(int frame_index, BoundingBox box, double score,
              std::optional<CategoryLabel> category_observation = std::nullopt);

    int frame_index;
    BoundingBox box;
    double score;
    std::optional<CategoryLabel> category_observation;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// All detections observed at one frame.
struct FrameDetections {
    int frame_index = 0;
    std::vector<Detection> detections;

    /// Throws std::invalid_argument when a detection carries another frame index.
    void validate() const;

    friend bool operator==(const FrameDetections&, const FrameDetections&) = default;
};

}  // namespace beltrack
