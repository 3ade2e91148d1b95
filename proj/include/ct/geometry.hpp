#pragma once

#include <array>

namespace ct {

// Axis-aligned box in top-left/width/height form, continuous (sub-pixel)
// pixel coordinates. Width and height must be positive for a valid box.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double center_x() const { return x + 0.5 * w; }
    double center_y() const { return y + 0.5 * h; }
    bool valid() const { return w > 0.0 && h > 0.0; }
};

// [center_x, center_y, width/height, height]
using Xyah = std::array<double, 4>;

// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

// Intersection over the smaller box's area; 1 when one box lies inside the other.
double containment(const BBox& a, const BBox& b);

// Symmetric area change: max(area)/min(area), always >= 1.
double area_ratio(const BBox& a, const BBox& b);

Xyah to_xyah(const BBox& b);

// Inverse of to_xyah. Throws std::invalid_argument when a <= 0 or h <= 0.
BBox from_xyah(const Xyah& z);

}  // namespace ct
