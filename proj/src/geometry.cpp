#include "ct/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ct {

static double intersection_area(const BBox& a, const BBox& b) {
    const double left = std::max(a.x, b.x);
    const double top = std::max(a.y, b.y);
    const double right = std::min(a.right(), b.right());
    const double bottom = std::min(a.bottom(), b.bottom());
    return std::max(0.0, right - left) * std::max(0.0, bottom - top);
}

double iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

double containment(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    return inter / std::min(a.area(), b.area());
}

double area_ratio(const BBox& a, const BBox& b) {
    const double aa = a.area();
    const double ab = b.area();
    return std::max(aa, ab) / std::min(aa, ab);
}

Xyah to_xyah(const BBox& b) {
    return {b.center_x(), b.center_y(), b.w / b.h, b.h};
}

BBox from_xyah(const Xyah& z) {
    const double a = z[2];
    const double h = z[3];
    if (a <= 0.0 || h <= 0.0) {
        throw std::invalid_argument("from_xyah: aspect and height must be positive");
    }
    const double w = a * h;
    return {z[0] - 0.5 * w, z[1] - 0.5 * h, w, h};
}

}  // namespace ct
