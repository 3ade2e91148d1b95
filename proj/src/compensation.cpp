#include "ct/compensation.hpp"

#include <algorithm>
#include <cmath>

namespace ct {

bool ci_filter(int hit_count, int lost_count, int compensation_frame, CiMode mode) {
    if (hit_count - lost_count <= 0) return false;
    if (mode == CiMode::Literal) return hit_count > compensation_frame;
    return lost_count <= compensation_frame;
}

bool bi_filter(const BBox& predicted, double image_width, double alpha) {
    const double x = predicted.center_x();
    const double margin = predicted.w * alpha;
    return x - margin > 0.0 && image_width - x - margin > 0.0;
}

bool bi_filter_vertical(const BBox& predicted, double image_height, double alpha) {
    const double y = predicted.center_y();
    const double margin = predicted.h * alpha;
    return y - margin > 0.0 && image_height - y - margin > 0.0;
}

bool iou_filter(const BBox& predicted, std::span<const BBox> tracked_boxes,
                const CTParams& p) {
    for (const BBox& t : tracked_boxes) {
        const double overlap = iou(predicted, t);
        if (overlap > p.iou_suppress) return false;
        if (containment(predicted, t) > p.containment_suppress) return false;
        if (overlap > 0.0 && area_ratio(predicted, t) > p.area_ratio_suppress) return false;
    }
    return true;
}

BBox bbox_correction(const KalmanState& predicted, const BBox& last_box,
                     double correction_ratio) {
    const BBox box = predicted.box();
    if (area_ratio(box, last_box) <= correction_ratio) return box;
    return {box.center_x() - 0.5 * last_box.w, box.center_y() - 0.5 * last_box.h,
            last_box.w, last_box.h};
}

bool ai_filter(const GrayImage& prev_patch, const GrayImage& cur_patch,
               const CTParams& p, const AppearanceParams& ap) {
    if (prev_patch.empty() || cur_patch.empty()) {
        return p.ai_missing_policy == AiPolicy::Pass;
    }
    const std::optional<int> matches = match_patches(prev_patch, cur_patch, ap);
    if (!matches) return p.ai_small_patch_policy == AiPolicy::Pass;
    return *matches > p.knn_match_threshold;
}

std::vector<Track*> compensate(const CompensationInput& in, const CTParams& p,
                               const AppearanceParams& ap, const MotionModel& mm) {
    std::vector<Track*> accepted;
    for (Track* track : in.lost) {
        KalmanState predicted =
            in.predict_states ? mm.predict(track->kalman) : track->kalman;
        if (in.predict_states) track->kalman = predicted;

        const BBox corrected = bbox_correction(predicted, track->last_box, p.correction_ratio);

        if (p.stage == CtStage::McOs) {
            if (!ci_filter(track->hit_count, track->lost_count, p.compensation_frame,
                           p.ci_mode)) {
                continue;
            }
            if (!bi_filter(corrected, in.image_width, p.boundary_alpha)) continue;
            if (p.bi_vertical &&
                !bi_filter_vertical(corrected, in.image_height, p.boundary_alpha)) {
                continue;
            }
            if (!iou_filter(corrected, in.tracked_boxes, p)) continue;

            bool ai_ok;
            if (in.frame == nullptr) {
                ai_ok = p.ai_missing_policy == AiPolicy::Pass;
            } else {
                const GrayImage cur_patch = crop(*in.frame, corrected);
                ai_ok = ai_filter(track->last_patch, cur_patch, p, ap);
            }
            if (!ai_ok) continue;
        }

        // commit the corrected size into the compensated state
        predicted.mean(2) = corrected.w / corrected.h;
        predicted.mean(3) = corrected.h;
        track->kalman = predicted;
        accepted.push_back(track);
    }
    return accepted;
}

}  // namespace ct
