#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ct/appearance.hpp"
#include "ct/track.hpp"

namespace ct {

enum class CiMode {
    Literal,  // hit_count - lost_count > 0 and hit_count > compensation_frame
    LostAge,  // hit_count - lost_count > 0 and lost_count <= compensation_frame
};

enum class AiPolicy { Fail, Pass };

enum class CtStage { Mc, McOs };  // motion compensation alone, or with object selection

struct CTParams {
    int compensation_frame = 30;   // C_F
    int knn_match_threshold = 5;   // accepted-match count the appearance check must exceed
    double boundary_alpha = 0.5;
    double iou_suppress = 0.3;
    double containment_suppress = 0.8;
    double area_ratio_suppress = 2.0;
    double correction_ratio = 1.1;
    CiMode ci_mode = CiMode::Literal;
    bool bi_vertical = false;      // optional symmetric vertical boundary check
    AiPolicy ai_missing_policy = AiPolicy::Fail;
    AiPolicy ai_small_patch_policy = AiPolicy::Fail;
    CtStage stage = CtStage::McOs;
};

// Track-history confidence check.
bool ci_filter(int hit_count, int lost_count, int compensation_frame,
               CiMode mode = CiMode::Literal);

// Image-boundary check on the predicted box's center abscissa.
bool bi_filter(const BBox& predicted, double image_width, double alpha);
bool bi_filter_vertical(const BBox& predicted, double image_height, double alpha);

// False when the predicted box must be suppressed against any tracked box:
// iou, containment (embedding degree) or area-ratio evidence of overlap.
bool iou_filter(const BBox& predicted, std::span<const BBox> tracked_boxes,
                const CTParams& p);

// Box from the predicted mean; when its area changed by more than
// correction_ratio vs. the last tracked box, width/height revert to the
// original size around the predicted center.
BBox bbox_correction(const KalmanState& predicted, const BBox& last_box,
                     double correction_ratio);

// Keypoint-match verification between the stored patch and the patch at the
// predicted location.
bool ai_filter(const GrayImage& prev_patch, const GrayImage& cur_patch,
               const CTParams& p, const AppearanceParams& ap);

struct CompensationInput {
    std::span<Track*> lost;
    std::span<const BBox> tracked_boxes;
    const GrayImage* frame = nullptr;  // null triggers ai_missing_policy
    double image_width = 0.0;
    double image_height = 0.0;
    bool predict_states = true;  // false when the caller already advanced the filters
};

// Runs motion compensation plus the selection cascade over the lost set and
// returns the accepted tracks. Accepted tracks get their filter state
// committed to the compensated (corrected) values; rejected tracks are left
// with the plain predicted state.
std::vector<Track*> compensate(const CompensationInput& in, const CTParams& p,
                               const AppearanceParams& ap, const MotionModel& mm);

}  // namespace ct
