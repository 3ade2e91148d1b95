#pragma once

#include <map>
#include <string>
#include <vector>

#include "ct/geometry.hpp"
#include "ct/mot_io.hpp"

namespace ct {

struct IdBox {
    int id = 0;
    BBox box;
};

// frame index -> boxes present in that frame
using Timeline = std::map<int, std::vector<IdBox>>;

Timeline timeline_from_gt(const std::map<int, std::vector<GtEntry>>& gt);
Timeline timeline_from_results(const std::vector<ResultRow>& rows);

struct ClearReport {
    double mota = 0.0;
    double motp = 0.0;  // mean IoU over matches
    int fp = 0;
    int fn = 0;
    int id_switches = 0;
    int fragmentations = 0;
    int mostly_tracked = 0;   // coverage >= 80% of the trajectory span
    int mostly_lost = 0;      // coverage <= 20%
    int total_gt_tracks = 0;
    int total_gt_boxes = 0;
    int total_matches = 0;
    double faf = 0.0;  // false alarms per frame
};

struct IdReport {
    double idf1 = 0.0;
    int idtp = 0;
    int idfp = 0;
    int idfn = 0;
};

struct MetricsReport {
    ClearReport clear;
    IdReport id;
};

// CLEAR matching per frame: prior correspondences persist while still within
// the gate, the residual is matched by minimum-cost assignment over 1 - IoU.
// Throws std::invalid_argument on empty ground truth.
ClearReport evaluate_clear(const Timeline& gt, const Timeline& hyp, double iou_gate = 0.5);

// Trajectory-level identity matching; picks the id assignment maximizing
// overlapping boxes, equivalently minimizing non-overlapping box count.
IdReport evaluate_id(const Timeline& gt, const Timeline& hyp, double iou_gate = 0.5);

MetricsReport evaluate(const Timeline& gt, const Timeline& hyp, double iou_gate = 0.5);

std::string format_report_table(const MetricsReport& r);
std::string format_report_csv(const MetricsReport& r);

}  // namespace ct
