#pragma once

#include <vector>

#include "ct/assignment.hpp"
#include "ct/compensation.hpp"
#include "ct/mot_io.hpp"
#include "ct/track.hpp"

namespace ct {

struct TrackerParams {
    double det_conf_threshold = 0.4;  // minimum confidence to start a track
    double stage_a_gate = 0.3;        // first cascade gate on 1 - IoU
    double stage_b_gate = 0.5;        // second, looser gate
    double embedding_gate = 0.4;      // cosine-distance gate when embeddings drive stage A
    int max_lost_age = 30;            // frames a lost track is retained
    int probation_frames = 0;         // extra matches required before a new track is output
    bool ct_enabled = true;
    CTParams ct;
    AppearanceParams appearance;
    MotionModel motion;
};

struct FrameDetections {
    int frame_index = 0;  // 1-based, strictly increasing
    std::vector<Detection> detections;
    std::vector<std::vector<float>> embeddings;  // empty, or one per detection
};

struct TrackOutput {
    int id = 0;
    BBox box;
    double conf = 0.0;
};

struct TrackerStats {
    long lost_events = 0;   // per-frame count of tracks left unmatched
    long compensated = 0;   // lost tracks re-tracked by compensation
};

// Per-sequence tracking-by-detection driver: predict, two-stage IoU cascade,
// lifecycle management, and hand-off of the lost set to the compensation
// stage. One instance per sequence; frames must arrive in order.
class Tracker {
public:
    Tracker(TrackerParams params, double image_width, double image_height);

    // Advances one frame and returns the tracked outputs, ordered by id.
    // `frame` is optional; without it patch refresh is skipped and the
    // appearance check follows the configured missing-image policy.
    std::vector<TrackOutput> step(const FrameDetections& fd, const GrayImage* frame = nullptr);

    std::vector<Track> tracked() const;  // snapshot of the tracked set
    std::vector<Track> lost() const;     // snapshot of the lost set
    const TrackerStats& stats() const { return stats_; }
    int frame() const { return frame_; }

private:
    TrackerParams params_;
    double image_width_;
    double image_height_;
    std::vector<Track> live_;  // all non-removed tracks, ascending id
    int next_id_ = 1;
    int frame_ = 0;
    TrackerStats stats_;
};

// Drops lost tracks older than max_lost_age; returns the number removed.
// Tracks in other states are never touched.
int manage_lifecycle(std::vector<Track>& tracks, int max_lost_age);

}  // namespace ct
