#pragma once

#include <vector>

#include "ct/geometry.hpp"
#include "ct/image.hpp"
#include "ct/kalman.hpp"

namespace ct {

enum class TrackState { New, Tracked, Lost, Removed };

// Identity-bearing object. hit_count / lost_count are cumulative frame
// counters: successful matches and unmatched frames respectively
// (lost_count resets on a real match, never on compensation).
struct Track {
    int id = 0;
    TrackState state = TrackState::New;
    KalmanState kalman;
    BBox last_box;                 // box at the most recent real match
    int hit_count = 0;
    int lost_count = 0;
    int frames_since_update = 0;   // frames since last tracked output
    GrayImage last_patch;          // clip of the frame at the last tracked box
    double confidence = 0.0;
    std::vector<float> embedding;

    BBox box() const { return kalman.box(); }
};

}  // namespace ct
