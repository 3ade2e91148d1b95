#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ct/image.hpp"
#include "ct/metrics.hpp"
#include "ct/mot_io.hpp"

namespace ct {

struct ObjectSpec {
    BBox start;                 // box at the first alive frame
    double vx = 0.0;            // center velocity, px/frame
    double vy = 0.0;
    double ax = 0.0;            // optional curvature, px/frame^2
    double ay = 0.0;
    int first_frame = 1;
    int last_frame = 0;         // 0 = sequence end
    std::uint64_t texture_seed = 0;
    std::vector<std::pair<int, int>> dropouts;  // inclusive detection-dropout ranges
};

struct ScenarioSpec {
    std::string name = "synthetic";
    int width = 640;
    int height = 480;
    int frames = 100;
    double frame_rate = 30.0;
    std::uint64_t seed = 1;
    double jitter_pos = 0.0;    // std of center jitter, px
    double jitter_scale = 0.0;  // std of log-dimension jitter
    double det_conf = 0.95;
    bool render_frames = true;
    std::vector<ObjectSpec> objects;
};

// Scenario description in the flat key=value dialect.
ScenarioSpec load_scenario(const std::string& path);

struct GeneratedData {
    std::map<int, std::vector<GtEntry>> gt;
    std::map<int, std::vector<Detection>> det;
    std::vector<GrayImage> frames;  // empty when render_frames is off
    SequenceMeta meta;
};

// Deterministic generation: ground truth boxes, jittered detections minus
// dropout windows, and value-noise textured frames. Identical (spec, seed)
// yields identical output.
GeneratedData generate(const ScenarioSpec& spec);

// generate() plus the MOT directory layout on disk:
// out_dir/seqinfo.ini, gt/gt.txt, det/det.txt, img1/000001.png ...
// Returns the sequence directory (== out_dir).
std::string generate_sequence(const ScenarioSpec& spec, const std::string& out_dir);

// Multi-frequency seeded value noise in [0, 1]; the per-object texture source.
double value_noise(std::uint64_t seed, double u, double v);

// Standalone textured patch built from the same noise (test fixtures).
GrayImage noise_patch(std::uint64_t seed, int w, int h);

// Exact object box at a frame, before clipping; invalid when not alive.
BBox object_box_at(const ObjectSpec& obj, int frame);

}  // namespace ct
