#pragma once

#include <string>
#include <vector>

#include "ct/config.hpp"
#include "ct/mot_io.hpp"
#include "ct/tracker.hpp"

namespace ct {

struct TrackRunOptions {
    std::string seq_dir;     // must contain seqinfo.ini
    std::string det_path;    // default: seq_dir/det/det.txt
    std::string frames_dir;  // "" = no frames; "auto" = seqinfo imDir when present
    std::string emb_path;    // optional embeddings sidecar
    RunConfig config;
};

struct TrackRunResult {
    std::vector<ResultRow> rows;
    TrackerStats stats;
    long output_boxes = 0;
    long gt_boxes = -1;      // -1 when no gt.txt is present
    int skipped_det_rows = 0;
    double wall_seconds = 0.0;
};

// Full per-sequence run: detection ingest, frame loop, compensation per
// config. Deterministic for identical inputs and config.
TrackRunResult run_tracking(const TrackRunOptions& opts);

}  // namespace ct
