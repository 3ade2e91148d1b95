#include "ct/pipeline.hpp"

#include <chrono>
#include <filesystem>

namespace ct {

TrackRunResult run_tracking(const TrackRunOptions& opts) {
    namespace fs = std::filesystem;
    const SequenceMeta meta = read_seqinfo((fs::path(opts.seq_dir) / "seqinfo.ini").string());

    const std::string det_path = opts.det_path.empty()
                                     ? (fs::path(opts.seq_dir) / "det" / "det.txt").string()
                                     : opts.det_path;
    const DetFile dets = read_detections(det_path);
    TrackRunResult result;
    result.skipped_det_rows = dets.skipped_rows;

    std::string frames_dir;
    if (opts.frames_dir == "auto") {
        const fs::path candidate = fs::path(opts.seq_dir) / meta.image_dir;
        if (fs::is_directory(candidate)) frames_dir = candidate.string();
    } else {
        frames_dir = opts.frames_dir;
    }

    std::map<int, std::vector<std::vector<float>>> embeddings;
    if (!opts.emb_path.empty()) embeddings = read_embeddings(opts.emb_path);

    Tracker tracker(opts.config.tracker, meta.im_width, meta.im_height);

    const auto t0 = std::chrono::steady_clock::now();
    for (int frame = 1; frame <= meta.seq_length; ++frame) {
        FrameDetections fd;
        fd.frame_index = frame;
        if (auto it = dets.frames.find(frame); it != dets.frames.end()) {
            fd.detections = it->second;
        }
        if (auto it = embeddings.find(frame); it != embeddings.end()) {
            fd.embeddings = it->second;
        }

        std::optional<GrayImage> image;
        if (!frames_dir.empty()) image = load_frame(frames_dir, frame, meta.image_ext);

        const auto outputs = tracker.step(fd, image ? &*image : nullptr);
        for (const TrackOutput& o : outputs) {
            result.rows.push_back({frame, o.id, o.box, o.conf});
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.stats = tracker.stats();
    result.output_boxes = static_cast<long>(result.rows.size());

    const fs::path gt_path = fs::path(opts.seq_dir) / "gt" / "gt.txt";
    if (fs::exists(gt_path)) {
        long count = 0;
        for (const auto& [_, entries] : read_gt(gt_path.string())) {
            count += static_cast<long>(entries.size());
        }
        result.gt_boxes = count;
    }
    return result;
}

}  // namespace ct
