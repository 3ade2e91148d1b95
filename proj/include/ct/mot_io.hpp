#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ct/geometry.hpp"
#include "ct/image.hpp"

namespace ct {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Detection {
    BBox box;
    double conf = 0.0;
};

struct GtEntry {
    int id = 0;
    BBox box;
    double visibility = 1.0;
};

struct ResultRow {
    int frame = 0;
    int id = 0;
    BBox box;
    double conf = 0.0;
};

struct DetFile {
    std::map<int, std::vector<Detection>> frames;
    int skipped_rows = 0;  // rows dropped for nonpositive width/height
};

// det.txt: `frame,-1,x,y,w,h,conf,-1,-1,-1`, 1-based frames.
DetFile read_detections(const std::string& path);
void write_detections(const std::string& path, const std::map<int, std::vector<Detection>>& frames);

// gt.txt: `frame,id,x,y,w,h,flag,class,visibility`; keeps flag=1, class=1 rows.
// Duplicate (frame, id) pairs are a parse error.
std::map<int, std::vector<GtEntry>> read_gt(const std::string& path);
void write_gt(const std::string& path, const std::map<int, std::vector<GtEntry>>& frames);

// results: `frame,id,x,y,w,h,conf,-1,-1,-1`, 6-decimal fixed coordinates,
// ordered by (frame, id).
void write_results(const std::string& path, std::vector<ResultRow> rows);
std::vector<ResultRow> read_results(const std::string& path);

struct SequenceMeta {
    std::string name;
    std::string image_dir = "img1";
    std::string image_ext = ".png";
    double frame_rate = 30.0;
    int seq_length = 0;
    int im_width = 0;
    int im_height = 0;
};

SequenceMeta read_seqinfo(const std::string& path);
void write_seqinfo(const std::string& path, const SequenceMeta& meta);

// `{index:06}.png` / `.jpg` under image_dir; nullopt when the frame file is
// missing (the caller decides the skip policy).
std::optional<GrayImage> load_frame(const std::string& image_dir, int frame_index,
                                    const std::string& ext_hint = "");

// Sidecar embeddings: `frame,det_index,v0,v1,...` aligned with det.txt rows.
std::map<int, std::vector<std::vector<float>>> read_embeddings(const std::string& path);

// Flat `key=value` file with `#`/`;` comments; order preserved.
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path);

}  // namespace ct
