#include "ct/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ct {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double lattice_value(std::uint64_t seed, int level, std::int64_t ix, std::int64_t iy) {
    std::uint64_t h = seed;
    h = splitmix64(h ^ (0x100000001b3ULL * static_cast<std::uint64_t>(level + 1)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(ix * 0x9e3779b97f4a7c15LL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(iy * 0xc2b2ae3d27d4eb4fLL));
    return static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53);
}

double lattice_bilinear(std::uint64_t seed, int level, double x, double y) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = x - fx;
    const double ty = y - fy;
    const double v00 = lattice_value(seed, level, ix, iy);
    const double v10 = lattice_value(seed, level, ix + 1, iy);
    const double v01 = lattice_value(seed, level, ix, iy + 1);
    const double v11 = lattice_value(seed, level, ix + 1, iy + 1);
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

BBox clip_to_image(const BBox& b, int w, int h) {
    const double x0 = std::max(0.0, b.x);
    const double y0 = std::max(0.0, b.y);
    const double x1 = std::min(static_cast<double>(w), b.right());
    const double y1 = std::min(static_cast<double>(h), b.bottom());
    return {x0, y0, x1 - x0, y1 - y0};
}

std::vector<std::pair<int, int>> parse_ranges(const std::string& value) {
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const size_t dash = item.find('-');
        if (dash == std::string::npos) {
            const int v = std::stoi(item);
            out.emplace_back(v, v);
        } else {
            out.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
        }
    }
    return out;
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

}  // namespace

double value_noise(std::uint64_t seed, double u, double v) {
    // two interpolated layers for large-scale variety plus an un-interpolated
    // block layer whose step edges keep scale-space contrast after blurring
    const double low = lattice_bilinear(seed, 0, u * 3.0, v * 3.0);
    const double mid = lattice_bilinear(seed, 1, u * 6.0, v * 6.0);
    const double blocks = lattice_value(seed, 2, static_cast<std::int64_t>(std::floor(u * 12.0)),
                                        static_cast<std::int64_t>(std::floor(v * 12.0)));
    return 0.2 * low + 0.25 * mid + 0.55 * blocks;
}

GrayImage noise_patch(std::uint64_t seed, int w, int h) {
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w;
            const double v = (y + 0.5) / h;
            out.at(x, y) = static_cast<float>(0.1 + 0.8 * value_noise(seed, u, v));
        }
    }
    return out;
}

BBox object_box_at(const ObjectSpec& obj, int frame) {
    const double t = frame - obj.first_frame;
    const double cx = obj.start.center_x() + obj.vx * t + 0.5 * obj.ax * t * t;
    const double cy = obj.start.center_y() + obj.vy * t + 0.5 * obj.ay * t * t;
    return {cx - 0.5 * obj.start.w, cy - 0.5 * obj.start.h, obj.start.w, obj.start.h};
}

GeneratedData generate(const ScenarioSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0 || spec.frames < 1) {
        throw std::invalid_argument("scenario: invalid image size or frame count");
    }
    for (const ObjectSpec& obj : spec.objects) {
        for (const auto& [a, b] : obj.dropouts) {
            if (a < 1 || b > spec.frames || a > b) {
                throw std::invalid_argument("scenario: dropout window outside sequence");
            }
        }
    }

    GeneratedData out;
    out.meta.name = spec.name;
    out.meta.frame_rate = spec.frame_rate;
    out.meta.seq_length = spec.frames;
    out.meta.im_width = spec.width;
    out.meta.im_height = spec.height;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const float bg = 0.45f;
    for (int frame = 1; frame <= spec.frames; ++frame) {
        GrayImage img;
        if (spec.render_frames) img = GrayImage(spec.width, spec.height, bg);

        for (size_t oi = 0; oi < spec.objects.size(); ++oi) {
            const ObjectSpec& obj = spec.objects[oi];
            const int id = static_cast<int>(oi) + 1;
            const int last = obj.last_frame > 0 ? obj.last_frame : spec.frames;

            // jitter draws advance in a fixed order regardless of visibility
            const double jx = normal(rng);
            const double jy = normal(rng);
            const double jw = normal(rng);
            const double jh = normal(rng);

            if (frame < obj.first_frame || frame > last) continue;
            const BBox true_box = object_box_at(obj, frame);
            const BBox gt_box = clip_to_image(true_box, spec.width, spec.height);
            if (!gt_box.valid()) continue;
            out.gt[frame].push_back({id, gt_box, 1.0});

            if (spec.render_frames) {
                const int px0 = std::max(0, static_cast<int>(std::floor(true_box.x)));
                const int py0 = std::max(0, static_cast<int>(std::floor(true_box.y)));
                const int px1 = std::min(spec.width, static_cast<int>(std::ceil(true_box.right())));
                const int py1 = std::min(spec.height, static_cast<int>(std::ceil(true_box.bottom())));
                const std::uint64_t seed = obj.texture_seed != 0
                                               ? obj.texture_seed
                                               : spec.seed * 1000003ULL + id;
                for (int py = py0; py < py1; ++py) {
                    for (int px = px0; px < px1; ++px) {
                        const double u = (px + 0.5 - true_box.x) / true_box.w;
                        const double v = (py + 0.5 - true_box.y) / true_box.h;
                        if (u < 0.0 || u >= 1.0 || v < 0.0 || v >= 1.0) continue;
                        img.at(px, py) = static_cast<float>(0.1 + 0.8 * value_noise(seed, u, v));
                    }
                }
            }

            bool dropped = false;
            for (const auto& [a, b] : obj.dropouts) {
                if (frame >= a && frame <= b) {
                    dropped = true;
                    break;
                }
            }
            if (dropped) continue;

            BBox det_box = gt_box;
            if (spec.jitter_pos > 0.0 || spec.jitter_scale > 0.0) {
                const double w = gt_box.w * std::exp(spec.jitter_scale * jw);
                const double h = gt_box.h * std::exp(spec.jitter_scale * jh);
                const double cx = gt_box.center_x() + spec.jitter_pos * jx;
                const double cy = gt_box.center_y() + spec.jitter_pos * jy;
                det_box = clip_to_image({cx - 0.5 * w, cy - 0.5 * h, w, h}, spec.width,
                                        spec.height);
            }
            if (det_box.w > 1.0 && det_box.h > 1.0) {
                out.det[frame].push_back({det_box, spec.det_conf});
            }
        }
        if (spec.render_frames) out.frames.push_back(std::move(img));
    }
    return out;
}

std::string generate_sequence(const ScenarioSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    fs::create_directories(root / "gt");
    fs::create_directories(root / "det");
    fs::create_directories(root / "img1");

    GeneratedData data = generate(spec);
    data.meta.image_dir = "img1";
    data.meta.image_ext = ".png";
    write_seqinfo((root / "seqinfo.ini").string(), data.meta);
    write_gt((root / "gt" / "gt.txt").string(), data.gt);
    write_detections((root / "det" / "det.txt").string(), data.det);
    for (size_t i = 0; i < data.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%06zu.png", i + 1);
        save_png((root / "img1" / name).string(), data.frames[i]);
    }
    return root.string();
}

ScenarioSpec load_scenario(const std::string& path) {
    ScenarioSpec spec;
    std::map<int, ObjectSpec> objects;
    for (const auto& [key, value] : read_kv_file(path)) {
        if (key == "name") spec.name = value;
        else if (key == "width") spec.width = std::stoi(value);
        else if (key == "height") spec.height = std::stoi(value);
        else if (key == "frames") spec.frames = std::stoi(value);
        else if (key == "frame_rate") spec.frame_rate = std::stod(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else if (key == "jitter_pos") spec.jitter_pos = std::stod(value);
        else if (key == "jitter_scale") spec.jitter_scale = std::stod(value);
        else if (key == "det_conf") spec.det_conf = std::stod(value);
        else if (key == "render_frames") spec.render_frames = (value == "true" || value == "1");
        else if (key.rfind("object", 0) == 0) {
            const size_t dot = key.find('.');
            if (dot == std::string::npos) {
                throw ParseError(path + ": expected objectN.field, got '" + key + "'");
            }
            const int index = std::stoi(key.substr(6, dot - 6));
            const std::string field = key.substr(dot + 1);
            ObjectSpec& obj = objects[index];
            if (field == "start") {
                const auto v = parse_list(value);
                if (v.size() != 4) throw ParseError(path + ": start expects x,y,w,h");
                obj.start = {v[0], v[1], v[2], v[3]};
            } else if (field == "vel") {
                const auto v = parse_list(value);
                if (v.size() != 2) throw ParseError(path + ": vel expects vx,vy");
                obj.vx = v[0];
                obj.vy = v[1];
            } else if (field == "curve") {
                const auto v = parse_list(value);
                if (v.size() != 2) throw ParseError(path + ": curve expects ax,ay");
                obj.ax = v[0];
                obj.ay = v[1];
            } else if (field == "life") {
                const auto r = parse_ranges(value);
                if (r.size() != 1) throw ParseError(path + ": life expects first-last");
                obj.first_frame = r[0].first;
                obj.last_frame = r[0].second;
            } else if (field == "dropout") {
                obj.dropouts = parse_ranges(value);
            } else if (field == "seed") {
                obj.texture_seed = std::stoull(value);
            } else {
                throw ParseError(path + ": unknown object field '" + field + "'");
            }
        } else {
            throw ParseError(path + ": unknown scenario key '" + key + "'");
        }
    }
    for (const auto& [index, obj] : objects) {
        if (!obj.start.valid()) {
            throw ParseError(path + ": object" + std::to_string(index) + " has no valid start box");
        }
        spec.objects.push_back(obj);
    }
    return spec;
}

}  // namespace ct
