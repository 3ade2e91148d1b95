#include "ct/mot_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace ct {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

[[noreturn]] void fail(const std::string& path, int line_no, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_num(const std::string& s, const std::string& path, int line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) fail(path, line_no, "malformed number '" + s + "'");
        if (!std::isfinite(v)) fail(path, line_no, "non-finite value '" + s + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(path, line_no, "malformed number '" + s + "'");
    }
}

int parse_int(const std::string& s, const std::string& path, int line_no) {
    const double v = parse_num(s, path, line_no);
    const int i = static_cast<int>(std::llround(v));
    if (std::fabs(v - i) > 1e-9) fail(path, line_no, "expected integer, got '" + s + "'");
    return i;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return in;
}

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

DetFile read_detections(const std::string& path) {
    std::ifstream in = open_input(path);
    DetFile out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 7) fail(path, line_no, "expected at least 7 fields");
        const int frame = parse_int(fields[0], path, line_no);
        if (frame < 1) fail(path, line_no, "frame index must be >= 1");
        BBox box{parse_num(fields[2], path, line_no), parse_num(fields[3], path, line_no),
                 parse_num(fields[4], path, line_no), parse_num(fields[5], path, line_no)};
        const double conf = parse_num(fields[6], path, line_no);
        if (!box.valid()) {
            ++out.skipped_rows;
            continue;
        }
        out.frames[frame].push_back({box, conf});
    }
    return out;
}

void write_detections(const std::string& path, const std::map<int, std::vector<Detection>>& frames) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (const auto& [frame, dets] : frames) {
        for (const Detection& d : dets) {
            out << frame << ",-1," << format_fixed(d.box.x) << ',' << format_fixed(d.box.y) << ','
                << format_fixed(d.box.w) << ',' << format_fixed(d.box.h) << ','
                << format_fixed(d.conf) << ",-1,-1,-1\n";
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<int, std::vector<GtEntry>> read_gt(const std::string& path) {
    std::ifstream in = open_input(path);
    std::map<int, std::vector<GtEntry>> out;
    std::set<std::pair<int, int>> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 9) fail(path, line_no, "expected at least 9 fields");
        const int frame = parse_int(fields[0], path, line_no);
        const int id = parse_int(fields[1], path, line_no);
        if (frame < 1) fail(path, line_no, "frame index must be >= 1");
        BBox box{parse_num(fields[2], path, line_no), parse_num(fields[3], path, line_no),
                 parse_num(fields[4], path, line_no), parse_num(fields[5], path, line_no)};
        const int flag = parse_int(fields[6], path, line_no);
        const int cls = parse_int(fields[7], path, line_no);
        const double visibility = parse_num(fields[8], path, line_no);
        if (!seen.insert({frame, id}).second) {
            fail(path, line_no, "duplicate identity " + std::to_string(id) + " in frame " +
                                    std::to_string(frame));
        }
        if (flag != 1 || cls != 1) continue;
        if (!box.valid()) fail(path, line_no, "nonpositive box size in ground truth");
        out[frame].push_back({id, box, visibility});
    }
    return out;
}

void write_gt(const std::string& path, const std::map<int, std::vector<GtEntry>>& frames) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (const auto& [frame, entries] : frames) {
        for (const GtEntry& e : entries) {
            out << frame << ',' << e.id << ',' << format_fixed(e.box.x) << ','
                << format_fixed(e.box.y) << ',' << format_fixed(e.box.w) << ','
                << format_fixed(e.box.h) << ",1,1," << format_fixed(e.visibility) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_results(const std::string& path, std::vector<ResultRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
    });
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (const ResultRow& r : rows) {
        out << r.frame << ',' << r.id << ',' << format_fixed(r.box.x) << ','
            << format_fixed(r.box.y) << ',' << format_fixed(r.box.w) << ','
            << format_fixed(r.box.h) << ',' << format_fixed(r.conf) << ",-1,-1,-1\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<ResultRow> read_results(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<ResultRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 7) fail(path, line_no, "expected at least 7 fields");
        ResultRow r;
        r.frame = parse_int(fields[0], path, line_no);
        r.id = parse_int(fields[1], path, line_no);
        r.box = {parse_num(fields[2], path, line_no), parse_num(fields[3], path, line_no),
                 parse_num(fields[4], path, line_no), parse_num(fields[5], path, line_no)};
        r.conf = parse_num(fields[6], path, line_no);
        if (r.id < 1) fail(path, line_no, "track id must be positive");
        if (!r.box.valid()) fail(path, line_no, "nonpositive box size");
        rows.push_back(r);
    }
    return rows;
}

std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos) fail(path, line_no, "expected key=value");
        out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return out;
}

SequenceMeta read_seqinfo(const std::string& path) {
    SequenceMeta meta;
    for (const auto& [key, value] : read_kv_file(path)) {
        std::string k = key;
        std::transform(k.begin(), k.end(), k.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (k == "name") meta.name = value;
        else if (k == "imdir") meta.image_dir = value;
        else if (k == "imext") meta.image_ext = value;
        else if (k == "framerate") meta.frame_rate = parse_num(value, path, 0);
        else if (k == "seqlength") meta.seq_length = parse_int(value, path, 0);
        else if (k == "imwidth") meta.im_width = parse_int(value, path, 0);
        else if (k == "imheight") meta.im_height = parse_int(value, path, 0);
    }
    if (meta.seq_length < 1 || meta.im_width <= 0 || meta.im_height <= 0) {
        throw ParseError(path + ": missing or invalid seqLength/imWidth/imHeight");
    }
    return meta;
}

void write_seqinfo(const std::string& path, const SequenceMeta& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "[Sequence]\n";
    out << "name=" << meta.name << '\n';
    out << "imDir=" << meta.image_dir << '\n';
    out << "frameRate=" << meta.frame_rate << '\n';
    out << "seqLength=" << meta.seq_length << '\n';
    out << "imWidth=" << meta.im_width << '\n';
    out << "imHeight=" << meta.im_height << '\n';
    out << "imExt=" << meta.image_ext << '\n';
}

std::optional<GrayImage> load_frame(const std::string& image_dir, int frame_index,
                                    const std::string& ext_hint) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06d", frame_index);
    std::vector<std::string> exts;
    if (!ext_hint.empty()) exts.push_back(ext_hint);
    for (const char* e : {".png", ".jpg", ".jpeg"}) {
        if (ext_hint != e) exts.push_back(e);
    }
    for (const std::string& ext : exts) {
        const std::string path = image_dir + "/" + name + ext;
        if (std::filesystem::exists(path)) return load_image(path);
    }
    return std::nullopt;
}

std::map<int, std::vector<std::vector<float>>> read_embeddings(const std::string& path) {
    std::ifstream in = open_input(path);
    std::map<int, std::map<int, std::vector<float>>> staged;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() < 3) fail(path, line_no, "expected frame,index,values...");
        const int frame = parse_int(fields[0], path, line_no);
        const int det_index = parse_int(fields[1], path, line_no);
        std::vector<float> vec;
        for (size_t i = 2; i < fields.size(); ++i) {
            vec.push_back(static_cast<float>(parse_num(fields[i], path, line_no)));
        }
        if (!staged[frame].emplace(det_index, std::move(vec)).second) {
            fail(path, line_no, "duplicate embedding row");
        }
    }
    std::map<int, std::vector<std::vector<float>>> out;
    for (auto& [frame, by_index] : staged) {
        auto& dst = out[frame];
        int expected = 0;
        for (auto& [idx, vec] : by_index) {
            if (idx != expected++) {
                throw ParseError(path + ": embeddings for frame " + std::to_string(frame) +
                                 " are not a dense 0-based index list");
            }
            dst.push_back(std::move(vec));
        }
    }
    return out;
}

}  // namespace ct
