#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <jpeglib.h>

#include "ct/config.hpp"
#include "ct/mot_io.hpp"
#include "doctest.h"

using namespace ct;
namespace fs = std::filesystem;

namespace {

bool write_jpeg_for_test(const std::string& path, const GrayImage& img) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) return false;
    jpeg_compress_struct cinfo;
    jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, fp);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, 95, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<JSAMPLE> row(img.width);
    while (cinfo.next_scanline < cinfo.image_height) {
        for (int x = 0; x < img.width; ++x) {
            const float v = std::min(1.0f, std::max(0.0f, img.at(x, static_cast<int>(cinfo.next_scanline))));
            row[x] = static_cast<JSAMPLE>(v * 255.0f + 0.5f);
        }
        JSAMPROW rows[1] = {row.data()};
        jpeg_write_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::fclose(fp);
    return true;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ct_motio_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("read_detections parses the MOT det format") {
    TempDir dir;
    const std::string path = dir.file("det.txt");
    write_text(path, "1,-1,10,20,30,40,0.9,-1,-1,-1\n");
    const DetFile det = read_detections(path);
    REQUIRE(det.frames.count(1) == 1);
    const Detection& d = det.frames.at(1)[0];
    CHECK(d.box.x == 10.0);
    CHECK(d.box.y == 20.0);
    CHECK(d.box.w == 30.0);
    CHECK(d.box.h == 40.0);
    CHECK(d.conf == 0.9);
    CHECK(det.skipped_rows == 0);
}

TEST_CASE("read_detections: empty file, bad rows, error reporting") {
    TempDir dir;
    const std::string empty = dir.file("empty.txt");
    write_text(empty, "");
    CHECK(read_detections(empty).frames.empty());

    const std::string skippable = dir.file("skip.txt");
    write_text(skippable, "1,-1,10,20,0,40,0.9,-1,-1,-1\n1,-1,10,20,30,40,0.9,-1,-1,-1\n");
    const DetFile det = read_detections(skippable);
    CHECK(det.skipped_rows == 1);
    CHECK(det.frames.at(1).size() == 1);

    const std::string malformed = dir.file("bad.txt");
    write_text(malformed, "1,-1,10,20,30,40,0.9,-1,-1,-1\n2,-1,oops,20,30,40,0.9,-1,-1,-1\n");
    try {
        read_detections(malformed);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    const std::string nan_file = dir.file("nan.txt");
    write_text(nan_file, "1,-1,nan,20,30,40,0.9,-1,-1,-1\n");
    CHECK_THROWS_AS(read_detections(nan_file), ParseError);
    const std::string inf_file = dir.file("inf.txt");
    write_text(inf_file, "1,-1,10,inf,30,40,0.9,-1,-1,-1\n");
    CHECK_THROWS_AS(read_detections(inf_file), ParseError);

    CHECK_THROWS_AS(read_detections(dir.file("missing.txt")), ParseError);
}

TEST_CASE("read_gt keeps only flagged pedestrian rows") {
    TempDir dir;
    const std::string path = dir.file("gt.txt");
    write_text(path,
               "1,1,10,20,30,40,1,1,1.0\n"
               "1,2,50,60,30,40,0,1,1.0\n"   // flag 0: excluded
               "1,3,50,60,30,40,1,7,1.0\n"); // class 7: excluded
    const auto gt = read_gt(path);
    REQUIRE(gt.at(1).size() == 1);
    CHECK(gt.at(1)[0].id == 1);
}

TEST_CASE("read_gt rejects duplicate identities in a frame") {
    TempDir dir;
    const std::string path = dir.file("gt.txt");
    write_text(path,
               "1,1,10,20,30,40,1,1,1.0\n"
               "1,1,12,22,30,40,1,1,1.0\n");
    CHECK_THROWS_AS(read_gt(path), ParseError);
}

TEST_CASE("write_results emits the fixed row format in (frame, id) order") {
    TempDir dir;
    const std::string path = dir.file("res.txt");
    std::vector<ResultRow> rows = {
        {2, 1, {1, 2, 3, 4}, 0.5},
        {1, 2, {5, 6, 7, 8}, 0.8},
        {1, 1, {10, 20, 30, 40}, 0.9},
    };
    write_results(path, rows);
    const std::string text = read_text(path);
    CHECK(text ==
          "1,1,10.000000,20.000000,30.000000,40.000000,0.900000,-1,-1,-1\n"
          "1,2,5.000000,6.000000,7.000000,8.000000,0.800000,-1,-1,-1\n"
          "2,1,1.000000,2.000000,3.000000,4.000000,0.500000,-1,-1,-1\n");

    const auto parsed = read_results(path);
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0].frame == 1);
    CHECK(parsed[0].id == 1);
    CHECK(parsed[0].box.x == 10.0);
    CHECK(parsed[2].conf == 0.5);
}

TEST_CASE("det/gt/results writers round-trip byte-identically") {
    TempDir dir;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(0.0, 1900.0);
    std::uniform_real_distribution<double> dim(2.0, 400.0);
    std::uniform_real_distribution<double> conf(0.0, 1.0);
    std::uniform_int_distribution<int> frame(1, 50);

    std::map<int, std::vector<Detection>> dets;
    std::map<int, std::vector<GtEntry>> gts;
    std::vector<ResultRow> rows;
    std::map<int, int> next_gt_id;
    for (int i = 0; i < 1000; ++i) {
        const int f = frame(rng);
        const BBox box{pos(rng), pos(rng), dim(rng), dim(rng)};
        dets[f].push_back({box, conf(rng)});
        gts[f].push_back({++next_gt_id[f], box, conf(rng)});
        rows.push_back({f, i + 1, box, conf(rng)});
    }

    const std::string det_a = dir.file("det_a.txt"), det_b = dir.file("det_b.txt");
    write_detections(det_a, dets);
    write_detections(det_b, read_detections(det_a).frames);
    CHECK(read_text(det_a) == read_text(det_b));

    const std::string gt_a = dir.file("gt_a.txt"), gt_b = dir.file("gt_b.txt");
    write_gt(gt_a, gts);
    write_gt(gt_b, read_gt(gt_a));
    CHECK(read_text(gt_a) == read_text(gt_b));

    const std::string res_a = dir.file("res_a.txt"), res_b = dir.file("res_b.txt");
    write_results(res_a, rows);
    write_results(res_b, read_results(res_a));
    CHECK(read_text(res_a) == read_text(res_b));
}

TEST_CASE("seqinfo tolerates comments and key reordering") {
    TempDir dir;
    const std::string path = dir.file("seqinfo.ini");
    write_text(path,
               "[Sequence]\n"
               "; comment line\n"
               "imWidth=640\n"
               "# another comment\n"
               "seqLength=100\n"
               "name=demo\n"
               "imHeight=480\n"
               "frameRate=25\n"
               "imDir=img1\n"
               "imExt=.png\n");
    const SequenceMeta meta = read_seqinfo(path);
    CHECK(meta.name == "demo");
    CHECK(meta.seq_length == 100);
    CHECK(meta.im_width == 640);
    CHECK(meta.im_height == 480);
    CHECK(meta.frame_rate == 25.0);

    const std::string out = dir.file("seqinfo2.ini");
    write_seqinfo(out, meta);
    CHECK(read_seqinfo(out).seq_length == 100);
}

TEST_CASE("load_frame decodes PNG intensities and reports missing frames") {
    TempDir dir;
    GrayImage white(8, 8, 1.0f);
    save_png(dir.file("000001.png"), white);
    const auto loaded = load_frame(dir.path.string(), 1);
    REQUIRE(loaded.has_value());
    for (float v : loaded->pixels) CHECK(v == doctest::Approx(1.0).epsilon(1e-3));

    GrayImage checker(2, 2);
    checker.at(0, 0) = 0.0f;
    checker.at(1, 0) = 1.0f;
    checker.at(0, 1) = 1.0f;
    checker.at(1, 1) = 0.0f;
    save_png(dir.file("000002.png"), checker);
    const auto c = load_frame(dir.path.string(), 2);
    REQUIRE(c.has_value());
    CHECK(c->at(0, 0) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(c->at(1, 0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c->at(0, 1) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c->at(1, 1) == doctest::Approx(0.0).epsilon(1e-3));

    CHECK(!load_frame(dir.path.string(), 3).has_value());
}

TEST_CASE("jpeg frames decode through load_frame") {
    TempDir dir;
    // encode a small gradient directly with libjpeg so the decode path has a
    // real fixture to chew on
    GrayImage img(32, 24);
    for (int y = 0; y < 24; ++y) {
        for (int x = 0; x < 32; ++x) img.at(x, y) = x / 31.0f;
    }
    const std::string path = dir.file("000004.jpg");
    REQUIRE(write_jpeg_for_test(path, img));

    const auto back = load_frame(dir.path.string(), 4, ".jpg");
    REQUIRE(back.has_value());
    CHECK(back->width == 32);
    CHECK(back->height == 24);
    // lossy codec: generous tolerance, but the gradient shape must survive
    for (int y = 0; y < 24; ++y) {
        CHECK(back->at(2, y) < back->at(29, y));
        for (int x = 0; x < 32; ++x) {
            CHECK(back->at(x, y) == doctest::Approx(img.at(x, y)).epsilon(0.15));
        }
    }
}

TEST_CASE("png round-trip preserves 8-bit quantized intensities") {
    TempDir dir;
    GrayImage img(16, 16);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) img.at(x, y) = (x + 16.0f * y) / 255.0f;
    }
    save_png(dir.file("000009.png"), img);
    const auto back = load_frame(dir.path.string(), 9);
    REQUIRE(back.has_value());
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            CHECK(back->at(x, y) == doctest::Approx(img.at(x, y)).epsilon(1.0 / 255.0));
        }
    }
}

TEST_CASE("config round-trips byte-identically") {
    const RunConfig defaults;
    const std::string once = serialize_config(defaults);

    TempDir dir;
    const std::string path = dir.file("cfg.ini");
    write_text(path, once);
    const RunConfig parsed = load_config(path);
    CHECK(serialize_config(parsed) == once);

    RunConfig tweaked;
    apply_override(tweaked, "boundary_alpha", "0.7");
    apply_override(tweaked, "ct_stage", "mc");
    apply_override(tweaked, "max_lost_age", "12");
    apply_override(tweaked, "ci_mode", "lost-age");
    const std::string twice = serialize_config(tweaked);
    write_text(path, twice);
    CHECK(serialize_config(load_config(path)) == twice);
    CHECK(load_config(path).tracker.ct.boundary_alpha == 0.7);
    CHECK(load_config(path).tracker.max_lost_age == 12);
}

TEST_CASE("config rejects unknown keys and malformed values") {
    RunConfig cfg;
    CHECK_THROWS_AS(apply_override(cfg, "definitely_not_a_key", "1"), ParseError);
    CHECK_THROWS_AS(apply_override(cfg, "boundary_alpha", "abc"), ParseError);
    CHECK_THROWS_AS(apply_override(cfg, "ct_stage", "everything"), ParseError);
    CHECK_THROWS_AS(apply_override(cfg, "max_lost_age", "2.5"), ParseError);

    // range validation on the compensation knobs
    CHECK_THROWS_AS(apply_override(cfg, "boundary_alpha", "1.2"), ParseError);
    CHECK_THROWS_AS(apply_override(cfg, "boundary_alpha", "-0.1"), ParseError);
    CHECK_THROWS_AS(apply_override(cfg, "iou_suppress", "0"), ParseError);
    CHECK_THROWS_AS(apply_override(cfg, "correction_ratio", "-1"), ParseError);
    apply_override(cfg, "boundary_alpha", "0");  // inclusive bounds are fine
    apply_override(cfg, "boundary_alpha", "1");
}

TEST_CASE("result writing surfaces failures with the path") {
    try {
        write_results("/nonexistent_dir_for_sure/res.txt", {{1, 1, {1, 1, 2, 2}, 0.5}});
        FAIL("expected write failure");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent_dir_for_sure/res.txt") !=
              std::string::npos);
    }
}

TEST_CASE("embeddings sidecar parses dense per-frame lists") {
    TempDir dir;
    const std::string path = dir.file("emb.txt");
    write_text(path,
               "1,0,0.5,0.5,0.1\n"
               "1,1,0.2,0.8,0.3\n"
               "2,0,1.0,0.0,0.0\n");
    const auto emb = read_embeddings(path);
    REQUIRE(emb.at(1).size() == 2);
    CHECK(emb.at(1)[1][1] == doctest::Approx(0.8f));
    CHECK(emb.at(2).size() == 1);

    const std::string sparse = dir.file("sparse.txt");
    write_text(sparse, "1,1,0.5,0.5\n");
    CHECK_THROWS_AS(read_embeddings(sparse), ParseError);
}
