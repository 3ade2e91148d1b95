#include "ct/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ct {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ParseError("config: boolean expected for '" + key + "', got '" + v + "'");
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ParseError("config: number expected for '" + key + "', got '" + v + "'");
    }
}

double parse_positive(const std::string& v, const std::string& key) {
    const double d = parse_double(v, key);
    if (d <= 0.0) throw ParseError("config: '" + key + "' must be positive, got '" + v + "'");
    return d;
}

double parse_unit_interval(const std::string& v, const std::string& key) {
    const double d = parse_double(v, key);
    if (d < 0.0 || d > 1.0) {
        throw ParseError("config: '" + key + "' must lie in [0, 1], got '" + v + "'");
    }
    return d;
}

int parse_int(const std::string& v, const std::string& key) {
    const double d = parse_double(v, key);
    const int i = static_cast<int>(std::llround(d));
    if (std::fabs(d - i) > 1e-9) {
        throw ParseError("config: integer expected for '" + key + "', got '" + v + "'");
    }
    return i;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string ci_mode_str(CiMode m) { return m == CiMode::Literal ? "literal" : "lost-age"; }

std::string policy_str(AiPolicy p) { return p == AiPolicy::Fail ? "fail" : "pass"; }

std::string stage_str(CtStage s) { return s == CtStage::Mc ? "mc" : "mc+os"; }

}  // namespace

std::string format_double(double v) {
    for (int precision = 1; precision <= 17; ++precision) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return std::to_string(v);
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    TrackerParams& t = cfg.tracker;
    CTParams& c = t.ct;
    AppearanceParams& a = t.appearance;

    if (key == "det_conf_threshold") t.det_conf_threshold = parse_double(value, key);
    else if (key == "stage_a_gate") t.stage_a_gate = parse_double(value, key);
    else if (key == "stage_b_gate") t.stage_b_gate = parse_double(value, key);
    else if (key == "embedding_gate") t.embedding_gate = parse_double(value, key);
    else if (key == "max_lost_age") t.max_lost_age = parse_int(value, key);
    else if (key == "probation_frames") t.probation_frames = parse_int(value, key);
    else if (key == "ct_enabled") t.ct_enabled = parse_bool(value, key);
    else if (key == "ct_stage") {
        if (value == "mc" || value == "mc-only") c.stage = CtStage::Mc;
        else if (value == "mc+os" || value == "mcos") c.stage = CtStage::McOs;
        else throw ParseError("config: ct_stage must be 'mc' or 'mc+os', got '" + value + "'");
    }
    else if (key == "compensation_frame") c.compensation_frame = parse_int(value, key);
    else if (key == "knn_match_threshold") c.knn_match_threshold = parse_int(value, key);
    else if (key == "boundary_alpha") c.boundary_alpha = parse_unit_interval(value, key);
    else if (key == "iou_suppress") c.iou_suppress = parse_positive(value, key);
    else if (key == "containment_suppress") c.containment_suppress = parse_positive(value, key);
    else if (key == "area_ratio_suppress") c.area_ratio_suppress = parse_positive(value, key);
    else if (key == "correction_ratio") c.correction_ratio = parse_positive(value, key);
    else if (key == "ci_mode") {
        if (value == "literal") c.ci_mode = CiMode::Literal;
        else if (value == "lost-age") c.ci_mode = CiMode::LostAge;
        else throw ParseError("config: ci_mode must be 'literal' or 'lost-age'");
    }
    else if (key == "bi_vertical") c.bi_vertical = parse_bool(value, key);
    else if (key == "ai_missing_policy" || key == "ai_small_patch_policy") {
        AiPolicy p;
        if (value == "fail") p = AiPolicy::Fail;
        else if (value == "pass") p = AiPolicy::Pass;
        else throw ParseError("config: policy must be 'fail' or 'pass'");
        if (key == "ai_missing_policy") c.ai_missing_policy = p;
        else c.ai_small_patch_policy = p;
    }
    else if (key == "kalman_position_weight") t.motion.std_weight_position = parse_double(value, key);
    else if (key == "kalman_velocity_weight") t.motion.std_weight_velocity = parse_double(value, key);
    else if (key == "scale_factor") a.scale_factor = static_cast<float>(parse_double(value, key));
    else if (key == "base_sigma") a.base_sigma = static_cast<float>(parse_double(value, key));
    else if (key == "octaves") a.octaves = parse_int(value, key);
    else if (key == "contrast_threshold") a.contrast_threshold = static_cast<float>(parse_double(value, key));
    else if (key == "match_ratio") a.match_ratio = static_cast<float>(parse_double(value, key));
    else if (key == "abs_match_threshold") a.abs_match_threshold = static_cast<float>(parse_double(value, key));
    else if (key == "min_patch_side") a.min_patch_side = parse_int(value, key);
    else throw ParseError("config: unknown key '" + key + "'");
}

std::string serialize_config(const RunConfig& cfg) {
    const TrackerParams& t = cfg.tracker;
    const CTParams& c = t.ct;
    const AppearanceParams& a = t.appearance;
    std::ostringstream out;
    out << "det_conf_threshold=" << format_double(t.det_conf_threshold) << '\n';
    out << "stage_a_gate=" << format_double(t.stage_a_gate) << '\n';
    out << "stage_b_gate=" << format_double(t.stage_b_gate) << '\n';
    out << "embedding_gate=" << format_double(t.embedding_gate) << '\n';
    out << "max_lost_age=" << t.max_lost_age << '\n';
    out << "probation_frames=" << t.probation_frames << '\n';
    out << "ct_enabled=" << bool_str(t.ct_enabled) << '\n';
    out << "ct_stage=" << stage_str(c.stage) << '\n';
    out << "compensation_frame=" << c.compensation_frame << '\n';
    out << "knn_match_threshold=" << c.knn_match_threshold << '\n';
    out << "boundary_alpha=" << format_double(c.boundary_alpha) << '\n';
    out << "iou_suppress=" << format_double(c.iou_suppress) << '\n';
    out << "containment_suppress=" << format_double(c.containment_suppress) << '\n';
    out << "area_ratio_suppress=" << format_double(c.area_ratio_suppress) << '\n';
    out << "correction_ratio=" << format_double(c.correction_ratio) << '\n';
    out << "ci_mode=" << ci_mode_str(c.ci_mode) << '\n';
    out << "bi_vertical=" << bool_str(c.bi_vertical) << '\n';
    out << "ai_missing_policy=" << policy_str(c.ai_missing_policy) << '\n';
    out << "ai_small_patch_policy=" << policy_str(c.ai_small_patch_policy) << '\n';
    out << "kalman_position_weight=" << format_double(t.motion.std_weight_position) << '\n';
    out << "kalman_velocity_weight=" << format_double(t.motion.std_weight_velocity) << '\n';
    out << "scale_factor=" << format_double(a.scale_factor) << '\n';
    out << "base_sigma=" << format_double(a.base_sigma) << '\n';
    out << "octaves=" << a.octaves << '\n';
    out << "contrast_threshold=" << format_double(a.contrast_threshold) << '\n';
    out << "match_ratio=" << format_double(a.match_ratio) << '\n';
    out << "abs_match_threshold=" << format_double(a.abs_match_threshold) << '\n';
    out << "min_patch_side=" << a.min_patch_side << '\n';
    return out.str();
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    for (const auto& [key, value] : read_kv_file(path)) {
        apply_override(cfg, key, value);
    }
    return cfg;
}

void save_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << serialize_config(cfg);
}

}  // namespace ct
