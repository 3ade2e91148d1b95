// ctrack: tracking, evaluation and synthetic-sequence tooling around the
// compensation tracker. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ct/config.hpp"
#include "ct/metrics.hpp"
#include "ct/pipeline.hpp"
#include "ct/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

struct TrackArgs {
    std::string seq_dir;
    std::string det_path;
    std::string config_path;
    std::string ct = "on";
    std::string ct_stage = "mc+os";
    std::string out_path;
    std::string frames = "auto";
    std::string emb_path;
    std::string stats_csv;
    std::vector<std::string> overrides;
};

int run_track(const TrackArgs& args) {
    ct::TrackRunOptions opts;
    opts.seq_dir = args.seq_dir;
    opts.det_path = args.det_path;
    opts.emb_path = args.emb_path;
    opts.frames_dir = (args.frames == "none") ? "" : args.frames;

    if (!args.config_path.empty()) opts.config = ct::load_config(args.config_path);
    ct::apply_override(opts.config, "ct_enabled", args.ct);
    ct::apply_override(opts.config, "ct_stage", args.ct_stage);
    for (const std::string& kv : args.overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ct::ParseError("--set expects key=value, got '" + kv + "'");
        }
        ct::apply_override(opts.config, kv.substr(0, eq), kv.substr(eq + 1));
    }

    const ct::TrackRunResult result = ct::run_tracking(opts);

    if (result.skipped_det_rows > 0) {
        std::fprintf(stderr, "warning: skipped %d detection rows with nonpositive size\n",
                     result.skipped_det_rows);
    }

    std::string out_path = args.out_path;
    if (out_path.empty()) {
        const ct::SequenceMeta meta =
            ct::read_seqinfo((fs::path(args.seq_dir) / "seqinfo.ini").string());
        out_path = (meta.name.empty() ? "results" : meta.name) + ".txt";
    }
    ct::write_results(out_path, result.rows);

    const double rate = result.stats.lost_events > 0
                            ? static_cast<double>(result.stats.compensated) /
                                  static_cast<double>(result.stats.lost_events)
                            : 0.0;
    std::printf("results: %s\n", out_path.c_str());
    std::printf("lost events:        %ld\n", result.stats.lost_events);
    std::printf("compensated:        %ld\n", result.stats.compensated);
    std::printf("compensation rate:  %.4f\n", rate);
    std::printf("output boxes:       %ld\n", result.output_boxes);
    if (result.gt_boxes >= 0) {
        std::printf("gt boxes:           %ld (output/gt = %.4f)\n", result.gt_boxes,
                    result.gt_boxes > 0
                        ? static_cast<double>(result.output_boxes) / result.gt_boxes
                        : 0.0);
    }
    std::printf("tracking wall time: %.3f s\n", result.wall_seconds);

    if (!args.stats_csv.empty()) {
        std::ofstream csv(args.stats_csv);
        if (!csv) throw std::runtime_error("cannot write stats csv: " + args.stats_csv);
        csv << "lost_events,compensated,compensation_rate,output_boxes,gt_boxes,wall_seconds\n"
            << result.stats.lost_events << ',' << result.stats.compensated << ','
            << rate << ',' << result.output_boxes << ',' << result.gt_boxes << ','
            << result.wall_seconds << '\n';
    }
    return 0;
}

int run_eval(const std::string& gt_path, const std::string& results_path,
             const std::string& csv_path) {
    const ct::Timeline gt = ct::timeline_from_gt(ct::read_gt(gt_path));
    const ct::Timeline hyp = ct::timeline_from_results(ct::read_results(results_path));

    int gt_max = 0, hyp_max = 0;
    for (const auto& [f, _] : gt) gt_max = std::max(gt_max, f);
    for (const auto& [f, _] : hyp) hyp_max = std::max(hyp_max, f);
    if (hyp_max > gt_max) {
        throw ct::ParseError("results extend to frame " + std::to_string(hyp_max) +
                             " but ground truth ends at frame " + std::to_string(gt_max));
    }

    const ct::MetricsReport report = ct::evaluate(gt, hyp);
    std::fputs(ct::format_report_table(report).c_str(), stdout);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot write csv: " + csv_path);
        csv << ct::format_report_csv(report);
    }
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    const ct::ScenarioSpec spec = ct::load_scenario(spec_path);
    const std::string seq_dir = ct::generate_sequence(spec, out_dir);
    std::printf("sequence written to %s (%d frames, %zu objects)\n", seq_dir.c_str(),
                spec.frames, spec.objects.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compensation-tracker tooling"};
    app.require_subcommand(1);

    TrackArgs targs;
    CLI::App* track = app.add_subcommand("track", "run the tracker over a sequence");
    track->add_option("seq_dir", targs.seq_dir, "sequence directory with seqinfo.ini")
        ->required();
    track->add_option("--det", targs.det_path, "detection file (default seq_dir/det/det.txt)");
    track->add_option("--config", targs.config_path, "run configuration file");
    track->add_option("--ct", targs.ct, "compensation on/off")
        ->check(CLI::IsMember({"on", "off"}));
    track->add_option("--ct-stage", targs.ct_stage, "mc (motion only) or mc+os")
        ->check(CLI::IsMember({"mc", "mc-only", "mc+os"}));
    track->add_option("--out", targs.out_path, "results file path");
    track->add_option("--frames", targs.frames,
                      "frame image directory, 'auto' (seqinfo imDir) or 'none'");
    track->add_option("--emb", targs.emb_path, "per-detection embedding sidecar file");
    track->add_option("--stats-csv", targs.stats_csv, "write run statistics as CSV");
    track->add_option("--set", targs.overrides, "config override key=value (repeatable)");

    std::string gt_path, results_path, eval_csv;
    CLI::App* eval = app.add_subcommand("eval", "score results against ground truth");
    eval->add_option("gt", gt_path, "ground-truth file")->required();
    eval->add_option("results", results_path, "tracker results file")->required();
    eval->add_option("--csv", eval_csv, "write the report as CSV");

    std::string spec_path, out_dir;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence");
    synth->add_option("spec", spec_path, "scenario description file")->required();
    synth->add_option("out_dir", out_dir, "output sequence directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (track->parsed()) return run_track(targs);
        if (eval->parsed()) return run_eval(gt_path, results_path, eval_csv);
        if (synth->parsed()) return run_synth(spec_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
