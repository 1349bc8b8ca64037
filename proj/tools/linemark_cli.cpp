// linemark: generate synthetic sequences, run the line-landmark pipeline on
// them, benchmark it and score landmark files.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 a frame failed.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "linemark/calibration.hpp"
#include "linemark/config.hpp"
#include "linemark/dataset.hpp"
#include "linemark/errors.hpp"
#include "linemark/eval.hpp"
#include "linemark/pipeline.hpp"
#include "linemark/report.hpp"
#include "linemark/simulator.hpp"

namespace fs = std::filesystem;
using namespace linemark;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitFrame = 3;

struct Overrides {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> rig;
    std::optional<std::string> template_name;
    std::optional<std::uint64_t> seed;
    std::optional<int> frames;
    std::optional<double> sigma_max;
    std::optional<double> outlier_rate;
    std::optional<int> scan_interval;
    bool no_filter = false;
    bool gate_only = false;
    bool clean = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config_path, "JSON configuration file");
    cmd->add_option("-o,--out", o.out, "Output directory (overrides output_dir)");
}

void add_pipeline_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--sigma-max", o.sigma_max, "Filter gate threshold");
    cmd->add_option("--outlier-rate", o.outlier_rate, "Per-landmark outlier injection probability");
    cmd->add_option("--scan-interval", o.scan_interval, "Scan-line interval in cells");
    cmd->add_flag("--no-filter", o.no_filter, "Emit raw detections");
    cmd->add_flag("--gate-only", o.gate_only, "Gate without fusing measurements");
}

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
    if (o.out) cfg.output_dir = *o.out;
    if (o.rig) cfg.rig_path = *o.rig;
    if (o.template_name) cfg.scene.template_name = *o.template_name;
    if (o.seed) cfg.scene.seed = *o.seed;
    if (o.frames) cfg.scene.frames = *o.frames;
    if (o.sigma_max) cfg.filter.sigma_max = *o.sigma_max;
    if (o.outlier_rate) cfg.outliers.rate = *o.outlier_rate;
    if (o.scan_interval) cfg.linefit.scan_interval = *o.scan_interval;
    if (o.no_filter) cfg.filter_enabled = false;
    if (o.gate_only) cfg.filter.gate_only = true;
    if (o.clean) cfg.noise = NoiseSpec::none();
    cfg.validate();
    return cfg;
}

void make_dirs(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

int cmd_generate(const Overrides& o) {
    const PipelineConfig cfg = resolve(o);
    const CameraRig rig = cfg.rig_path.empty() ? default_rig() : load_rig(cfg.rig_path);
    SceneOptions sopts;
    sopts.frames = cfg.scene.frames;
    const SceneTruth scene = generate_scene(cfg.scene.seed, cfg.scene.template_name, sopts);
    const std::string manifest = export_sequence(scene, rig, cfg.noise, cfg.scene.seed, cfg.output_dir);
    std::cout << manifest << "\n";
    return 0;
}

std::string filter_csv(const RunResult& r) {
    std::string out =
        "frame,kind,track,accepted,spawned,injected,sigma,beta,theta,cx,cy,raw_beta,raw_theta,raw_cx,raw_cy\n";
    for (const FrameOutput& f : r.frames) {
        for (const FilterRecord& rec : f.records) {
            const bool injected = rec.detection < static_cast<int>(f.injected.size()) && f.injected[rec.detection];
            out += std::to_string(f.frame) + "," + std::string(to_string(rec.kind)) + "," +
                   std::to_string(rec.track_id) + "," + (rec.accepted ? "1" : "0") + "," + (rec.spawned ? "1" : "0") +
                   "," + (injected ? "1" : "0") + "," + format_double(rec.sigma) + "," +
                   format_double(rec.filtered.beta) + "," + format_double(rec.filtered.theta) + "," +
                   format_double(rec.filtered.cx) + "," + format_double(rec.filtered.cy) + "," +
                   format_double(rec.raw.beta) + "," + format_double(rec.raw.theta) + "," +
                   format_double(rec.raw.cx) + "," + format_double(rec.raw.cy) + "\n";
        }
    }
    return out;
}

class OutputDir {
public:
    explicit OutputDir(std::string dir) : dir_(std::move(dir)) { make_dirs(dir_); }
    void write(const std::string& name, const std::string& content) {
        write_text_file((fs::path(dir_) / name).string(), content);
        files_[name] = sha256_hex(content);
    }
    void finish() {
        const json manifest = {{"version", 1}, {"files", files_}};
        write_text_file((fs::path(dir_) / "run_manifest.json").string(), manifest.dump(2) + "\n");
    }

private:
    std::string dir_;
    json files_ = json::object();
};

int report_errors(const RunResult& r) {
    for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
    return r.errors.empty() ? 0 : kExitFrame;
}

int cmd_run(const Overrides& o, const std::string& data_dir, bool bench, bool camera_input) {
    const PipelineConfig cfg = resolve(o);
    const Dataset ds = load_dataset(data_dir);  // before any output exists
    const RunResult r = run_dataset(ds, cfg, {camera_input});

    const double scale = ds.rig.bev.scale;
    const Metrics filtered = match_and_score(r.emitted, ds.truth, cfg.match, scale);
    const Metrics raw = match_and_score(r.raw, ds.truth, cfg.match, scale);
    const std::vector<CurveSeries> curves = {{"unfiltered", error_curve(r.raw, ds.truth)},
                                             {"filtered", error_curve(r.emitted, ds.truth)}};

    OutputDir out(cfg.output_dir);
    out.write("config.json", config_to_json(cfg).dump(2) + "\n");
    out.write("landmarks.csv", landmarks_csv(r.emitted));
    out.write("landmarks_raw.csv", landmarks_csv(r.raw));
    out.write("filter.csv", filter_csv(r));
    json metrics = {{"output", metrics_to_json(filtered)},
                    {"unfiltered", metrics_to_json(raw)},
                    {"error_curves",
                     {{"unfiltered", {{"dc0_max", dc0_stats(curves[0].curve).max},
                                      {"dc0_variance", dc0_stats(curves[0].curve).variance},
                                      {"dc1_max", dc1_stats(curves[0].curve).max},
                                      {"dc1_variance", dc1_stats(curves[0].curve).variance}}},
                      {"filtered", {{"dc0_max", dc0_stats(curves[1].curve).max},
                                    {"dc0_variance", dc0_stats(curves[1].curve).variance},
                                    {"dc1_max", dc1_stats(curves[1].curve).max},
                                    {"dc1_variance", dc1_stats(curves[1].curve).variance}}}}},
                    {"failed_frames", r.errors.size()}};
    out.write("metrics.json", metrics.dump(2) + "\n");
    out.write("metrics.csv", metrics_csv(filtered));
    out.write("error_curves.csv", error_curves_csv(curves));
    out.write("error_curves.svg", error_curves_svg(curves));
    if (bench) {
        const TimingReport t = timing_report(r.times);
        out.write("timing.json", timing_to_json(t).dump(2) + "\n");
        out.write("timing.csv", timing_csv(r.times));
        std::printf("frames %d  total mean %.3f ms  p95 %.3f ms\n", t.frames, t.total.mean, t.total.p95);
        for (std::size_t k = 0; k < kStageCount; ++k) {
            std::printf("  %-9s mean %.3f ms  p95 %.3f ms\n", kStageNames[k], t.stage[k].mean, t.stage[k].p95);
        }
    }
    out.finish();

    for (LandmarkKind k : kLandmarkKinds) {
        const KindScore& s = filtered.of(k);
        std::printf("%-9s FD %6.2f%%  MD %6.2f%%  accuracy %6.2f%%\n", std::string(to_string(k)).c_str(),
                    100.0 * s.fd(), 100.0 * s.md(), 100.0 * s.accuracy());
    }
    return report_errors(r);
}

int cmd_score(const Overrides& o, const std::string& pred_path, const std::string& truth_path, double scale) {
    const PipelineConfig cfg = resolve(o);
    const auto truth = parse_landmarks_csv(read_text_file(truth_path), -1, truth_path);
    const auto pred =
        parse_landmarks_csv(read_text_file(pred_path), static_cast<int>(truth.size()), pred_path);
    const Metrics m = match_and_score(pred, truth, cfg.match, scale);
    const json report = metrics_to_json(m);
    if (o.out) {
        OutputDir out(*o.out);
        out.write("metrics.json", report.dump(2) + "\n");
        out.write("metrics.csv", metrics_csv(m));
        out.finish();
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Line-landmark extraction and filtering for parking scenes"};
    app.require_subcommand(1);
    Overrides o;

    auto* gen = app.add_subcommand("generate", "Render a synthetic sequence to disk");
    add_common(gen, o);
    gen->add_option("--rig", o.rig, "Calibration file (default: built-in rig)");
    gen->add_option("--template", o.template_name, "Scene template");
    gen->add_option("--seed", o.seed, "Scene and noise seed");
    gen->add_option("--frames", o.frames, "Number of frames");
    gen->add_flag("--clean", o.clean, "Disable all observation noise");

    std::string data_dir;
    auto* run = app.add_subcommand("run", "Run the pipeline on a generated sequence");
    add_common(run, o);
    add_pipeline_flags(run, o);
    run->add_option("-d,--data", data_dir, "Sequence directory")->required();

    bool camera_input = true;
    auto* bench = app.add_subcommand("bench", "Run with per-stage timing");
    add_common(bench, o);
    add_pipeline_flags(bench, o);
    bench->add_option("-d,--data", data_dir, "Sequence directory")->required();
    bench->add_flag("!--bev-input", camera_input, "Feed BEV masks directly instead of warping camera images");

    std::string pred_path, truth_path;
    double scale = 0.02;
    auto* score = app.add_subcommand("score", "Score a landmark CSV against a truth CSV");
    add_common(score, o);
    score->add_option("--pred", pred_path, "Predicted landmarks CSV")->required();
    score->add_option("--truth", truth_path, "Truth landmarks CSV")->required();
    score->add_option("--scale", scale, "Meters per BEV cell")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*run) return cmd_run(o, data_dir, false, false);
        if (*bench) return cmd_run(o, data_dir, true, camera_input);
        if (*score) return cmd_score(o, pred_path, truth_path, scale);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnknownTemplate& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const FrameMisalignment& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
