#include "linemark/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "linemark/errors.hpp"
#include "rng.hpp"

namespace linemark {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point& mark) {
    const auto now = Clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - mark).count();
    mark = now;
    return ms;
}

double& slot(StageTimes& t, Stage s) { return t.stage[static_cast<std::size_t>(s)]; }

}  // namespace

std::vector<bool> OutlierInjector::apply(int frame, FrameLandmarks& lms) const {
    std::vector<bool> hit(lms.size(), false);
    if (cfg_.rate <= 0.0 || frame < cfg_.warmup) return hit;
    detail::Rng rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(frame), 3));
    const double budget = 3.0 * filter_.sigma_max;
    const double lc = filter_.lambda1 + filter_.lambda2;
    double dbeta = kOutlierBeta;
    double shift = 0.0;
    if (lc > 0.0) {
        dbeta = std::min(dbeta, filter_.lambda3 > 0.0 ? budget / filter_.lambda3 : dbeta);
        shift = (budget - filter_.lambda3 * dbeta) / lc;
    } else {
        dbeta = budget / filter_.lambda3;
    }
    for (std::size_t i = 0; i < lms.size(); ++i) {
        const bool chosen = rng.bernoulli(cfg_.rate);
        const double s1 = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const double s2 = rng.bernoulli(0.5) ? 1.0 : -1.0;
        if (!chosen) continue;
        lms[i].theta += s1 * shift;
        lms[i].cx += s1 * shift;
        lms[i].beta += s2 * dbeta;
        lms[i].phi = std::atan(lms[i].beta);
        hit[i] = true;
    }
    return hit;
}

Pipeline::Pipeline(const CameraRig& rig, const PipelineConfig& cfg)
    : rig_(rig), cfg_(cfg), injector_(cfg.outliers, cfg.filter), tracks_(cfg.filter) {}

FrameOutput Pipeline::process(const FrameInput& in) {
    FrameOutput out;
    out.frame = in.frame;
    auto mark = Clock::now();

    SegMask warped;
    const SegMask* mask = nullptr;
    if (in.bev) {
        mask = &*in.bev;
    } else if (in.cameras) {
        if (!warp_) warp_.emplace(rig_);
        warped = warp_->apply(std::span<const LabelGrid, 4>(*in.cameras));
        mask = &warped;
    } else {
        throw DataError("frame " + std::to_string(in.frame) + " carries neither a BEV mask nor camera images");
    }
    if (mask->labels.rows() != rig_.bev.rows || mask->labels.cols() != rig_.bev.cols) {
        throw DataError("frame " + std::to_string(in.frame) + ": mask size does not match the rig");
    }
    slot(out.times, Stage::Warp) = ms_since(mark);

    const FrameLines lines = extract_lines(*mask, cfg_.linefit);
    out.degenerate_fits = lines.degenerate_fits;
    out.raw.insert(out.raw.end(), lines.lane.begin(), lines.lane.end());
    out.raw.insert(out.raw.end(), lines.median.begin(), lines.median.end());
    out.raw.insert(out.raw.end(), lines.parking.begin(), lines.parking.end());
    slot(out.times, Stage::Linefit) = ms_since(mark);

    const BoundaryResult b = detect_boundaries(in.detections, rig_, cfg_.boundary);
    out.keypoints = b.keypoints;
    out.dropped_keypoints = b.dropped;
    out.raw.insert(out.raw.end(), b.landmarks.begin(), b.landmarks.end());
    slot(out.times, Stage::Boundary) = ms_since(mark);

    out.injected = injector_.apply(in.frame, out.raw);
    StepResult step;
    if (cfg_.filter_enabled) step = tracks_.step(out.raw, in.ego_delta, rig_.bev);
    slot(out.times, Stage::Filter) = ms_since(mark);

    if (cfg_.filter_enabled) {
        out.emitted = std::move(step.emitted);
        out.records = std::move(step.records);
    } else {
        out.emitted = out.raw;
    }
    slot(out.times, Stage::Emit) = ms_since(mark);
    return out;
}

RunResult run_frames(int n, const FrameSource& source, const CameraRig& rig, const PipelineConfig& cfg) {
    Pipeline pipeline(rig, cfg);
    RunResult r;
    for (int f = 0; f < n; ++f) {
        double ingest = 0.0;
        FrameOutput out;
        try {
            FrameInput in = source(f, ingest);
            const auto start = Clock::now();
            out = pipeline.process(in);
            out.times.stage[static_cast<std::size_t>(Stage::Ingest)] = ingest;
            out.times.total = ingest + std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        } catch (const Error& e) {
            r.errors.push_back("frame " + std::to_string(f) + ": " + e.what());
            out = FrameOutput{};
            out.frame = f;
        }
        r.raw.push_back(out.raw);
        r.emitted.push_back(out.emitted);
        r.times.push_back(out.times);
        r.frames.push_back(std::move(out));
    }
    return r;
}

namespace {

std::array<LabelGrid, 4> camera_images(const SegMask& bev, const CameraRig& rig) {
    std::array<LabelGrid, 4> images;
    for (CameraId id : kCameraPriority) images[static_cast<std::size_t>(id)] = render_camera_labels(bev, rig, id);
    return images;
}

}  // namespace

RunResult run_dataset(const Dataset& ds, const PipelineConfig& cfg, const RunOptions& opts) {
    const FrameSource source = [&](int f, double& ingest_ms) {
        FrameInput in;
        in.frame = f;
        auto mark = Clock::now();
        SegMask mask = ds.load_mask(f);
        in.detections = ds.detections[static_cast<std::size_t>(f)];
        in.ego_delta = ds.poses[static_cast<std::size_t>(f)].delta;
        ingest_ms = ms_since(mark);
        if (opts.camera_input) {
            in.cameras = camera_images(mask, ds.rig);
        } else {
            in.bev = std::move(mask);
        }
        return in;
    };
    return run_frames(ds.frames, source, ds.rig, cfg);
}

RunResult run_scene(const SceneTruth& scene, const CameraRig& rig, const PipelineConfig& cfg, const RunOptions& opts) {
    const FrameSource source = [&](int f, double&) {
        FrameObservation obs = render_frame(scene, f, rig, cfg.noise, scene.seed);
        FrameInput in;
        in.frame = f;
        in.ego_delta = obs.ego_delta;
        in.detections = std::move(obs.detections);
        if (opts.camera_input) {
            in.cameras = camera_images(obs.mask, rig);
        } else {
            in.bev = std::move(obs.mask);
        }
        return in;
    };
    return run_frames(scene.frame_count(), source, rig, cfg);
}

}  // namespace linemark
