#pragma once

// Per-frame processing: warp -> line fitting -> boundary -> filter -> emit.

#include <array>
#include <functional>
#include <string>
#include <optional>
#include <span>
#include <vector>

#include "linemark/boundary.hpp"
#include "linemark/config.hpp"
#include "linemark/dataset.hpp"
#include "linemark/eval.hpp"
#include "linemark/filter.hpp"
#include "linemark/linefit.hpp"
#include "linemark/mask.hpp"

namespace linemark {

struct FrameInput {
    int frame = 0;
    EgoDelta ego_delta;
    /// Either a ready BEV mask or four camera label images (indexed by CameraId).
    std::optional<SegMask> bev;
    std::optional<std::array<LabelGrid, 4>> cameras;
    std::vector<DetectionBox> detections;
};

struct FrameOutput {
    int frame = 0;
    FrameLandmarks raw;       // detections handed to the filter
    std::vector<bool> injected;  // parallel to `raw`
    FrameLandmarks emitted;   // filter output (== raw when the filter is off)
    std::vector<FilterRecord> records;
    int degenerate_fits = 0;
    int keypoints = 0;
    int dropped_keypoints = 0;
    StageTimes times;  // every stage but ingest; total left to the caller
};

/// Corrupts randomly chosen landmarks so that their inconsistency with the
/// clean measurement is exactly 3 * sigma_max: beta moves by kOutlierBeta
/// and theta and cx share the rest of the budget, all with random signs.
class OutlierInjector {
public:
    static constexpr double kOutlierBeta = 0.1;

    OutlierInjector(OutlierConfig cfg, const FilterConfig& filter) : cfg_(cfg), filter_(filter) {}
    /// Marks and perturbs the chosen landmarks of one frame.
    std::vector<bool> apply(int frame, FrameLandmarks& lms) const;

private:
    OutlierConfig cfg_;
    FilterConfig filter_;
};

class Pipeline {
public:
    Pipeline(const CameraRig& rig, const PipelineConfig& cfg);

    FrameOutput process(const FrameInput& in);

    [[nodiscard]] const TrackSet& tracks() const { return tracks_; }

private:
    const CameraRig& rig_;
    PipelineConfig cfg_;
    OutlierInjector injector_;
    TrackSet tracks_;
    std::optional<BevWarp> warp_;  // built on the first camera-image frame
};

/// Produces the input of a frame; time spent on real ingest work is added to
/// `ingest_ms`, anything else the source does is left untimed.
using FrameSource = std::function<FrameInput(int frame, double& ingest_ms)>;

struct RunResult {
    std::vector<FrameOutput> frames;
    std::vector<FrameLandmarks> raw;
    std::vector<FrameLandmarks> emitted;
    std::vector<StageTimes> times;
    std::vector<std::string> errors;  // "frame N: ..." for frames that failed
};

/// Runs frames 0..n-1 in order. A frame that throws is recorded in `errors`
/// and contributes empty landmark lists.
RunResult run_frames(int n, const FrameSource& source, const CameraRig& rig, const PipelineConfig& cfg);

struct RunOptions {
    /// Re-render per-camera label images from each BEV mask (untimed) so the
    /// warp stage does real work.
    bool camera_input = false;
};

RunResult run_dataset(const Dataset& ds, const PipelineConfig& cfg, const RunOptions& opts = {});

/// In-memory run straight from the simulator; rendering is untimed.
RunResult run_scene(const SceneTruth& scene, const CameraRig& rig, const PipelineConfig& cfg,
                    const RunOptions& opts = {});

}  // namespace linemark
