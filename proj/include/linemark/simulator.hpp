#pragma once

// Synthetic parking-lot scenes and the observations a segmentation /
// detection front-end would produce for them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linemark/geometry.hpp"
#include "linemark/landmark.hpp"
#include "linemark/mask.hpp"

namespace linemark {

enum class LineKind : std::uint8_t { Lane, ParkingLongitudinal, ParkingHorizontal, Median };

std::string_view to_string(LineKind kind);
MaskClass mask_class(LineKind kind);
/// Landmark kind a line is scored as; nullopt for horizontal parking lines.
std::optional<LandmarkKind> landmark_kind(LineKind kind);

/// Painted line in world coordinates: a stripe of `width` around the
/// centerline segment start->end, optionally dashed along its length.
struct TrueLine {
    LineKind kind = LineKind::Lane;
    GroundPoint start;
    GroundPoint end;
    double width = 0.15;
    bool dashed = false;
    double dash = 2.0;
    double gap = 2.0;
    double phase = 0.0;  // offset into the dash period at `start`
};

/// Parked vehicle footprint; `heading` is the yaw of its long axis.
struct TrueVehicle {
    GroundPoint center;
    double length = 4.5;
    double width = 1.8;
    double heading = 0.0;
};

struct TrajectorySample {
    double t = 0.0;
    GroundPose pose;
};

struct SceneTruth {
    std::string template_name;
    std::uint64_t seed = 0;
    std::vector<TrueLine> lines;
    std::vector<TrueVehicle> vehicles;
    std::vector<TrajectorySample> trajectory;

    [[nodiscard]] int frame_count() const { return static_cast<int>(trajectory.size()); }
};

/// Violated invariants, empty when the scene is valid.
std::vector<std::string> validate(const SceneTruth& scene);

struct SceneOptions {
    int frames = 400;
    double frame_dt = 0.05;  // s
    double speed = 0.8;      // m/s
};

std::vector<std::string_view> scene_templates();

/// Deterministic in (seed, template, options). Throws UnknownTemplate.
SceneTruth generate_scene(std::uint64_t seed, std::string_view template_name, const SceneOptions& opts = {});

struct NoiseSpec {
    double p_drop = 0.0;            // per foreground cell
    int dilate_radius = 0;          // cells
    int erode_radius = 0;           // cells
    int speckle_cells = 0;          // false foreground cells per frame
    int occlusions = 0;             // background rectangles per frame
    int occlusion_size = 40;        // max rectangle side, cells
    double box_jitter_px = 0.0;     // detection jitter sigma
    double miss_prob = 0.0;         // per true detection
    double false_positive_rate = 0.0;  // per camera per frame

    static NoiseSpec none() { return {}; }
    /// Moderate corruption used by the default benchmark configuration.
    static NoiseSpec defaults();

    [[nodiscard]] std::vector<std::string> violations() const;
    bool operator==(const NoiseSpec&) const = default;
};

struct FrameObservation {
    int frame = 0;
    SegMask mask;
    std::vector<DetectionBox> detections;
    EgoDelta ego_delta;
};

/// Four elevated virtual pinhole cameras that jointly cover the default BEV raster.
CameraRig default_rig();

/// Noise-free BEV rasterization of the scene at an ego pose. A cell takes the
/// class of the highest-priority stripe (median > lane > parking) containing
/// its center.
SegMask render_bev(const SceneTruth& scene, const GroundPose& pose, const BevSpec& bev);

/// Throws FrameOutOfRange.
FrameObservation render_frame(const SceneTruth& scene, int frame, const CameraRig& rig, const NoiseSpec& noise,
                              std::uint64_t seed);

/// Camera-frame label image of a BEV mask: each pixel below the horizon takes
/// the label of the BEV cell its ground point falls in.
LabelGrid render_camera_labels(const SegMask& bev_mask, const CameraRig& rig, CameraId camera);

/// Ego-frame midpoint of the vehicle side facing the ego's longitudinal axis.
GroundPoint near_side_midpoint(const TrueVehicle& vehicle, const GroundPose& pose);

/// Whether a detector in `camera` reports a box whose bottom midpoint is `ego_point`.
bool detectable(const Camera& camera, GroundPoint ego_point, double working_extent);

/// Ground-truth landmarks of every kind visible in the BEV raster at `frame`.
/// Boundary truth is the per-side minimum |x| over detectable near-side midpoints.
std::vector<LineLandmark> truth_landmarks(const SceneTruth& scene, int frame, const CameraRig& rig);

/// Mixes a base seed with a frame index and stream id into an engine seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace linemark
