#pragma once

// Stationary-vehicle boundary lines built from per-camera detection boxes.

#include <cstdint>
#include <span>
#include <vector>

#include "linemark/geometry.hpp"
#include "linemark/landmark.hpp"

namespace linemark {

struct VehicleKeypoint {
    CameraId camera = CameraId::Front;  // first contributing camera
    GroundPoint ground;
    double score = 0.0;        // best contributing score
    double weight = 0.0;       // summed scores, used when merging further
    std::uint8_t cameras = 0;  // bitmask over CameraId of contributing cameras

    static VehicleKeypoint from(CameraId camera, GroundPoint ground, double score);
};

/// Bottom-center pixel of a box.
ImagePoint keypoint_pixel(const DetectionBox& box);

struct KeypointOptions {
    double min_score = 0.5;
};

struct KeypointResult {
    std::vector<VehicleKeypoint> keypoints;
    int dropped = 0;  // low score, above the horizon or outside the working area
};

KeypointResult keypoints_from_boxes(std::span<const DetectionBox> boxes, const CameraRig& rig,
                                    const KeypointOptions& opts = {});

inline constexpr double kAssociationDistance = 0.25;  // m

/// Greedy closest-pair merging of keypoints from disjoint camera sets while the
/// closest such pair is strictly nearer than `max_distance`. A merge is the
/// score-weighted centroid.
std::vector<VehicleKeypoint> associate_multiview(std::span<const VehicleKeypoint> keypoints,
                                                 double max_distance = kAssociationDistance);

enum class Side : std::uint8_t { Left, Right };

struct BoundaryLine {
    Side side = Side::Left;
    double x_b = 0.0;  // signed lateral offset, m
    std::vector<VehicleKeypoint> support;
};

/// At most one line per side at the smallest |x| of that side's keypoints.
/// Keypoints exactly on x = 0 belong to neither side.
std::vector<BoundaryLine> fit_boundary(std::span<const VehicleKeypoint> keypoints);

/// Landmark form: beta = 0, theta = column of x_b, center on the ego row.
LineLandmark to_landmark(const BoundaryLine& line, const BevSpec& bev);

struct BoundaryResult {
    std::vector<LineLandmark> landmarks;
    int keypoints = 0;
    int merged = 0;
    int dropped = 0;
};

BoundaryResult detect_boundaries(std::span<const DetectionBox> boxes, const CameraRig& rig,
                                 const KeypointOptions& opts = {});

}  // namespace linemark
