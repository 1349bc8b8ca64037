#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "linemark/geometry.hpp"

namespace linemark {

enum class LandmarkKind : std::uint8_t { Lane = 0, Parking = 1, Median = 2, Boundary = 3 };
inline constexpr std::array<LandmarkKind, 4> kLandmarkKinds = {LandmarkKind::Lane, LandmarkKind::Parking,
                                                               LandmarkKind::Median, LandmarkKind::Boundary};

std::string_view to_string(LandmarkKind kind);
std::optional<LandmarkKind> landmark_kind_from_string(std::string_view name);

/// A vectorized straight line in BEV raster units.
///
/// Positions use the "line frame" of the raster: x is the column coordinate
/// and y counts cells forward of the ego row (y = ego_row - row). The line
/// is x = beta * y + theta, so theta is the column where the line crosses
/// the ego row and phi = atan(beta) its angle to the ego longitudinal axis.
struct LineLandmark {
    LandmarkKind kind = LandmarkKind::Lane;
    double beta = 0.0;
    double theta = 0.0;
    double cx = 0.0;  // center, column coordinate
    double cy = 0.0;  // center, cells forward of the ego row
    double phi = 0.0;
    double confidence = 0.0;

    [[nodiscard]] double x_at(double y) const { return beta * y + theta; }
    bool operator==(const LineLandmark&) const = default;
};

/// Vehicle detection box in a camera image: top-left (u, v) and extents.
struct DetectionBox {
    CameraId camera = CameraId::Front;
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    double h = 0.0;
    double score = 0.0;

    bool operator==(const DetectionBox&) const = default;
};

/// Line-frame y coordinate of a raster row.
inline double line_frame_y(const BevSpec& bev, double row) { return bev.ego_row() - row; }

}  // namespace linemark
