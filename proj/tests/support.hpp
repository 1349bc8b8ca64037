#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "linemark/geometry.hpp"
#include "linemark/mask.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int integer(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct RandomCamera {
    linemark::Homography h;
    linemark::GroundPoint position;
    linemark::GroundPoint facing;
};

/// Pitched-down pinhole camera with random placement, heading and optics.
inline RandomCamera random_camera(Rng& rng) {
    const double yaw = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const linemark::GroundPoint facing{std::cos(yaw), std::sin(yaw)};
    const linemark::GroundPoint pos{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const double height = uniform(rng, 0.6, 8.0);
    const double pitch = uniform(rng, 25.0, 89.0) * std::numbers::pi / 180.0;
    const double focal = uniform(rng, 300.0, 1500.0);
    return {linemark::pinhole_ground_homography(focal, uniform(rng, 600, 680), uniform(rng, 440, 520),
                                                {pos.x, pos.y, height}, facing, pitch),
            pos, facing};
}

/// Ground point `dist` metres ahead of the camera and `lat` to its right.
inline linemark::GroundPoint ahead(const RandomCamera& cam, double dist, double lat) {
    return {cam.position.x + dist * cam.facing.x + lat * cam.facing.y,
            cam.position.y + dist * cam.facing.y - lat * cam.facing.x};
}

/// Mask holding vertical stripes [first, last] (inclusive columns) over every row.
inline linemark::SegMask stripes(const std::vector<std::pair<int, int>>& cols,
                                 linemark::MaskClass cls = linemark::MaskClass::Lane,
                                 const linemark::BevSpec& bev = {}) {
    linemark::SegMask m(bev);
    for (int r = 0; r < bev.rows; ++r) {
        for (const auto& [a, b] : cols) {
            for (int c = a; c <= b; ++c) m.labels.set(r, c, cls);
        }
    }
    return m;
}

struct Stripe {
    double beta = 0.0;
    double theta = 0.0;       // column at the ego row
    double half_width = 2.0;  // cells, perpendicular to the line
};

/// Noise-free mask of straight stripes in line-frame coordinates: a cell
/// is foreground when its center lies within half_width of the centerline.
inline linemark::SegMask stripe_mask(const std::vector<Stripe>& lines,
                                     linemark::MaskClass cls = linemark::MaskClass::Lane,
                                     const linemark::BevSpec& bev = {}) {
    linemark::SegMask m(bev);
    for (int r = 0; r < bev.rows; ++r) {
        const double y = linemark::line_frame_y(bev, r);
        for (int c = 0; c < bev.cols; ++c) {
            for (const Stripe& s : lines) {
                if (std::abs(c - (s.beta * y + s.theta)) / std::hypot(1.0, s.beta) <= s.half_width) {
                    m.labels.set(r, c, cls);
                }
            }
        }
    }
    return m;
}

/// 1-4 non-touching near-longitudinal stripes that stay inside the raster.
inline std::vector<Stripe> random_stripes(Rng& rng) {
    const int n = integer(rng, 1, 4);
    for (;;) {
        std::vector<Stripe> out;
        for (int i = 0; i < n; ++i) {
            out.push_back({uniform(rng, -0.05, 0.05), uniform(rng, 60.0, 420.0), uniform(rng, 1.0, 5.0)});
        }
        std::sort(out.begin(), out.end(), [](const Stripe& a, const Stripe& b) { return a.theta < b.theta; });
        bool ok = true;
        for (std::size_t i = 1; i < out.size(); ++i) ok = ok && out[i].theta - out[i - 1].theta >= 60.0;
        if (ok) return out;
    }
}

}  // namespace testsupport
