#include "linemark/boundary.hpp"

#include <cmath>
#include <limits>

#include "linemark/errors.hpp"

namespace linemark {

namespace {

std::uint8_t camera_bit(CameraId id) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(id)); }

}  // namespace

VehicleKeypoint VehicleKeypoint::from(CameraId camera, GroundPoint ground, double score) {
    return {camera, ground, score, score, camera_bit(camera)};
}

ImagePoint keypoint_pixel(const DetectionBox& box) { return {box.u + 0.5 * box.w, box.v + box.h}; }

KeypointResult keypoints_from_boxes(std::span<const DetectionBox> boxes, const CameraRig& rig,
                                    const KeypointOptions& opts) {
    KeypointResult out;
    const IpmOptions ipm{kHorizonEps, rig.working_extent};
    for (const DetectionBox& box : boxes) {
        if (box.score < opts.min_score) {
            ++out.dropped;
            continue;
        }
        const Camera& cam = rig.camera(box.camera);
        try {
            const GroundPoint g = cam.to_ground(keypoint_pixel(box), ipm);
            if (!cam.in_front(g)) {
                ++out.dropped;
                continue;
            }
            out.keypoints.push_back(VehicleKeypoint::from(box.camera, g, box.score));
        } catch (const HorizonSingularity&) {
            ++out.dropped;
        } catch (const OutOfWorkingArea&) {
            ++out.dropped;
        }
    }
    return out;
}

std::vector<VehicleKeypoint> associate_multiview(std::span<const VehicleKeypoint> keypoints, double max_distance) {
    std::vector<VehicleKeypoint> kps(keypoints.begin(), keypoints.end());
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < kps.size(); ++i) {
            for (std::size_t j = i + 1; j < kps.size(); ++j) {
                if (kps[i].cameras & kps[j].cameras) continue;
                const double d = std::hypot(kps[i].ground.x - kps[j].ground.x, kps[i].ground.y - kps[j].ground.y);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (!(best < max_distance)) break;
        VehicleKeypoint& a = kps[bi];
        const VehicleKeypoint& b = kps[bj];
        const double wa = a.weight > 0.0 ? a.weight : 1.0;
        const double wb = b.weight > 0.0 ? b.weight : 1.0;
        a.ground = {(wa * a.ground.x + wb * b.ground.x) / (wa + wb), (wa * a.ground.y + wb * b.ground.y) / (wa + wb)};
        a.weight = wa + wb;
        a.score = std::max(a.score, b.score);
        a.cameras |= b.cameras;
        a.camera = std::min(a.camera, b.camera);
        kps.erase(kps.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return kps;
}

std::vector<BoundaryLine> fit_boundary(std::span<const VehicleKeypoint> keypoints) {
    std::vector<BoundaryLine> out;
    for (Side side : {Side::Left, Side::Right}) {
        BoundaryLine line{side, 0.0, {}};
        double best = std::numeric_limits<double>::infinity();
        for (const VehicleKeypoint& kp : keypoints) {
            const bool on_side = side == Side::Left ? kp.ground.x < 0.0 : kp.ground.x > 0.0;
            if (!on_side) continue;
            line.support.push_back(kp);
            if (std::abs(kp.ground.x) < best) {
                best = std::abs(kp.ground.x);
                line.x_b = kp.ground.x;
            }
        }
        if (!line.support.empty()) out.push_back(std::move(line));
    }
    return out;
}

LineLandmark to_landmark(const BoundaryLine& line, const BevSpec& bev) {
    LineLandmark lm;
    lm.kind = LandmarkKind::Boundary;
    lm.beta = 0.0;
    lm.theta = bev.ego_col() + line.x_b / bev.scale;
    lm.cx = lm.theta;
    lm.cy = 0.0;
    lm.phi = 0.0;
    lm.confidence = 1.0;
    return lm;
}

BoundaryResult detect_boundaries(std::span<const DetectionBox> boxes, const CameraRig& rig,
                                 const KeypointOptions& opts) {
    BoundaryResult out;
    const KeypointResult kps = keypoints_from_boxes(boxes, rig, opts);
    const auto merged = associate_multiview(kps.keypoints);
    out.keypoints = static_cast<int>(kps.keypoints.size());
    out.merged = static_cast<int>(merged.size());
    out.dropped = kps.dropped;
    for (const BoundaryLine& line : fit_boundary(merged)) out.landmarks.push_back(to_landmark(line, rig.bev));
    return out;
}

}  // namespace linemark
