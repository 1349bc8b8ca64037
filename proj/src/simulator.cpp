#include "linemark/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "linemark/errors.hpp"
#include "rng.hpp"

namespace linemark {

using detail::Rng;

std::string_view to_string(LineKind kind) {
    switch (kind) {
        case LineKind::Lane: return "lane";
        case LineKind::ParkingLongitudinal: return "parking_longitudinal";
        case LineKind::ParkingHorizontal: return "parking_horizontal";
        case LineKind::Median: return "median";
    }
    return "?";
}

MaskClass mask_class(LineKind kind) {
    switch (kind) {
        case LineKind::Lane: return MaskClass::Lane;
        case LineKind::ParkingLongitudinal:
        case LineKind::ParkingHorizontal: return MaskClass::Parking;
        case LineKind::Median: return MaskClass::Median;
    }
    return MaskClass::Background;
}

std::optional<LandmarkKind> landmark_kind(LineKind kind) {
    switch (kind) {
        case LineKind::Lane: return LandmarkKind::Lane;
        case LineKind::ParkingLongitudinal: return LandmarkKind::Parking;
        case LineKind::Median: return LandmarkKind::Median;
        case LineKind::ParkingHorizontal: return std::nullopt;
    }
    return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    };
    return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ull));
}

// ---------------------------------------------------------------------------
// Scene generation

std::vector<std::string> validate(const SceneTruth& scene) {
    std::vector<std::string> errors;
    std::array<int, 4> kinds{};
    for (const TrueLine& l : scene.lines) {
        if (!(l.width > 0.0)) errors.emplace_back("line width must be positive");
        if (std::hypot(l.end.x - l.start.x, l.end.y - l.start.y) <= 0.0) errors.emplace_back("zero-length line");
        if (l.dashed && !(l.dash > 0.0 && l.gap > 0.0)) errors.emplace_back("dashed line needs positive dash and gap");
        kinds[static_cast<int>(l.kind)]++;
    }
    for (const TrueVehicle& v : scene.vehicles) {
        if (!(v.length > 0.0 && v.width > 0.0)) errors.emplace_back("degenerate vehicle rectangle");
    }
    for (std::size_t i = 1; i < scene.trajectory.size(); ++i) {
        if (!(scene.trajectory[i].t > scene.trajectory[i - 1].t)) {
            errors.emplace_back("trajectory timestamps must increase strictly");
            break;
        }
    }
    if (kinds[static_cast<int>(LineKind::Lane)] == 0) errors.emplace_back("scene has no lane line");
    if (kinds[static_cast<int>(LineKind::Median)] == 0) errors.emplace_back("scene has no median line");
    if (kinds[static_cast<int>(LineKind::ParkingLongitudinal)] == 0) errors.emplace_back("scene has no parking line");
    if (scene.vehicles.empty()) errors.emplace_back("scene has no parked vehicle");
    return errors;
}

namespace {

struct AisleLayout {
    double median_x;
    double lane_x;
    bool lane_dashed;
    double inner;       // |x| of the aisle-side parking line
    double outer;       // |x| of the curb-side parking line
    double stall;       // stall length along the aisle
    double setback;     // vehicle near side beyond the inner line
    double weave_amp;   // ego lateral weave amplitude
    double weave_len;   // and wavelength
};

SceneTruth build_aisle(std::uint64_t seed, std::string_view name, const AisleLayout& layout, const SceneOptions& opts) {
    Rng rng(mix_seed(seed, 0x5ce7e));
    SceneTruth scene;
    scene.template_name = std::string(name);
    scene.seed = seed;

    const int frames = std::max(opts.frames, 0);
    const double travel = opts.speed * opts.frame_dt * std::max(frames - 1, 0);
    const double y0 = -15.0;
    const double y1 = travel + 15.0;

    const double median_x = layout.median_x + rng.uniform(-0.1, 0.1);
    scene.lines.push_back({LineKind::Median, {median_x, y0}, {median_x, y1}, rng.uniform(0.12, 0.16)});

    const double lane_x = layout.lane_x + rng.uniform(-0.1, 0.1);
    TrueLine lane{LineKind::Lane, {lane_x, y0}, {lane_x, y1}, rng.uniform(0.10, 0.14)};
    lane.dashed = layout.lane_dashed;
    lane.dash = 2.0;
    lane.gap = 2.0;
    lane.phase = rng.uniform(0.0, lane.dash + lane.gap);
    scene.lines.push_back(lane);

    const double parking_width = rng.uniform(0.10, 0.14);
    for (double side : {-1.0, 1.0}) {
        const double inner = side * (layout.inner + rng.uniform(-0.05, 0.05));
        const double outer = side * (layout.outer + rng.uniform(-0.05, 0.05));
        scene.lines.push_back({LineKind::ParkingLongitudinal, {inner, y0}, {inner, y1}, parking_width});
        scene.lines.push_back({LineKind::ParkingLongitudinal, {outer, y0}, {outer, y1}, parking_width});

        const double offset = rng.uniform(0.0, layout.stall);
        std::vector<double> stall_starts;
        for (double y = y0 + offset; y + layout.stall <= y1; y += layout.stall) {
            scene.lines.push_back({LineKind::ParkingHorizontal, {inner, y}, {outer, y}, parking_width});
            stall_starts.push_back(y);
        }
        std::vector<bool> occupied(stall_starts.size());
        int count = 0;
        for (std::size_t i = 0; i < occupied.size(); ++i) {
            occupied[i] = rng.bernoulli(0.8);
            count += occupied[i];
        }
        for (std::size_t i = 0; count < 3 && i < occupied.size(); ++i) {
            if (!occupied[i]) {
                occupied[i] = true;
                ++count;
            }
        }
        const double vehicle_width = 1.8;
        for (std::size_t i = 0; i < occupied.size(); ++i) {
            if (!occupied[i]) continue;
            const double near = inner + side * layout.setback;
            scene.vehicles.push_back(
                {{near + side * 0.5 * vehicle_width, stall_starts[i] + 0.5 * layout.stall}, 4.5, vehicle_width, 0.0});
        }
    }

    const double k = 2.0 * std::numbers::pi / layout.weave_len;
    for (int f = 0; f < frames; ++f) {
        const double t = f * opts.frame_dt;
        const double y = opts.speed * t;
        const double x = layout.weave_amp * std::sin(k * y);
        const double slope = layout.weave_amp * k * std::cos(k * y);
        scene.trajectory.push_back({t, {x, y, -std::atan(slope)}});
    }
    return scene;
}

}  // namespace

std::vector<std::string_view> scene_templates() { return {"straight_aisle", "narrow_aisle"}; }

SceneTruth generate_scene(std::uint64_t seed, std::string_view template_name, const SceneOptions& opts) {
    if (template_name == "straight_aisle") {
        return build_aisle(seed, template_name, {-0.9, 1.5, true, 2.6, 4.4, 6.0, 0.3, 0.05, 40.0}, opts);
    }
    if (template_name == "narrow_aisle") {
        return build_aisle(seed, template_name, {-0.7, 1.2, false, 2.3, 4.1, 5.5, 0.25, 0.04, 30.0}, opts);
    }
    throw UnknownTemplate("unknown scene template: " + std::string(template_name));
}

NoiseSpec NoiseSpec::defaults() {
    NoiseSpec n;
    n.p_drop = 0.05;
    n.speckle_cells = 300;
    n.occlusions = 1;
    n.occlusion_size = 40;
    n.box_jitter_px = 1.0;
    n.miss_prob = 0.05;
    n.false_positive_rate = 0.02;
    return n;
}

std::vector<std::string> NoiseSpec::violations() const {
    std::vector<std::string> v;
    auto prob = [&](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) v.push_back(std::string(name) + " must be in [0, 1]");
    };
    prob(p_drop, "p_drop");
    prob(miss_prob, "miss_prob");
    prob(false_positive_rate, "false_positive_rate");
    if (dilate_radius < 0 || erode_radius < 0) v.emplace_back("morphology radii must be >= 0");
    if (speckle_cells < 0 || occlusions < 0 || occlusion_size < 1) v.emplace_back("speckle/occlusion counts invalid");
    if (!(box_jitter_px >= 0.0)) v.emplace_back("box_jitter_px must be >= 0");
    return v;
}

// ---------------------------------------------------------------------------
// Rig

CameraRig default_rig() {
    const double f = 800.0;
    const double pitch = 80.0 * std::numbers::pi / 180.0;
    auto cam = [&](CameraId id, Eigen::Vector3d pos, GroundPoint facing) {
        return Camera(id, pinhole_ground_homography(f, 640.0, 480.0, pos, facing, pitch), 1280, 960);
    };
    return CameraRig{{cam(CameraId::Front, {0.0, 3.5, 6.0}, {0.0, 1.0}), cam(CameraId::Rear, {0.0, -3.5, 6.0}, {0.0, -1.0}),
                      cam(CameraId::Left, {-2.0, 0.0, 6.0}, {-1.0, 0.0}),
                      cam(CameraId::Right, {2.0, 0.0, 6.0}, {1.0, 0.0})},
                     BevSpec{},
                     50.0};
}

// ---------------------------------------------------------------------------
// Rasterization

namespace {

struct EgoStripe {
    MaskClass cls;
    Eigen::Vector2d p0;
    Eigen::Vector2d d;  // unit direction
    Eigen::Vector2d n;  // unit normal
    double length;
    double half_width;
    bool dashed;
    double dash;
    double period;
    double phase;
};

int priority(MaskClass c) {
    switch (c) {
        case MaskClass::Parking: return 0;
        case MaskClass::Lane: return 1;
        case MaskClass::Median: return 2;
        default: return -1;
    }
}

std::vector<EgoStripe> ego_stripes(const SceneTruth& scene, const GroundPose& pose) {
    std::vector<EgoStripe> out;
    for (const TrueLine& l : scene.lines) {
        const GroundPoint a = world_to_ego(pose, l.start);
        const GroundPoint b = world_to_ego(pose, l.end);
        Eigen::Vector2d d(b.x - a.x, b.y - a.y);
        const double len = d.norm();
        d /= len;
        out.push_back({mask_class(l.kind), {a.x, a.y}, d, {-d.y(), d.x()}, len, 0.5 * l.width, l.dashed, l.dash,
                       l.dash + l.gap, l.phase});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const EgoStripe& x, const EgoStripe& y) { return priority(x.cls) < priority(y.cls); });
    return out;
}

// Restricts [lo, hi] to the x satisfying vmin <= k*x + m <= vmax.
bool restrict_linear(double k, double m, double vmin, double vmax, double& lo, double& hi) {
    if (std::abs(k) < 1e-12) return m >= vmin && m <= vmax;
    double a = (vmin - m) / k;
    double b = (vmax - m) / k;
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    return lo <= hi;
}

void paint_span(LabelGrid& grid, const BevSpec& bev, int row, double xlo, double xhi, MaskClass cls) {
    const double clo = std::ceil(bev.center_col() + (xlo - bev.origin.x) / bev.scale);
    const double chi = std::floor(bev.center_col() + (xhi - bev.origin.x) / bev.scale);
    const int c0 = static_cast<int>(std::max(clo, 0.0));
    const int c1 = static_cast<int>(std::min(chi, static_cast<double>(bev.cols - 1)));
    for (int c = c0; c <= c1; ++c) grid.set(row, c, cls);
}

}  // namespace

SegMask render_bev(const SceneTruth& scene, const GroundPose& pose, const BevSpec& bev) {
    SegMask mask(bev);
    const auto stripes = ego_stripes(scene, pose);
    const double x_min = bev.cell_to_ground(-1.0, 0).x;
    const double x_max = bev.cell_to_ground(bev.cols, 0).x;
    for (int r = 0; r < bev.rows; ++r) {
        const double y = bev.cell_to_ground(0, r).y;
        for (const EgoStripe& s : stripes) {
            double lo = x_min, hi = x_max;
            // |n.(p - p0)| <= hw and 0 <= d.(p - p0) <= L with p = (x, y)
            const double nm = s.n.y() * y - s.n.dot(s.p0);
            if (!restrict_linear(s.n.x(), nm, -s.half_width, s.half_width, lo, hi)) continue;
            const double dm = s.d.y() * y - s.d.dot(s.p0);
            if (!restrict_linear(s.d.x(), dm, 0.0, s.length, lo, hi)) continue;
            if (!s.dashed) {
                paint_span(mask.labels, bev, r, lo, hi, s.cls);
                continue;
            }
            const double k = s.d.x();
            if (std::abs(k) < 1e-12) {
                if (std::fmod(dm + s.phase, s.period) < s.dash) paint_span(mask.labels, bev, r, lo, hi, s.cls);
                continue;
            }
            double s_lo = k * lo + dm, s_hi = k * hi + dm;
            if (s_lo > s_hi) std::swap(s_lo, s_hi);
            const auto first = static_cast<long long>(std::floor((s_lo + s.phase) / s.period));
            const auto last = static_cast<long long>(std::floor((s_hi + s.phase) / s.period));
            for (long long i = first; i <= last; ++i) {
                const double on_lo = std::max(s_lo, i * s.period - s.phase);
                const double on_hi = std::min(s_hi, i * s.period - s.phase + s.dash);
                if (on_lo > on_hi) continue;
                double xa = (on_lo - dm) / k, xb = (on_hi - dm) / k;
                if (xa > xb) std::swap(xa, xb);
                paint_span(mask.labels, bev, r, xa, xb, s.cls);
            }
        }
    }
    return mask;
}

// ---------------------------------------------------------------------------
// Noise

namespace {

void dilate(LabelGrid& g, int radius) {
    if (radius <= 0) return;
    const LabelGrid src = g;
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) {
            if (src.at(r, c) != 0) continue;
            // nearest foreground by Chebyshev ring, scanning rings outward
            for (int k = 1; k <= radius && g.at(r, c) == 0; ++k) {
                for (int dr = -k; dr <= k && g.at(r, c) == 0; ++dr) {
                    for (int dc = -k; dc <= k; ++dc) {
                        if (std::max(std::abs(dr), std::abs(dc)) != k || !src.contains(r + dr, c + dc)) continue;
                        if (const auto v = src.at(r + dr, c + dc); v != 0) {
                            g.at(r, c) = v;
                            break;
                        }
                    }
                }
            }
        }
    }
}

void erode(LabelGrid& g, int radius) {
    if (radius <= 0) return;
    const LabelGrid src = g;
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) {
            const auto v = src.at(r, c);
            if (v == 0) continue;
            bool keep = true;
            for (int dr = -radius; dr <= radius && keep; ++dr) {
                for (int dc = -radius; dc <= radius; ++dc) {
                    if (!src.contains(r + dr, c + dc) || src.at(r + dr, c + dc) != v) {
                        keep = false;
                        break;
                    }
                }
            }
            if (!keep) g.at(r, c) = 0;
        }
    }
}

void corrupt_mask(LabelGrid& g, const NoiseSpec& noise, Rng& rng) {
    dilate(g, noise.dilate_radius);
    erode(g, noise.erode_radius);
    for (int i = 0; i < noise.speckle_cells; ++i) {
        const int r = rng.integer(0, g.rows() - 1);
        const int c = rng.integer(0, g.cols() - 1);
        g.at(r, c) = static_cast<std::uint8_t>(rng.integer(1, kMaskClassCount - 1));
    }
    for (int i = 0; i < noise.occlusions; ++i) {
        const int h = rng.integer(1, noise.occlusion_size);
        const int w = rng.integer(1, noise.occlusion_size);
        const int r0 = rng.integer(0, g.rows() - 1);
        const int c0 = rng.integer(0, g.cols() - 1);
        for (int r = r0; r < std::min(r0 + h, g.rows()); ++r) {
            for (int c = c0; c < std::min(c0 + w, g.cols()); ++c) g.at(r, c) = 0;
        }
    }
    if (noise.p_drop > 0.0) {
        for (auto& v : g.data()) {
            if (v != 0 && rng.bernoulli(noise.p_drop)) v = 0;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vehicles and detections

GroundPoint near_side_midpoint(const TrueVehicle& vehicle, const GroundPose& pose) {
    const GroundPoint normal{std::cos(vehicle.heading), std::sin(vehicle.heading)};
    const double h = 0.5 * vehicle.width;
    const GroundPoint a = world_to_ego(pose, {vehicle.center.x + h * normal.x, vehicle.center.y + h * normal.y});
    const GroundPoint b = world_to_ego(pose, {vehicle.center.x - h * normal.x, vehicle.center.y - h * normal.y});
    return std::abs(a.x) <= std::abs(b.x) ? a : b;
}

bool detectable(const Camera& camera, GroundPoint p, double working_extent) {
    if (std::abs(p.x) > working_extent || std::abs(p.y) > working_extent) return false;
    const auto q = camera.image_of(p);
    return q && q->u >= 0.5 && q->u <= camera.width() - 0.5 && q->v >= 1.0;
}

namespace {

std::vector<DetectionBox> render_detections(const SceneTruth& scene, const GroundPose& pose, const CameraRig& rig,
                                            const NoiseSpec& noise, Rng& rng) {
    std::vector<DetectionBox> out;
    for (CameraId id : kCameraPriority) {
        const Camera& cam = rig.camera(id);
        const double width = cam.width();
        const double height = cam.height();
        auto emit = [&](double ku, double kv, double w, double h, double score) {
            if (!(ku >= 0.5 && ku <= width - 0.5 && kv >= 1.0 && kv < height)) return;
            w = std::min({w, 2.0 * ku, 2.0 * (width - ku)});
            h = std::min(h, kv);
            if (!(w > 0.0 && h > 0.0)) return;
            out.push_back({id, ku - 0.5 * w, kv - h, w, h, score});
        };
        for (const TrueVehicle& veh : scene.vehicles) {
            const GroundPoint mid = near_side_midpoint(veh, pose);
            if (!detectable(cam, mid, rig.working_extent)) continue;
            if (rng.bernoulli(noise.miss_prob)) continue;
            const ImagePoint q = project(cam.homography(), mid);
            // apparent width from the projected ends of the near side
            const GroundPoint axis = world_to_ego({0.0, 0.0, pose.yaw}, {-std::sin(veh.heading), std::cos(veh.heading)});
            const GroundPoint e1{mid.x + 0.5 * veh.length * axis.x, mid.y + 0.5 * veh.length * axis.y};
            const GroundPoint e2{mid.x - 0.5 * veh.length * axis.x, mid.y - 0.5 * veh.length * axis.y};
            double w0 = 120.0;
            if (cam.in_front(e1) && cam.in_front(e2)) {
                w0 = std::abs(project(cam.homography(), e1).u - project(cam.homography(), e2).u);
            }
            w0 = std::clamp(w0, 24.0, 400.0);
            const double ku = q.u + rng.normal(noise.box_jitter_px);
            const double kv = q.v + rng.normal(noise.box_jitter_px);
            const double w = w0 + rng.normal(noise.box_jitter_px);
            const double h = 0.6 * w0 + rng.normal(noise.box_jitter_px);
            emit(ku, kv, w, h, rng.uniform(0.7, 1.0));
        }
        if (rng.bernoulli(noise.false_positive_rate)) {
            const double ku = rng.uniform(50.0, width - 50.0);
            const double kv = rng.uniform(0.4 * height, height - 1.0);
            const double w = rng.uniform(40.0, 200.0);
            emit(ku, kv, w, 0.6 * w, rng.uniform(0.3, 0.6));
        }
    }
    return out;
}

}  // namespace

FrameObservation render_frame(const SceneTruth& scene, int frame, const CameraRig& rig, const NoiseSpec& noise,
                              std::uint64_t seed) {
    if (frame < 0 || frame >= scene.frame_count()) {
        throw FrameOutOfRange("frame " + std::to_string(frame) + " outside trajectory of " +
                              std::to_string(scene.frame_count()) + " frames");
    }
    const GroundPose& pose = scene.trajectory[static_cast<std::size_t>(frame)].pose;
    FrameObservation obs;
    obs.frame = frame;
    obs.mask = render_bev(scene, pose, rig.bev);
    Rng mask_rng(mix_seed(seed, static_cast<std::uint64_t>(frame), 1));
    corrupt_mask(obs.mask.labels, noise, mask_rng);
    Rng det_rng(mix_seed(seed, static_cast<std::uint64_t>(frame), 2));
    obs.detections = render_detections(scene, pose, rig, noise, det_rng);
    if (frame > 0) obs.ego_delta = relative_motion(scene.trajectory[static_cast<std::size_t>(frame) - 1].pose, pose);
    return obs;
}

LabelGrid render_camera_labels(const SegMask& bev_mask, const CameraRig& rig, CameraId camera) {
    const Camera& cam = rig.camera(camera);
    const BevSpec& bev = bev_mask.bev;
    LabelGrid img(cam.height(), cam.width());
    const Eigen::Matrix3d& inv = cam.homography().inverse_matrix();
    for (int v = 0; v < cam.height(); ++v) {
        for (int u = 0; u < cam.width(); ++u) {
            const Eigen::Vector3d r = inv * Eigen::Vector3d(u, v, 1.0);
            if (r.z() == 0.0) continue;
            const GroundPoint p{r.x() / r.z(), r.y() / r.z()};
            if (!cam.in_front(p)) continue;
            const Eigen::Vector2d cell = bev.ground_to_cell(p);
            const int c = static_cast<int>(std::floor(cell.x() + 0.5));
            const int rr = static_cast<int>(std::floor(cell.y() + 0.5));
            if (bev_mask.labels.contains(rr, c)) img.at(v, u) = bev_mask.labels.at(rr, c);
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Ground truth

namespace {

// Liang-Barsky clip of segment a->b against an axis-aligned box.
bool clip_segment(GroundPoint& a, GroundPoint& b, double x0, double x1, double y0, double y1) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
        if (t0 > t1) return false;
    }
    const GroundPoint a0 = a;
    a = {a0.x + t0 * dx, a0.y + t0 * dy};
    b = {a0.x + t1 * dx, a0.y + t1 * dy};
    return true;
}

}  // namespace

std::vector<LineLandmark> truth_landmarks(const SceneTruth& scene, int frame, const CameraRig& rig) {
    if (frame < 0 || frame >= scene.frame_count()) throw FrameOutOfRange("frame " + std::to_string(frame));
    const GroundPose& pose = scene.trajectory[static_cast<std::size_t>(frame)].pose;
    const BevSpec& bev = rig.bev;
    const GroundPoint lo = bev.cell_to_ground(-0.5, bev.rows - 0.5);
    const GroundPoint hi = bev.cell_to_ground(bev.cols - 0.5, -0.5);
    const double s = bev.scale;

    std::vector<LineLandmark> out;
    for (const TrueLine& l : scene.lines) {
        const auto kind = landmark_kind(l.kind);
        if (!kind) continue;
        GroundPoint a = world_to_ego(pose, l.start);
        GroundPoint b = world_to_ego(pose, l.end);
        const double dx = b.x - a.x, dy = b.y - a.y;
        if (std::abs(dy) < 0.5 * std::hypot(dx, dy)) continue;  // not a longitudinal line in this frame
        if (!clip_segment(a, b, lo.x, hi.x, lo.y, hi.y)) continue;
        if (std::hypot(b.x - a.x, b.y - a.y) < 1.0) continue;
        LineLandmark lm;
        lm.kind = *kind;
        lm.beta = dx / dy;
        const double x0 = a.x - lm.beta * a.y;
        lm.theta = bev.ego_col() + x0 / s;
        lm.cx = bev.ego_col() + 0.5 * (a.x + b.x) / s;
        lm.cy = 0.5 * (a.y + b.y) / s;
        lm.phi = std::atan(lm.beta);
        lm.confidence = 1.0;
        out.push_back(lm);
    }

    // stationary-vehicle boundary: tightest detectable near-side midpoint per side
    std::array<double, 2> best = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    std::array<double, 2> best_x{};
    for (const TrueVehicle& v : scene.vehicles) {
        const GroundPoint m = near_side_midpoint(v, pose);
        bool seen = false;
        for (const Camera& cam : rig.cameras) seen = seen || detectable(cam, m, rig.working_extent);
        if (!seen || m.x == 0.0) continue;
        const int side = m.x < 0.0 ? 0 : 1;
        if (std::abs(m.x) < best[side]) {
            best[side] = std::abs(m.x);
            best_x[side] = m.x;
        }
    }
    for (int side = 0; side < 2; ++side) {
        if (!std::isfinite(best[side])) continue;
        LineLandmark lm;
        lm.kind = LandmarkKind::Boundary;
        lm.theta = bev.ego_col() + best_x[side] / s;
        lm.cx = lm.theta;
        lm.confidence = 1.0;
        out.push_back(lm);
    }
    return out;
}

}  // namespace linemark
