#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "linemark/errors.hpp"
#include "linemark/mask.hpp"
#include "linemark/simulator.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace linemark;

namespace {

long differing_cells(const LabelGrid& a, const LabelGrid& b) {
    long n = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) n += a.data()[i] != b.data()[i];
    return n;
}

std::array<LabelGrid, 4> camera_images(const SegMask& bev, const CameraRig& rig) {
    return {render_camera_labels(bev, rig, CameraId::Front), render_camera_labels(bev, rig, CameraId::Rear),
            render_camera_labels(bev, rig, CameraId::Left), render_camera_labels(bev, rig, CameraId::Right)};
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("straight_aisle seed 0 honours the template contract") {
    const SceneTruth s = generate_scene(0, "straight_aisle");
    int lane = 0, median = 0, parking = 0;
    for (const auto& l : s.lines) {
        lane += l.kind == LineKind::Lane;
        median += l.kind == LineKind::Median;
        parking += l.kind == LineKind::ParkingLongitudinal;
    }
    CHECK(lane == 1);
    CHECK(median == 1);
    CHECK(parking >= 4);
    int left = 0, right = 0;
    for (const auto& v : s.vehicles) (v.center.x < 0 ? left : right)++;
    CHECK(left >= 3);
    CHECK(right >= 3);
    CHECK(s.frame_count() == 400);
}

TEST_CASE("scenes are deterministic and valid across seeds") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SceneTruth s = generate_scene(seed, "straight_aisle");
        CHECK(validate(s).empty());
    }
    for (auto name : scene_templates()) CHECK(validate(generate_scene(3, name)).empty());
    const SceneTruth a = generate_scene(9, "straight_aisle"), b = generate_scene(9, "straight_aisle");
    REQUIRE(a.lines.size() == b.lines.size());
    for (std::size_t i = 0; i < a.lines.size(); ++i) {
        CHECK(a.lines[i].start.x == b.lines[i].start.x);
        CHECK(a.lines[i].width == b.lines[i].width);
        CHECK(a.lines[i].phase == b.lines[i].phase);
    }
    CHECK(a.trajectory.back().pose.x == b.trajectory.back().pose.x);
}

TEST_CASE("unknown template and out of range frames raise") {
    CHECK_THROWS_AS(generate_scene(0, "roundabout"), UnknownTemplate);
    const SceneTruth s = generate_scene(0, "straight_aisle", {.frames = 3});
    CHECK_THROWS_AS(render_frame(s, 3, default_rig(), NoiseSpec::none(), 0), FrameOutOfRange);
    CHECK_THROWS_AS(render_frame(s, -1, default_rig(), NoiseSpec::none(), 0), FrameOutOfRange);
}

TEST_CASE("noise-free masks equal the point-in-stripe oracle on every cell") {
    const CameraRig rig = default_rig();
    for (auto name : scene_templates()) {
        for (std::uint64_t seed : {0u, 4u}) {
            const SceneTruth s = generate_scene(seed, name);
            for (int f : {0, 37, 150, 399}) {
                const auto obs = render_frame(s, f, rig, NoiseSpec::none(), seed);
                const LabelGrid want = oracle::rasterize(s, s.trajectory[f].pose, rig.bev);
                CHECK(differing_cells(obs.mask.labels, want) == 0);
                CHECK(obs.mask.labels.foreground_count() > 0);
            }
        }
    }
}

TEST_CASE("rotated poses also match the raster oracle") {
    const CameraRig rig = default_rig();
    SceneTruth s = generate_scene(2, "straight_aisle", {.frames = 1});
    for (double yaw : {-0.3, 0.17, 0.6}) {
        const GroundPose pose{0.2, 1.3, yaw};
        CHECK(differing_cells(render_bev(s, pose, rig.bev).labels, oracle::rasterize(s, pose, rig.bev)) == 0);
    }
}

TEST_CASE("dropping every cell leaves an all-background mask") {
    NoiseSpec n;
    n.p_drop = 1.0;
    const SceneTruth s = generate_scene(0, "straight_aisle", {.frames = 2});
    CHECK(render_frame(s, 1, default_rig(), n, 3).mask.labels.foreground_count() == 0);
}

TEST_CASE("observations are bit-identical for identical inputs") {
    const SceneTruth s = generate_scene(1, "straight_aisle", {.frames = 10});
    const CameraRig rig = default_rig();
    const auto a = render_frame(s, 7, rig, NoiseSpec::defaults(), 42);
    const auto b = render_frame(s, 7, rig, NoiseSpec::defaults(), 42);
    CHECK(a.mask == b.mask);
    CHECK(a.detections == b.detections);
    const auto c = render_frame(s, 7, rig, NoiseSpec::defaults(), 43);
    CHECK_FALSE(a.mask == c.mask);
}

TEST_CASE("noise spec validation") {
    CHECK(NoiseSpec::defaults().violations().empty());
    NoiseSpec n;
    n.p_drop = 1.5;
    n.dilate_radius = -1;
    CHECK(n.violations().size() == 2);
}

TEST_CASE("lines re-extracted by total least squares agree with the scene") {
    const CameraRig rig = default_rig();
    const BevSpec& bev = rig.bev;
    const SceneTruth s = generate_scene(6, "straight_aisle");
    for (int f : {0, 120, 333}) {
        const auto obs = render_frame(s, f, rig, NoiseSpec::none(), 1);
        const auto truth = truth_landmarks(s, f, rig);
        int checked = 0;
        for (const LineLandmark& t : truth) {
            if (t.kind == LandmarkKind::Boundary) continue;
            const MaskClass cls = t.kind == LandmarkKind::Lane     ? MaskClass::Lane
                                  : t.kind == LandmarkKind::Median ? MaskClass::Median
                                                                   : MaskClass::Parking;
            std::vector<std::pair<double, double>> cells;
            const double band = 0.1 / bev.scale;  // wider than any half-width
            for (int r = 0; r < bev.rows; ++r) {
                const double y = line_frame_y(bev, r);
                for (int c = 0; c < bev.cols; ++c) {
                    if (obs.mask.labels.label(r, c) != cls) continue;
                    if (std::abs(c - t.x_at(y)) / std::hypot(1.0, t.beta) <= band) cells.emplace_back(c, y);
                }
            }
            if (cells.size() < 50) continue;  // line barely inside the raster
            const auto [beta, theta] = oracle::tls(cells);
            CHECK(std::abs(theta - t.theta) < 1.0);
            CHECK(std::abs(beta - t.beta) < 0.01);
            ++checked;
        }
        CHECK(checked >= 5);
    }
}

TEST_CASE("vehicle beside the ego back-projects from the left camera") {
    const CameraRig rig = default_rig();
    const SceneTruth s = generate_scene(0, "straight_aisle");
    int seen = 0;
    for (int f = 0; f < s.frame_count(); f += 20) {
        const GroundPose& pose = s.trajectory[f].pose;
        const auto obs = render_frame(s, f, rig, NoiseSpec::none(), 0);
        for (const auto& v : s.vehicles) {
            const GroundPoint mid = near_side_midpoint(v, pose);
            if (!(mid.x < 0 && std::abs(mid.y) < 1.0)) continue;  // directly to the left
            double best = 1e9;
            for (const auto& d : obs.detections) {
                if (d.camera != CameraId::Left) continue;
                const GroundPoint g = rig.camera(CameraId::Left).to_ground({d.u + 0.5 * d.w, d.v + d.h});
                best = std::min(best, std::hypot(g.x - mid.x, g.y - mid.y));
            }
            CHECK(best < 0.05);
            ++seen;
        }
    }
    CHECK(seen > 0);
}

TEST_CASE("warp of all-background images is all background") {
    const CameraRig rig = default_rig();
    std::array<LabelGrid, 4> imgs;
    for (int i = 0; i < 4; ++i) imgs[i] = LabelGrid(960, 1280);
    CHECK(warp_to_bev(rig, imgs).labels.foreground_count() == 0);
}

TEST_CASE("a single foreground pixel lights exactly its BEV cell") {
    const BevSpec bev{20, 16, 0.5, {}};
    const CameraRig rig = identity_rig(bev);
    std::array<LabelGrid, 4> imgs;
    for (int i = 0; i < 4; ++i) imgs[i] = LabelGrid(bev.rows, bev.cols);
    imgs[0].set(7, 5, MaskClass::Median);  // front camera, which owns every cell
    const SegMask out = warp_to_bev(rig, imgs);
    CHECK(out.labels.foreground_count() == 1);
    CHECK(out.labels.label(7, 5) == MaskClass::Median);
}

TEST_CASE("warping through the identity rig is idempotent") {
    const CameraRig rig = identity_rig();
    const SceneTruth s = generate_scene(0, "straight_aisle", {.frames = 1});
    const SegMask bev = render_bev(s, s.trajectory[0].pose, rig.bev);
    const std::array<LabelGrid, 4> imgs{bev.labels, bev.labels, bev.labels, bev.labels};
    CHECK(warp_to_bev(rig, imgs) == bev);
}

TEST_CASE("per-camera render then warp reproduces the direct BEV away from seams") {
    const CameraRig rig = default_rig();
    const SceneTruth s = generate_scene(3, "straight_aisle");
    const BevWarp warp(rig);
    const auto owner = warp.owners();
    const BevSpec& bev = rig.bev;
    auto near_seam = [&](int r, int c) {
        const int o = owner[static_cast<std::size_t>(r) * bev.cols + c];
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || cc < 0 || rr >= bev.rows || cc >= bev.cols) continue;
                if (owner[static_cast<std::size_t>(rr) * bev.cols + cc] != o) return true;
            }
        return false;
    };
    for (int f : {0, 200}) {
        const SegMask direct = render_bev(s, s.trajectory[f].pose, bev);
        const SegMask warped = warp.apply(camera_images(direct, rig));
        CHECK(warped == warp_to_bev(rig, camera_images(direct, rig)));
        long bad = 0;
        for (int r = 0; r < bev.rows; ++r)
            for (int c = 0; c < bev.cols; ++c)
                if (!near_seam(r, c) && warped.labels.at(r, c) != direct.labels.at(r, c)) ++bad;
        CHECK(bad == 0);
    }
}

TEST_CASE("default rig covers the whole raster") {
    const auto owner = bev_camera_owner(default_rig());
    CHECK(std::count(owner.begin(), owner.end(), -1) == 0);
    CHECK(std::count(owner.begin(), owner.end(), 0) > 0);
    CHECK(std::count(owner.begin(), owner.end(), 3) > 0);
}

TEST_CASE("mask files round trip and reject corruption") {
    const auto dir = std::filesystem::temp_directory_path() / "linemark_maskio";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "m.bevm").string();
    const SceneTruth s = generate_scene(0, "straight_aisle", {.frames = 1});
    const SegMask m = render_bev(s, s.trajectory[0].pose, BevSpec{});
    write_mask_file(m.labels, path);
    CHECK(read_mask_file(path) == m.labels);
    std::filesystem::resize_file(path, 100);
    CHECK_THROWS_AS(read_mask_file(path), DataError);
    CHECK_THROWS_AS(read_mask_file((dir / "absent.bevm").string()), DataError);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
