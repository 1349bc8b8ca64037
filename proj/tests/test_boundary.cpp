#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "linemark/boundary.hpp"
#include "linemark/simulator.hpp"
#include "support.hpp"

using namespace linemark;
using testsupport::uniform;

namespace {

VehicleKeypoint kp(CameraId cam, double x, double y, double score = 0.9) {
    return VehicleKeypoint::from(cam, {x, y}, score);
}

bool same_points(std::vector<VehicleKeypoint> a, std::vector<VehicleKeypoint> b) {
    if (a.size() != b.size()) return false;
    auto key = [](const VehicleKeypoint& k) { return std::pair{k.ground.x, k.ground.y}; };
    auto less = [&](const auto& p, const auto& q) { return key(p) < key(q); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].ground.x - b[i].ground.x) > 1e-12 || std::abs(a[i].ground.y - b[i].ground.y) > 1e-12) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_SUITE("boundary") {

TEST_CASE("keypoint pixel is the bottom center of the box") {
    const ImagePoint q = keypoint_pixel({CameraId::Front, 100, 50, 40, 60, 0.9});
    CHECK(q.u == 120.0);
    CHECK(q.v == 110.0);
}

TEST_CASE("empty inputs") {
    CHECK(keypoints_from_boxes({}, default_rig()).keypoints.empty());
    CHECK(associate_multiview({}).empty());
    CHECK(fit_boundary({}).empty());
}

TEST_CASE("cross-camera pairs merge strictly below 25 cm") {
    const std::vector<VehicleKeypoint> near{kp(CameraId::Front, -2.0, 1.0), kp(CameraId::Left, -2.0, 1.24)};
    const auto merged = associate_multiview(near);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].cameras == 0b0101);
    CHECK(merged[0].ground.y == doctest::Approx(1.12));
    const std::vector<VehicleKeypoint> far{kp(CameraId::Front, -2.0, 1.0), kp(CameraId::Left, -2.0, 1.26)};
    CHECK(associate_multiview(far).size() == 2);
    const std::vector<VehicleKeypoint> one{kp(CameraId::Rear, 3.0, -1.0)};
    const auto same = associate_multiview(one);
    REQUIRE(same.size() == 1);
    CHECK(same[0].ground.x == 3.0);
    CHECK(same[0].ground.y == -1.0);
}

TEST_CASE("merged keypoint is the score-weighted centroid") {
    const std::vector<VehicleKeypoint> k{kp(CameraId::Front, 0.0, 0.0, 0.6), kp(CameraId::Right, 0.2, 0.0, 0.2)};
    const auto m = associate_multiview(k);
    REQUIRE(m.size() == 1);
    CHECK(m[0].ground.x == doctest::Approx(0.05));
    CHECK(m[0].score == doctest::Approx(0.6));
}

TEST_CASE("same-camera keypoints never merge") {
    const std::vector<VehicleKeypoint> k{kp(CameraId::Left, -2.0, 1.0), kp(CameraId::Left, -2.0, 1.01)};
    CHECK(associate_multiview(k).size() == 2);
}

TEST_CASE("merging is order independent and never grows the set") {
    testsupport::Rng rng(99);
    for (int t = 0; t < 300; ++t) {
        std::vector<VehicleKeypoint> k;
        const int n = testsupport::integer(rng, 1, 8);
        for (int i = 0; i < n; ++i) {
            k.push_back(kp(static_cast<CameraId>(testsupport::integer(rng, 0, 3)), uniform(rng, -1, 1),
                           uniform(rng, -1, 1), uniform(rng, 0.5, 1.0)));
        }
        const auto a = associate_multiview(k);
        bool close_pair = false;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                close_pair = close_pair || (k[i].cameras != k[j].cameras &&
                                            std::hypot(k[i].ground.x - k[j].ground.x, k[i].ground.y - k[j].ground.y) <
                                                kAssociationDistance);
        CHECK(a.size() <= k.size());
        CHECK((a.size() == k.size()) == !close_pair);
        std::shuffle(k.begin(), k.end(), rng);
        CHECK(same_points(a, associate_multiview(k)));
    }
}

TEST_CASE("per-side minimum lateral offset") {
    const std::vector<VehicleKeypoint> k{kp(CameraId::Left, -2.1, 0), kp(CameraId::Left, -2.4, 3),
                                         kp(CameraId::Left, -1.9, -2)};
    const auto lines = fit_boundary(k);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].side == Side::Left);
    CHECK(lines[0].x_b == -1.9);
    CHECK(lines[0].support.size() == 3);
}

TEST_CASE("boundary fit is order invariant and tight") {
    testsupport::Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        std::vector<VehicleKeypoint> k;
        for (int i = 0; i < 6; ++i) k.push_back(kp(CameraId::Front, uniform(rng, -4, 4), uniform(rng, -5, 5)));
        const auto a = fit_boundary(k);
        std::reverse(k.begin(), k.end());
        const auto b = fit_boundary(k);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].side == b[i].side);
            CHECK(a[i].x_b == b[i].x_b);
            CHECK((a[i].x_b < 0) == (a[i].side == Side::Left));
            CHECK_FALSE(a[i].support.empty());
            for (const auto& s : a[i].support) CHECK(std::abs(a[i].x_b) <= std::abs(s.ground.x));
        }
    }
}

TEST_CASE("points on the ego axis belong to neither side") {
    const std::vector<VehicleKeypoint> k{kp(CameraId::Front, 0.0, 4.0)};
    CHECK(fit_boundary(k).empty());
}

TEST_CASE("landmark form") {
    const BevSpec bev;
    const LineLandmark lm = to_landmark({Side::Right, 1.0, {}}, bev);
    CHECK(lm.kind == LandmarkKind::Boundary);
    CHECK(lm.beta == 0.0);
    CHECK(lm.theta == doctest::Approx(bev.ego_col() + 50.0));
}

TEST_CASE("low scores and points beyond the horizon are dropped") {
    const CameraRig rig = default_rig();
    const std::vector<DetectionBox> boxes{{CameraId::Front, 600, 600, 80, 60, 0.3},
                                          {CameraId::Front, 600, 600, 80, 60, 0.9},
                                          {CameraId::Front, 600, -6000, 80, 60, 0.9}};
    const auto r = keypoints_from_boxes(boxes, rig);
    CHECK(r.keypoints.size() == 1);
    CHECK(r.dropped == 2);
}

TEST_CASE("zero-noise keypoints land on the vehicles and boundaries on the truth") {
    const CameraRig rig = default_rig();
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        const SceneTruth s = generate_scene(seed, "straight_aisle");
        for (int f = 0; f < s.frame_count(); f += 25) {
            const auto obs = render_frame(s, f, rig, NoiseSpec::none(), seed);
            const auto kps = keypoints_from_boxes(obs.detections, rig);
            for (const auto& k : kps.keypoints) {
                double best = 1e9;
                for (const auto& v : s.vehicles) {
                    const GroundPoint m = near_side_midpoint(v, s.trajectory[f].pose);
                    best = std::min(best, std::hypot(m.x - k.ground.x, m.y - k.ground.y));
                }
                CHECK(best < 0.05);
            }
            const auto got = detect_boundaries(obs.detections, rig).landmarks;
            std::vector<LineLandmark> want;
            for (const auto& t : truth_landmarks(s, f, rig))
                if (t.kind == LandmarkKind::Boundary) want.push_back(t);
            REQUIRE(got.size() == want.size());
            for (const auto& w : want) {
                double best = 1e9;
                for (const auto& g : got) best = std::min(best, std::abs(g.theta - w.theta) * rig.bev.scale);
                CHECK(best < 0.1);
            }
        }
    }
}

}  // TEST_SUITE
