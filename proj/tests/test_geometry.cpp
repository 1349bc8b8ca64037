#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "linemark/calibration.hpp"
#include "linemark/errors.hpp"
#include "linemark/geometry.hpp"
#include "linemark/simulator.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace linemark;
using testsupport::uniform;

namespace {

std::array<Correspondence, 4> pairs_through(const Homography& h, std::array<GroundPoint, 4> g) {
    std::array<Correspondence, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = {g[i], project(h, g[i])};
    return out;
}

double dist(ImagePoint a, ImagePoint b) { return std::hypot(a.u - b.u, a.v - b.v); }
double dist(GroundPoint a, GroundPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("unit square onto itself gives the identity") {
    const std::array<Correspondence, 4> p{{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 1}, {1, 1}}, {{0, 1}, {0, 1}}}};
    const auto g = solve_homography(p).coefficients();
    const std::array<double, 8> want{1, 0, 0, 0, 1, 0, 0, 0};
    for (int i = 0; i < 8; ++i) CHECK(g[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("shift by five columns gives the translation coefficients") {
    const std::array<Correspondence, 4> p{{{{0, 0}, {5, 0}}, {{1, 0}, {6, 0}}, {{1, 1}, {6, 1}}, {{0, 1}, {5, 1}}}};
    const auto g = solve_homography(p).coefficients();
    const std::array<double, 8> want{1, 0, 5, 0, 1, 0, 0, 0};
    for (int i = 0; i < 8; ++i) CHECK(std::abs(g[i] - want[i]) < 1e-12);
}

TEST_CASE("identity and translation maps") {
    const ImagePoint a = project(Homography::identity(), {3.0, 4.0});
    CHECK(a.u == 3.0);
    CHECK(a.v == 4.0);
    const GroundPoint b = ipm_to_ground(Homography::identity(), {3.0, 4.0});
    CHECK(b.x == doctest::Approx(3.0));
    CHECK(b.y == doctest::Approx(4.0));
    const Homography t = Homography::translation(5, 0);
    CHECK(project(t, {0, 0}).u == 5.0);
    CHECK(project(t, {0, 0}).v == 0.0);
    const GroundPoint c = ipm_to_ground(t, {5, 0});
    CHECK(std::abs(c.x) < 1e-12);
    CHECK(std::abs(c.y) < 1e-12);
}

TEST_CASE("solver agrees with Gaussian elimination of the same system") {
    testsupport::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cam = testsupport::random_camera(rng);
        const auto p = pairs_through(cam.h, {testsupport::ahead(cam, uniform(rng, 1, 3), uniform(rng, -2, -0.5)),
                                             testsupport::ahead(cam, uniform(rng, 1, 3), uniform(rng, 0.5, 2)),
                                             testsupport::ahead(cam, uniform(rng, 4, 8), uniform(rng, 0.5, 2)),
                                             testsupport::ahead(cam, uniform(rng, 4, 8), uniform(rng, -2, -0.5))});
        const auto got = solve_homography(p).coefficients();
        const auto want = oracle::homography_by_elimination(p);
        for (int i = 0; i < 8; ++i) {
            CHECK(std::abs(got[i] - want[i]) <= 1e-7 * std::max(1.0, std::abs(want[i])));
        }
        for (const auto& c : p) CHECK(dist(project(solve_homography(p), c.ground), c.image) <= 1e-9);
    }
}

TEST_CASE("collinear ground points are rejected") {
    const std::array<Correspondence, 4> p{{{{0, 0}, {0, 0}}, {{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}, {{0, 1}, {0, 1}}}};
    CHECK_THROWS_AS(solve_homography(p), DegenerateCorrespondences);
    const std::array<Correspondence, 4> same{{{{0, 0}, {0, 0}}, {{0, 0}, {1, 0}}, {{1, 1}, {1, 1}}, {{0, 1}, {0, 1}}}};
    CHECK_THROWS_AS(solve_homography(same), DegenerateCorrespondences);
}

TEST_CASE("points on the horizon raise") {
    Homography h({1, 0, 0, 0, 1, 0, 0, 1});  // denominator y + 1
    CHECK_THROWS_AS(project(h, {0.0, -1.0}), HorizonSingularity);
    CHECK_NOTHROW(project(h, {0.0, 0.0}));
}

TEST_CASE("ipm outside the working extent raises") {
    IpmOptions opts;
    opts.working_extent = 10.0;
    CHECK_THROWS_AS(ipm_to_ground(Homography::identity(), {11.0, 0.0}, opts), OutOfWorkingArea);
    CHECK_NOTHROW(ipm_to_ground(Homography::identity(), {9.0, -9.0}, opts));
}

TEST_CASE("ground -> image -> ground round trip on a 100 point grid") {
    testsupport::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cam = testsupport::random_camera(rng);
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                const GroundPoint g = testsupport::ahead(cam, 1.0 + 0.5 * i, -2.0 + 0.4 * j);
                CHECK(dist(ipm_to_ground(cam.h, project(cam.h, g)), g) < 1e-6);
            }
        }
    }
}

TEST_CASE("collinear ground points stay collinear in the image") {
    testsupport::Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cam = testsupport::random_camera(rng);
        const double lat = uniform(rng, -2, 2), slope = uniform(rng, -0.3, 0.3);
        std::vector<ImagePoint> q;
        for (int k = 0; k < 20; ++k) {
            const double d = 1.0 + 0.3 * k;
            q.push_back(project(cam.h, testsupport::ahead(cam, d, lat + slope * d)));
        }
        // residual against the chord through the end points
        const ImagePoint a = q.front(), b = q.back();
        const double len = dist(a, b);
        for (const auto& p : q) {
            const double r = std::abs((b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u)) / len;
            CHECK(r <= 1e-6);
        }
    }
}

TEST_CASE("ego motion round trips") {
    const GroundPose pose{1.0, 2.0, 0.3};
    const GroundPoint w{4.0, -1.0};
    const GroundPoint back = ego_to_world(pose, world_to_ego(pose, w));
    CHECK(back.x == doctest::Approx(w.x));
    CHECK(back.y == doctest::Approx(w.y));
    // straight ahead along the heading is +y in the ego frame
    const GroundPose a{0, 0, 0.2}, b{-std::sin(0.2), std::cos(0.2), 0.2};
    const EgoDelta d = relative_motion(a, b);
    CHECK(std::abs(d.dx) < 1e-12);
    CHECK(d.dy == doctest::Approx(1.0));
    CHECK(std::abs(d.dyaw) < 1e-12);
}

TEST_CASE("bev raster conventions") {
    const BevSpec bev;
    CHECK(bev.rows == 600);
    CHECK(bev.cols == 480);
    const GroundPoint top_left = bev.cell_to_ground(0, 0);
    CHECK(top_left.x < 0);
    CHECK(top_left.y > 0);
    const auto cell = bev.ground_to_cell(bev.cell_to_ground(17, 42));
    CHECK(cell.x() == doctest::Approx(17));
    CHECK(cell.y() == doctest::Approx(42));
    CHECK(line_frame_y(bev, bev.ego_row()) == 0.0);
}

TEST_CASE("lookup table interpolates bilinearly and reports coverage") {
    std::vector<GroundPoint> s;
    for (int v = 0; v < 3; ++v)
        for (int u = 0; u < 3; ++u) s.push_back({double(u), double(v) * 2});
    IpmTable t(10.0, 20.0, 5.0, 3, 3, s);
    const auto g = t.lookup({12.5, 27.5});
    REQUIRE(g);
    CHECK(g->x == doctest::Approx(0.5));
    CHECK(g->y == doctest::Approx(3.0));
    CHECK_FALSE(t.lookup({9.0, 20.0}));
    CHECK_FALSE(t.covers({30.1, 20.0}));
}

TEST_CASE("lookup table csv replaces the analytic inverse") {
    const auto dir = std::filesystem::temp_directory_path() / "linemark_ipm_table";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "t.csv").string();
    {
        std::ofstream f(path);
        f << "u,v,x,y\n";
        for (int v = 0; v < 2; ++v)
            for (int u = 0; u < 2; ++u) f << u * 10 << ',' << v * 10 << ',' << u + 100 << ',' << v + 200 << '\n';
    }
    Camera cam(CameraId::Front, Homography::identity(), 20, 20);
    cam.set_ipm_table(IpmTable::load_csv(path));
    const GroundPoint g = cam.to_ground({5, 5});
    CHECK(g.x == doctest::Approx(100.5));
    CHECK(g.y == doctest::Approx(200.5));
    std::filesystem::remove_all(dir);
}

TEST_CASE("rig files require exactly one of homography or correspondences") {
    const nlohmann::json both = {{"version", 1},
                                 {"cameras",
                                  {{"front",
                                    {{"homography", {1, 0, 0, 0, 1, 0, 0, 0}},
                                     {"correspondences", nlohmann::json::array()}}}}}};
    CHECK_THROWS_AS(parse_rig(both), ConfigError);
    const nlohmann::json neither = {{"version", 1}, {"cameras", {{"front", {{"width", 10}}}}}};
    CHECK_THROWS_AS(parse_rig(neither), ConfigError);
}

TEST_CASE("rig json round trip preserves every coefficient") {
    const CameraRig rig = default_rig();
    const CameraRig back = parse_rig(rig_to_json(rig));
    CHECK(back.bev == rig.bev);
    for (int i = 0; i < 4; ++i) {
        CHECK(back.cameras[i].homography().coefficients() == rig.cameras[i].homography().coefficients());
        CHECK(back.cameras[i].width() == rig.cameras[i].width());
    }
}

TEST_CASE("rig from correspondences reproduces the coefficient form") {
    const CameraRig rig = default_rig();
    nlohmann::json doc = rig_to_json(rig);
    const Camera& front = rig.camera(CameraId::Front);
    nlohmann::json corr = nlohmann::json::array();
    for (GroundPoint g : {GroundPoint{-1, 4}, GroundPoint{1, 4}, GroundPoint{1.5, 7}, GroundPoint{-1.5, 7}}) {
        const ImagePoint q = project(front.homography(), g);
        corr.push_back({{"ground", {g.x, g.y}}, {"image", {q.u, q.v}}});
    }
    doc["cameras"]["front"].erase("homography");
    doc["cameras"]["front"]["correspondences"] = corr;
    const CameraRig back = parse_rig(doc);
    for (GroundPoint g : {GroundPoint{0, 5}, GroundPoint{-0.7, 3.9}}) {
        CHECK(dist(project(back.camera(CameraId::Front).homography(), g), project(front.homography(), g)) < 1e-6);
    }
}

}  // TEST_SUITE
