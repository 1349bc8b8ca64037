#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "linemark/errors.hpp"
#include "linemark/eval.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace linemark;
using testsupport::uniform;

namespace {

LineLandmark lm(LandmarkKind kind, double theta, double beta = 0.0) {
    LineLandmark l;
    l.kind = kind;
    l.theta = theta;
    l.beta = beta;
    return l;
}

// Up to 6 truths per frame whose tolerance windows cannot overlap, and
// predictions that are perturbed copies, duplicates or spurious lines.
void random_frame(testsupport::Rng& rng, FrameLandmarks& preds, FrameLandmarks& truth) {
    const auto kind = static_cast<LandmarkKind>(testsupport::integer(rng, 0, 3));
    const int nt = testsupport::integer(rng, 0, 6);
    for (int i = 0; i < nt; ++i) truth.push_back(lm(kind, 30.0 + 70.0 * i + uniform(rng, -5, 5), uniform(rng, -0.1, 0.1)));
    for (const auto& t : truth) {
        const int copies = testsupport::integer(rng, 0, 2);
        for (int c = 0; c < copies; ++c) {
            preds.push_back(lm(kind, t.theta + uniform(rng, -8, 8), t.beta + uniform(rng, -0.08, 0.08)));
        }
    }
    const int spurious = testsupport::integer(rng, 0, 6 - std::min<int>(6, static_cast<int>(preds.size())));
    for (int i = 0; i < spurious; ++i) preds.push_back(lm(kind, uniform(rng, 0, 480), uniform(rng, -0.1, 0.1)));
    std::shuffle(preds.begin(), preds.end(), rng);
    while (preds.size() > 6) preds.pop_back();
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("perfect predictions") {
    const std::vector<FrameLandmarks> t{{lm(LandmarkKind::Lane, 100, 0.01), lm(LandmarkKind::Boundary, 300)},
                                        {lm(LandmarkKind::Median, 50)}};
    const Metrics m = match_and_score(t, t, {}, 0.02);
    for (const auto& k : m.kinds) {
        CHECK(k.fd() == 0.0);
        CHECK(k.md() == 0.0);
        CHECK(k.accuracy() == 1.0);
    }
    for (const auto& f : m.frames) {
        CHECK(f.dc0 == 0.0);
        CHECK(f.dc1 == 0.0);
    }
}

TEST_CASE("accuracy identity and the lane line example") {
    CHECK(accuracy(0.0017, 0.0169) == doctest::Approx(0.9814).epsilon(1e-12));
    KindScore k;
    k.predictions = 99830000;
    k.truths = 98310000;
    k.matched = 98142873;
    CHECK(k.fd() == doctest::Approx(0.0169).epsilon(1e-12));
    CHECK(k.md() == doctest::Approx(0.0017).epsilon(1e-12));
    CHECK(std::abs(k.accuracy() - 0.9814) < 1e-12);
    CHECK(k.accuracy() == 1.0 - k.md() - k.fd());
}

TEST_CASE("tolerances") {
    const MatchSpec spec;
    CHECK(within_tolerance(lm(LandmarkKind::Lane, 100, 0.0), lm(LandmarkKind::Lane, 105, 0.05), spec, 0.02));
    CHECK_FALSE(within_tolerance(lm(LandmarkKind::Lane, 100, 0.0), lm(LandmarkKind::Lane, 105.1), spec, 0.02));
    CHECK_FALSE(within_tolerance(lm(LandmarkKind::Lane, 100, 0.0), lm(LandmarkKind::Lane, 100, 0.06), spec, 0.02));
    CHECK_FALSE(within_tolerance(lm(LandmarkKind::Lane, 100), lm(LandmarkKind::Median, 100), spec, 0.02));
    // boundary: 7 cells at 0.02 m is 0.14 m
    CHECK(within_tolerance(lm(LandmarkKind::Boundary, 100), lm(LandmarkKind::Boundary, 107), spec, 0.02));
    CHECK_FALSE(within_tolerance(lm(LandmarkKind::Boundary, 100), lm(LandmarkKind::Boundary, 108), spec, 0.02));
    MatchSpec bad;
    bad.beta = 0;
    CHECK_FALSE(bad.violations().empty());
}

TEST_CASE("misaligned sequences raise") {
    const std::vector<FrameLandmarks> a(3), b(4);
    CHECK_THROWS_AS(match_and_score(a, b, {}, 0.02), FrameMisalignment);
    CHECK_THROWS_AS(error_curve(a, b), FrameMisalignment);
}

TEST_CASE("greedy matching equals exhaustive matching on small frames") {
    testsupport::Rng rng(77);
    const MatchSpec spec;
    for (int t = 0; t < 3000; ++t) {
        FrameLandmarks p, tr;
        random_frame(rng, p, tr);
        const auto pairs = greedy_match(p, tr, spec, 0.02);
        const int best = oracle::max_matching(static_cast<int>(p.size()), static_cast<int>(tr.size()),
                                              [&](int i, int j) { return within_tolerance(p[i], tr[j], spec, 0.02); });
        CHECK(static_cast<int>(pairs.size()) == best);
        const Metrics m = match_and_score(std::vector<FrameLandmarks>{p}, std::vector<FrameLandmarks>{tr}, spec, 0.02);
        const KindScore k = m.total();
        const double fd = p.empty() ? 0.0 : double(p.size() - best) / double(p.size());
        const double md = tr.empty() ? 0.0 : double(tr.size() - best) / double(tr.size());
        CHECK(k.fd() == fd);
        CHECK(k.md() == md);
    }
}

TEST_CASE("scoring ignores list order") {
    testsupport::Rng rng(5);
    std::vector<FrameLandmarks> p(50), tr(50);
    for (int f = 0; f < 50; ++f) random_frame(rng, p[f], tr[f]);
    const Metrics a = match_and_score(p, tr, {}, 0.02);
    for (auto& f : p) std::reverse(f.begin(), f.end());
    for (auto& f : tr) std::shuffle(f.begin(), f.end(), rng);
    const Metrics b = match_and_score(p, tr, {}, 0.02);
    for (int k = 0; k < 4; ++k) {
        CHECK(a.kinds[k].matched == b.kinds[k].matched);
        CHECK(a.kinds[k].fd() == b.kinds[k].fd());
        CHECK(a.kinds[k].md() == b.kinds[k].md());
    }
}

TEST_CASE("wider tolerances never raise FD or MD") {
    testsupport::Rng rng(6);
    std::vector<FrameLandmarks> p(200), tr(200);
    for (int f = 0; f < 200; ++f) random_frame(rng, p[f], tr[f]);
    double fd = 2.0, md = 2.0;
    for (double scale : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        MatchSpec spec;
        spec.theta_cells *= scale;
        spec.beta *= scale;
        spec.boundary_m *= scale;
        const KindScore k = match_and_score(p, tr, spec, 0.02).total();
        CHECK(k.fd() <= fd);
        CHECK(k.md() <= md);
        fd = k.fd();
        md = k.md();
    }
}

TEST_CASE("error curve pairs each prediction with its nearest truth") {
    const std::vector<FrameLandmarks> p{{lm(LandmarkKind::Lane, 110, 0.02), lm(LandmarkKind::Median, 40)}, {}};
    const std::vector<FrameLandmarks> t{{lm(LandmarkKind::Lane, 100, 0.0), lm(LandmarkKind::Lane, 200),
                                         lm(LandmarkKind::Median, 41)},
                                        {lm(LandmarkKind::Lane, 100)}};
    const auto c = error_curve(p, t);
    REQUIRE(c.size() == 2);
    CHECK(c[0].pairs == 2);
    CHECK(c[0].dc0 == doctest::Approx(5.5));
    CHECK(c[0].dc1 == doctest::Approx(0.01));
    CHECK(c[1].pairs == 0);
    const auto s = dc0_stats(c);
    CHECK(s.max == doctest::Approx(5.5));
}

TEST_CASE("series statistics") {
    std::vector<FrameError> c{{0, 1, 1.0, 0.1}, {1, 1, 3.0, 0.3}};
    const auto s = dc0_stats(c);
    CHECK(s.max == 3.0);
    CHECK(s.mean == 2.0);
    CHECK(s.variance == 1.0);
    CHECK(dc1_stats(c).max == 0.3);
}

TEST_CASE("timing report") {
    std::vector<StageTimes> zeros(5);
    const auto z = timing_report(zeros);
    CHECK(z.total.mean == 0.0);
    CHECK(z.total.p95 == 0.0);
    std::vector<StageTimes> f(20);
    for (int i = 0; i < 20; ++i) {
        f[i].stage[static_cast<int>(Stage::Warp)] = i + 1.0;
        f[i].stage[static_cast<int>(Stage::Linefit)] = 0.5;
        f[i].total = i + 1.6;
    }
    const auto r = timing_report(f);
    CHECK(r.frames == 20);
    CHECK(r.stage[static_cast<int>(Stage::Warp)].mean == doctest::Approx(10.5));
    CHECK(r.stage[static_cast<int>(Stage::Warp)].p95 == doctest::Approx(19.0));
    CHECK(r.total.mean == doctest::Approx(11.1));
    CHECK(r.max_accounting_error == doctest::Approx(0.1));
    CHECK(r.max_accounting_error < 1.0);
}

TEST_CASE("kind names round trip") {
    for (auto k : kLandmarkKinds) CHECK(landmark_kind_from_string(to_string(k)) == k);
    CHECK_FALSE(landmark_kind_from_string("curb"));
}

}  // TEST_SUITE
