#include "linemark/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linemark/errors.hpp"

namespace linemark {

std::string_view to_string(LandmarkKind kind) {
    switch (kind) {
        case LandmarkKind::Lane: return "lane";
        case LandmarkKind::Parking: return "parking";
        case LandmarkKind::Median: return "median";
        case LandmarkKind::Boundary: return "boundary";
    }
    return "unknown";
}

std::optional<LandmarkKind> landmark_kind_from_string(std::string_view name) {
    for (LandmarkKind k : kLandmarkKinds) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::vector<std::string> MatchSpec::violations() const {
    std::vector<std::string> v;
    if (!(theta_cells > 0.0 && beta > 0.0 && boundary_m > 0.0)) v.emplace_back("match tolerances must be > 0");
    return v;
}

bool within_tolerance(const LineLandmark& pred, const LineLandmark& truth, const MatchSpec& spec, double scale) {
    if (pred.kind != truth.kind) return false;
    const double dtheta = std::abs(pred.theta - truth.theta);
    if (pred.kind == LandmarkKind::Boundary) return dtheta * scale <= spec.boundary_m;
    return dtheta <= spec.theta_cells && std::abs(pred.beta - truth.beta) <= spec.beta;
}

KindScore& KindScore::operator+=(const KindScore& o) {
    predictions += o.predictions;
    truths += o.truths;
    matched += o.matched;
    sum_dtheta += o.sum_dtheta;
    sum_dbeta += o.sum_dbeta;
    return *this;
}

KindScore Metrics::total() const {
    KindScore t;
    for (const KindScore& k : kinds) t += k;
    return t;
}

std::vector<std::pair<int, int>> greedy_match(std::span<const LineLandmark> preds, std::span<const LineLandmark> truth,
                                              const MatchSpec& spec, double scale) {
    struct Cand {
        double dtheta, dbeta;
        int p, t;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(preds.size()); ++i) {
        for (int j = 0; j < static_cast<int>(truth.size()); ++j) {
            if (!within_tolerance(preds[i], truth[j], spec, scale)) continue;
            cands.push_back({std::abs(preds[i].theta - truth[j].theta), std::abs(preds[i].beta - truth[j].beta), i, j});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.dtheta != b.dtheta) return a.dtheta < b.dtheta;
        return a.dbeta < b.dbeta;
    });
    std::vector<bool> pu(preds.size(), false), tu(truth.size(), false);
    std::vector<std::pair<int, int>> out;
    for (const Cand& c : cands) {
        if (pu[c.p] || tu[c.t]) continue;
        pu[c.p] = tu[c.t] = true;
        out.emplace_back(c.p, c.t);
    }
    return out;
}

namespace {

std::vector<LineLandmark> of_kind(const FrameLandmarks& lms, LandmarkKind k) {
    std::vector<LineLandmark> out;
    for (const LineLandmark& l : lms) {
        if (l.kind == k) out.push_back(l);
    }
    return out;
}

void check_aligned(std::size_t a, std::size_t b) {
    if (a != b) {
        throw FrameMisalignment("prediction sequence has " + std::to_string(a) + " frames, truth has " +
                                std::to_string(b));
    }
}

}  // namespace

Metrics match_and_score(std::span<const FrameLandmarks> preds, std::span<const FrameLandmarks> truth,
                        const MatchSpec& spec, double scale) {
    check_aligned(preds.size(), truth.size());
    Metrics m;
    for (std::size_t f = 0; f < preds.size(); ++f) {
        FrameError fe;
        fe.frame = static_cast<int>(f);
        for (LandmarkKind k : kLandmarkKinds) {
            const auto p = of_kind(preds[f], k);
            const auto t = of_kind(truth[f], k);
            KindScore& ks = m.kinds[static_cast<std::size_t>(k)];
            ks.predictions += static_cast<long>(p.size());
            ks.truths += static_cast<long>(t.size());
            for (const auto& [i, j] : greedy_match(p, t, spec, scale)) {
                const double dt = std::abs(p[i].theta - t[j].theta);
                const double db = std::abs(p[i].beta - t[j].beta);
                ++ks.matched;
                ks.sum_dtheta += dt;
                ks.sum_dbeta += db;
                ++fe.pairs;
                fe.dc0 += dt;
                fe.dc1 += db;
            }
        }
        if (fe.pairs > 0) {
            fe.dc0 /= fe.pairs;
            fe.dc1 /= fe.pairs;
        }
        m.frames.push_back(fe);
    }
    return m;
}

std::vector<FrameError> error_curve(std::span<const FrameLandmarks> preds, std::span<const FrameLandmarks> truth) {
    check_aligned(preds.size(), truth.size());
    std::vector<FrameError> curve;
    for (std::size_t f = 0; f < preds.size(); ++f) {
        FrameError fe;
        fe.frame = static_cast<int>(f);
        for (const LineLandmark& p : preds[f]) {
            const LineLandmark* best = nullptr;
            double best_d = std::numeric_limits<double>::infinity();
            for (const LineLandmark& t : truth[f]) {
                if (t.kind != p.kind) continue;
                const double d = std::abs(p.theta - t.theta);
                if (d < best_d) {
                    best_d = d;
                    best = &t;
                }
            }
            if (!best) continue;
            ++fe.pairs;
            fe.dc0 += best_d;
            fe.dc1 += std::abs(p.beta - best->beta);
        }
        if (fe.pairs > 0) {
            fe.dc0 /= fe.pairs;
            fe.dc1 /= fe.pairs;
        }
        curve.push_back(fe);
    }
    return curve;
}

namespace {

template <typename Get>
SeriesStats series_stats(std::span<const FrameError> curve, Get get) {
    SeriesStats s;
    if (curve.empty()) return s;
    for (const FrameError& e : curve) {
        s.max = std::max(s.max, get(e));
        s.mean += get(e);
    }
    s.mean /= static_cast<double>(curve.size());
    for (const FrameError& e : curve) s.variance += (get(e) - s.mean) * (get(e) - s.mean);
    s.variance /= static_cast<double>(curve.size());
    return s;
}

LatencyStat latency(std::vector<double> v) {
    LatencyStat s;
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    std::sort(v.begin(), v.end());
    // nearest rank
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
    s.p95 = v[std::max<std::size_t>(rank, 1) - 1];
    return s;
}

}  // namespace

SeriesStats dc0_stats(std::span<const FrameError> curve) {
    return series_stats(curve, [](const FrameError& e) { return e.dc0; });
}

SeriesStats dc1_stats(std::span<const FrameError> curve) {
    return series_stats(curve, [](const FrameError& e) { return e.dc1; });
}

double StageTimes::stage_sum() const {
    double s = 0.0;
    for (double x : stage) s += x;
    return s;
}

TimingReport timing_report(std::span<const StageTimes> frames) {
    TimingReport r;
    r.frames = static_cast<int>(frames.size());
    std::vector<double> col(frames.size());
    for (std::size_t k = 0; k < kStageCount; ++k) {
        for (std::size_t f = 0; f < frames.size(); ++f) col[f] = frames[f].stage[k];
        r.stage[k] = latency(col);
    }
    for (std::size_t f = 0; f < frames.size(); ++f) col[f] = frames[f].total;
    r.total = latency(col);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        col[f] = frames[f].stage_sum();
        r.max_accounting_error = std::max(r.max_accounting_error, std::abs(frames[f].total - col[f]));
    }
    r.stage_sum = latency(col);
    return r;
}

}  // namespace linemark
