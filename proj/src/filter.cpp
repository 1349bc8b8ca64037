#include "linemark/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "linemark/errors.hpp"

namespace linemark {

std::vector<std::string> FilterConfig::violations() const {
    std::vector<std::string> v;
    if (!(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0)) v.emplace_back("lambda weights must be >= 0");
    if (!(sigma_max > 0.0)) v.emplace_back("sigma_max must be > 0");
    for (double q : process_noise) {
        if (!(q > 0.0)) v.emplace_back("process_noise entries must be > 0");
    }
    for (double r : measurement_noise) {
        if (!(r > 0.0)) v.emplace_back("measurement_noise entries must be > 0");
    }
    if (max_misses < 0) v.emplace_back("max_misses must be >= 0");
    if (confirm_hits < 1) v.emplace_back("confirm_hits must be >= 1");
    return v;
}

namespace {

Eigen::Vector4d as_vector(const LineLandmark& lm) { return {lm.cx, lm.cy, lm.theta, lm.beta}; }

Eigen::Matrix4d diag(const std::array<double, 4>& d) { return Eigen::Vector4d(d[0], d[1], d[2], d[3]).asDiagonal(); }

}  // namespace

TrackState TrackState::from_measurement(const LineLandmark& meas, const FilterConfig& cfg, int id) {
    TrackState t;
    t.kind = meas.kind;
    t.s = as_vector(meas);
    t.P = diag(cfg.measurement_noise);
    t.id = id;
    t.confidence = meas.confidence;
    return t;
}

LineLandmark TrackState::landmark() const {
    LineLandmark lm;
    lm.kind = kind;
    lm.cx = s[0];
    lm.cy = s[1];
    lm.theta = s[2];
    lm.beta = s[3];
    lm.phi = std::atan(s[3]);
    lm.confidence = confidence;
    return lm;
}

TrackState predict(const TrackState& track, const EgoDelta& delta, const BevSpec& bev, const FilterConfig& cfg) {
    const double c = std::cos(delta.dyaw);
    const double s = std::sin(delta.dyaw);
    const double ex = bev.ego_col();
    const double tx = delta.dx / bev.scale;
    const double ty = delta.dy / bev.scale;
    // previous-ego -> current-ego in cells: q' = R^T (q - t)
    auto move = [&](double x, double y) -> Eigen::Vector2d {
        const double px = x - tx, py = y - ty;
        return {c * px + s * py, -s * px + c * py};
    };

    // Boundary lines are defined parallel to the heading, so they keep beta = 0.
    const bool heading_locked = track.kind == LandmarkKind::Boundary;
    const double beta = track.s[3];
    const double beta_p = heading_locked ? 0.0 : (beta * c + s) / (c - beta * s);
    const Eigen::Vector2d centre = move(track.s[0] - ex, track.s[1]);
    const Eigen::Vector2d anchor = move(track.s[2] - ex, 0.0);

    TrackState out = track;
    out.s[0] = ex + centre.x();
    out.s[1] = centre.y();
    out.s[2] = ex + anchor.x() - beta_p * anchor.y();
    out.s[3] = beta_p;

    const double dbeta = heading_locked ? 0.0 : (1.0 + beta_p * beta_p) / (1.0 + beta * beta);
    Eigen::Matrix4d F = Eigen::Matrix4d::Zero();
    F(0, 0) = c;
    F(0, 1) = s;
    F(1, 0) = -s;
    F(1, 1) = c;
    F(2, 2) = c + beta_p * s;
    F(2, 3) = -anchor.y() * dbeta;
    F(3, 3) = dbeta;
    Eigen::Matrix4d P = F * track.P * F.transpose() + diag(cfg.process_noise);
    out.P = 0.5 * (P + P.transpose());
    return out;
}

double inconsistency(const TrackState& pred, const LineLandmark& meas, const FilterConfig& cfg) {
    if (pred.kind != meas.kind) {
        throw KindMismatch("cannot compare " + std::string(to_string(pred.kind)) + " track with " +
                           std::string(to_string(meas.kind)) + " measurement");
    }
    const double dc = std::hypot(meas.cx - pred.s[0], meas.cy - pred.s[1]);
    return cfg.lambda1 * dc + cfg.lambda2 * std::abs(meas.theta - pred.s[2]) +
           cfg.lambda3 * std::abs(meas.beta - pred.s[3]);
}

TrackState slide_to(const TrackState& pred, const LineLandmark& meas) {
    const Eigen::Vector2d d = Eigen::Vector2d(pred.s[3], 1.0).normalized();
    const double along = d.dot(Eigen::Vector2d(meas.cx - pred.s[0], meas.cy - pred.s[1]));
    TrackState out = pred;
    out.s.head<2>() += along * d;
    return out;
}

TrackState update(const TrackState& pred, const LineLandmark& meas, const FilterConfig& cfg) {
    TrackState out = pred;
    const Eigen::Matrix4d R = diag(cfg.measurement_noise);
    const Eigen::Matrix4d S = pred.P + R;
    const Eigen::Matrix4d K = S.ldlt().solve(pred.P).transpose();  // P S^-1, both symmetric
    out.s = pred.s + K * (as_vector(meas) - pred.s);
    const Eigen::Matrix4d I_K = Eigen::Matrix4d::Identity() - K;
    const Eigen::Matrix4d P = I_K * pred.P * I_K.transpose() + K * R * K.transpose();
    out.P = 0.5 * (P + P.transpose());
    out.confidence = meas.confidence;
    return out;
}

StepResult TrackSet::step(std::span<const LineLandmark> detections, const EgoDelta& delta, const BevSpec& bev) {
    for (TrackState& t : tracks_) t = predict(t, delta, bev, cfg_);

    // greedy one-to-one association per kind, nearest theta first
    struct Pair {
        double dtheta;
        std::size_t track;
        std::size_t det;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        for (std::size_t j = 0; j < detections.size(); ++j) {
            if (tracks_[i].kind != detections[j].kind) continue;
            pairs.push_back({std::abs(tracks_[i].s[2] - detections[j].theta), i, j});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dtheta < b.dtheta; });
    std::vector<int> det_track(detections.size(), -1);
    std::vector<bool> track_used(tracks_.size(), false);
    for (const Pair& p : pairs) {
        if (track_used[p.track] || det_track[p.det] >= 0) continue;
        track_used[p.track] = true;
        det_track[p.det] = static_cast<int>(p.track);
    }

    StepResult out;
    std::vector<bool> matched(tracks_.size(), false);
    for (std::size_t j = 0; j < detections.size(); ++j) {
        const LineLandmark& meas = detections[j];
        FilterRecord rec;
        rec.kind = meas.kind;
        rec.raw = meas;
        rec.detection = static_cast<int>(j);
        if (det_track[j] < 0) continue;  // spawned below, after existing tracks are settled
        TrackState& t = tracks_[static_cast<std::size_t>(det_track[j])];
        matched[static_cast<std::size_t>(det_track[j])] = true;
        rec.track_id = t.id;
        const TrackState pred = cfg_.slide_center ? slide_to(t, meas) : t;
        rec.sigma = inconsistency(pred, meas, cfg_);
        if (rec.sigma <= cfg_.sigma_max) {
            t = pred;
            if (cfg_.gate_only) {
                const int id = t.id, age = t.age, hits = t.hits;
                t = TrackState::from_measurement(meas, cfg_, id);
                t.age = age;
                t.hits = hits;
            } else {
                t = update(t, meas, cfg_);
            }
            ++t.hits;
            t.misses = 0;
            rec.accepted = true;
            out.accepted.push_back(meas);
        } else if (t.hits < cfg_.confirm_hits) {
            const int id = t.id, age = t.age;
            t = TrackState::from_measurement(meas, cfg_, id);
            t.age = age;
            rec.accepted = true;
            rec.spawned = true;
            out.accepted.push_back(meas);
        } else {
            ++t.misses;
            out.rejected.push_back(meas);
        }
        ++t.age;
        rec.filtered = t.landmark();
        out.emitted.push_back(rec.filtered);
        out.records.push_back(rec);
    }
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (!matched[i]) {
            ++tracks_[i].misses;
            ++tracks_[i].age;
        }
    }
    std::erase_if(tracks_, [&](const TrackState& t) { return t.misses > cfg_.max_misses; });

    for (std::size_t j = 0; j < detections.size(); ++j) {
        if (det_track[j] >= 0) continue;
        const LineLandmark& meas = detections[j];
        tracks_.push_back(TrackState::from_measurement(meas, cfg_, next_id_++));
        FilterRecord rec;
        rec.kind = meas.kind;
        rec.raw = meas;
        rec.detection = static_cast<int>(j);
        rec.track_id = tracks_.back().id;
        rec.accepted = true;
        rec.spawned = true;
        rec.filtered = tracks_.back().landmark();
        out.accepted.push_back(meas);
        out.emitted.push_back(rec.filtered);
        out.records.push_back(rec);
    }
    return out;
}

}  // namespace linemark
