#pragma once

// Temporal consistency filter for line landmarks.
//
// Every landmark is world-fixed, so a track is carried between frames by the
// inverse ego motion, compared with the new measurement through the
// inconsistency
//
//     sigma = l1 * |c - c~| + l2 * |theta - theta~| + l3 * |beta - beta~|
//
// and either fused (sigma <= sigma_max) or rejected in favour of the
// prediction. State s = [cx, cy, theta, beta] in raster units.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "linemark/geometry.hpp"
#include "linemark/landmark.hpp"

namespace linemark {

struct FilterConfig {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 1.0;
    double sigma_max = 10.0;
    std::array<double, 4> process_noise = {0.5, 0.5, 0.5, 0.005};
    std::array<double, 4> measurement_noise = {1.0, 1.0, 1.0, 0.01};
    int max_misses = 10;
    /// A track with fewer accepted measurements than this is tentative: a
    /// measurement it would reject re-seeds it instead, so a track spawned
    /// from a spurious detection cannot lock out the real one.
    int confirm_hits = 3;
    /// Accepted measurements replace the state instead of being fused.
    bool gate_only = false;
    /// Before gating, move the predicted center along the predicted line to
    /// the point nearest the measured center. Lines run past the raster, so
    /// where along the line the sample mean falls is not a property of the
    /// landmark.
    bool slide_center = true;

    [[nodiscard]] std::vector<std::string> violations() const;
};

struct TrackState {
    LandmarkKind kind = LandmarkKind::Lane;
    Eigen::Vector4d s = Eigen::Vector4d::Zero();
    Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
    int age = 1;
    int misses = 0;
    int hits = 1;  // accepted measurements, including the seed
    int id = 0;
    double confidence = 1.0;

    static TrackState from_measurement(const LineLandmark& meas, const FilterConfig& cfg, int id = 0);
    [[nodiscard]] LineLandmark landmark() const;
};

/// Rigid transform of a track into the next ego frame plus process noise.
/// Boundary tracks keep beta = 0 (they are parallel to the heading by
/// definition). Only `bev.scale` and `bev.ego_col()` are used.
TrackState predict(const TrackState& track, const EgoDelta& delta, const BevSpec& bev, const FilterConfig& cfg);

/// Throws KindMismatch.
double inconsistency(const TrackState& pred, const LineLandmark& meas, const FilterConfig& cfg);

/// `pred` with its center moved along its own line to the foot of `meas`'s center.
TrackState slide_to(const TrackState& pred, const LineLandmark& meas);

/// Kalman update with an identity measurement model (Joseph form).
TrackState update(const TrackState& pred, const LineLandmark& meas, const FilterConfig& cfg);

struct FilterRecord {
    LandmarkKind kind = LandmarkKind::Lane;
    int track_id = 0;
    int detection = 0;  // index into the step's measurements
    bool accepted = false;
    bool spawned = false;  // new track, or tentative track re-seeded
    double sigma = 0.0;
    LineLandmark filtered;
    LineLandmark raw;
};

struct StepResult {
    std::vector<LineLandmark> accepted;  // raw measurements that passed the gate
    std::vector<LineLandmark> rejected;  // raw measurements that failed it
    std::vector<LineLandmark> emitted;   // filtered output of this frame
    std::vector<FilterRecord> records;   // one per measurement
};

class TrackSet {
public:
    explicit TrackSet(FilterConfig cfg = {}) : cfg_(std::move(cfg)) {}

    /// One frame: predict every track, associate per kind by nearest theta,
    /// gate, update or coast, spawn tracks for unassociated measurements and
    /// drop tracks with more than max_misses consecutive misses.
    StepResult step(std::span<const LineLandmark> detections, const EgoDelta& delta, const BevSpec& bev);

    [[nodiscard]] const std::vector<TrackState>& tracks() const { return tracks_; }
    [[nodiscard]] const FilterConfig& config() const { return cfg_; }

private:
    FilterConfig cfg_;
    std::vector<TrackState> tracks_;
    int next_id_ = 1;
};

}  // namespace linemark
