#pragma once

// Scoring: false / missed detection rates, parameter error curves and stage
// latency accounting.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linemark/landmark.hpp"

namespace linemark {

using FrameLandmarks = std::vector<LineLandmark>;

struct MatchSpec {
    double theta_cells = 5.0;
    double beta = 0.05;
    double boundary_m = 0.15;

    [[nodiscard]] std::vector<std::string> violations() const;
};

/// Whether a prediction may be matched to a truth of the same kind. Boundary
/// lines compare their lateral offsets in meters (cells * scale).
bool within_tolerance(const LineLandmark& pred, const LineLandmark& truth, const MatchSpec& spec, double scale);

/// 1 - md - fd.
inline double accuracy(double md, double fd) { return 1.0 - md - fd; }

struct KindScore {
    long predictions = 0;
    long truths = 0;
    long matched = 0;
    double sum_dtheta = 0.0;  // over matched pairs
    double sum_dbeta = 0.0;

    [[nodiscard]] double fd() const { return predictions ? double(predictions - matched) / double(predictions) : 0.0; }
    [[nodiscard]] double md() const { return truths ? double(truths - matched) / double(truths) : 0.0; }
    [[nodiscard]] double accuracy() const { return linemark::accuracy(md(), fd()); }
    KindScore& operator+=(const KindScore& o);
};

/// Mean absolute intercept (dc0, cells) and slope (dc1) error of one frame.
struct FrameError {
    int frame = 0;
    int pairs = 0;
    double dc0 = 0.0;
    double dc1 = 0.0;
};

struct Metrics {
    std::array<KindScore, 4> kinds{};  // indexed by LandmarkKind
    std::vector<FrameError> frames;    // over matched pairs of every kind

    [[nodiscard]] const KindScore& of(LandmarkKind k) const { return kinds[static_cast<std::size_t>(k)]; }
    [[nodiscard]] KindScore total() const;
};

/// Indices (pred, truth) of the greedy one-to-one matching of one frame and
/// kind: pairs within tolerance taken in ascending |dtheta|.
std::vector<std::pair<int, int>> greedy_match(std::span<const LineLandmark> preds, std::span<const LineLandmark> truth,
                                              const MatchSpec& spec, double scale);

/// Throws FrameMisalignment when the sequences differ in length.
Metrics match_and_score(std::span<const FrameLandmarks> preds, std::span<const FrameLandmarks> truth,
                        const MatchSpec& spec, double scale);

/// Untoleranced error curve: every prediction is paired with the nearest
/// (in theta) truth of its kind, so gross errors show up instead of turning
/// into false detections. Frames without predictions report zero pairs.
std::vector<FrameError> error_curve(std::span<const FrameLandmarks> preds, std::span<const FrameLandmarks> truth);

struct SeriesStats {
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;  // population
};
SeriesStats dc0_stats(std::span<const FrameError> curve);
SeriesStats dc1_stats(std::span<const FrameError> curve);

enum class Stage : std::uint8_t { Ingest, Warp, Linefit, Boundary, Filter, Emit };
inline constexpr std::size_t kStageCount = 6;
inline constexpr std::array<const char*, kStageCount> kStageNames = {"ingest", "warp",   "linefit",
                                                                     "boundary", "filter", "emit"};

/// Wall-clock milliseconds of one frame.
struct StageTimes {
    std::array<double, kStageCount> stage{};
    double total = 0.0;  // measured around the whole frame

    [[nodiscard]] double stage_sum() const;
};

struct LatencyStat {
    double mean = 0.0;
    double p95 = 0.0;
};

struct TimingReport {
    int frames = 0;
    std::array<LatencyStat, kStageCount> stage{};
    LatencyStat total;
    LatencyStat stage_sum;
    double max_accounting_error = 0.0;  // max over frames of |total - stage_sum|
};

TimingReport timing_report(std::span<const StageTimes> frames);

}  // namespace linemark
