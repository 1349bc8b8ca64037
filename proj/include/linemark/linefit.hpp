#pragma once

// Scan-line vectorization of BEV segmentation masks.
//
// Horizontal scan rows at a fixed interval cut every stripe of a class into
// runs. The most frequent (even) number of run boundaries per row, c*, is
// taken as 2x the number of lines; rows with exactly c* boundaries supply
// one sample per line (the run midpoint) and each line is fitted by least
// squares as x = beta * y + theta.

#include <optional>
#include <span>
#include <vector>

#include "linemark/landmark.hpp"
#include "linemark/mask.hpp"

namespace linemark {

struct ScanRow {
    int row = 0;
    /// First and last cell of each maximal run, interleaved and sorted by column.
    std::vector<int> points;

    [[nodiscard]] int count() const { return static_cast<int>(points.size()); }
};

struct ScanProfile {
    std::vector<ScanRow> rows;  // every scanned row, including empty ones

    [[nodiscard]] int rows_with_foreground() const;
    [[nodiscard]] bool empty() const { return rows_with_foreground() == 0; }
};

struct ScanOptions {
    int interval = 8;
    /// Runs longer than this many cells are dropped; 0 keeps every run.
    int max_run = 0;
    /// Runs separated by at most this many cells are joined first (0 = off).
    int max_gap = 0;
    /// Runs shorter than this many cells are dropped after joining.
    int min_run = 1;
};

/// Throws std::invalid_argument for interval < 1.
ScanProfile scan(const LabelGrid& grid, MaskClass cls, const ScanOptions& opts = {});

/// Most frequent nonzero even count, ties toward the larger count; nullopt
/// when no scanned row has an even nonzero count.
std::optional<int> modal_count(const ScanProfile& profile);

struct LineSample {
    double x = 0.0;  // column coordinate
    double y = 0.0;  // line-frame y (cells forward of the ego row)
};

struct LineFit {
    double beta = 0.0;
    double theta = 0.0;
};

/// Least squares x = beta * y + theta. Throws DegenerateFit for < 2
/// samples or zero spread in y.
LineFit least_squares(std::span<const LineSample> samples);

/// One sample set per line: midpoints of the (2k-1, 2k) boundary pairs on
/// every row whose count equals `modal`.
std::vector<std::vector<LineSample>> line_samples(const ScanProfile& profile, int modal, const BevSpec& bev);

struct FitOptions {
    int min_samples = 5;
    /// When > 0, samples farther than this many cells from the fit are
    /// discarded and the line refitted until the sample set is stable.
    double trim_residual = 0.0;
};

/// Fits modal/2 lines. Throws DegenerateFit when lines have fewer than
/// `min_samples` samples or no row spread.
std::vector<LineLandmark> fit_lines(const ScanProfile& profile, int modal, LandmarkKind kind, const BevSpec& bev,
                                    const FitOptions& opts = {});

struct LinefitConfig {
    int scan_interval = 8;
    int max_run = 40;  // horizontal-stripe cap for the rotated parking scan
    int min_samples = 5;
    // mask clean-up, see ScanOptions / FitOptions
    int max_gap = 2;
    int min_run = 2;
    double trim_residual = 3.0;

    [[nodiscard]] ScanOptions scan_options(bool capped) const {
        return {scan_interval, capped ? max_run : 0, max_gap, min_run};
    }
    [[nodiscard]] FitOptions fit_options() const { return {min_samples, trim_residual}; }
};

/// Longitudinal parking lines. The parking class is resampled rotated so that
/// lines at angle `phi` become vertical, scanned with the run-length cap,
/// and the chosen midpoints are rotated back before fitting.
std::vector<LineLandmark> fit_longitudinal_parking(const SegMask& mask, double phi, const LinefitConfig& cfg = {});

/// Lane or median lines of a mask; empty when the class is absent or the fit
/// is degenerate.
std::vector<LineLandmark> fit_class(const SegMask& mask, MaskClass cls, const LinefitConfig& cfg = {});

struct FrameLines {
    std::vector<LineLandmark> lane;
    std::vector<LineLandmark> median;
    std::vector<LineLandmark> parking;
    double heading = 0.0;  // phi used for the parking rotation
    int degenerate_fits = 0;
};

/// Lane and median first, then parking lines rotated by their
/// confidence-weighted heading (0 when neither is found).
FrameLines extract_lines(const SegMask& mask, const LinefitConfig& cfg = {});

}  // namespace linemark
