#include "linemark/linefit.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "linemark/errors.hpp"

namespace linemark {

int ScanProfile::rows_with_foreground() const {
    int n = 0;
    for (const ScanRow& r : rows) n += r.count() > 0;
    return n;
}

namespace {

ScanRow scan_row(std::span<const std::uint8_t> cells, int row, std::uint8_t cls, const ScanOptions& opts) {
    std::vector<std::pair<int, int>> runs;
    const int n = static_cast<int>(cells.size());
    int c = 0;
    while (c < n) {
        if (cells[c] != cls) {
            ++c;
            continue;
        }
        const int start = c;
        while (c < n && cells[c] == cls) ++c;
        if (!runs.empty() && start - runs.back().second - 1 <= opts.max_gap) {
            runs.back().second = c - 1;
        } else {
            runs.emplace_back(start, c - 1);
        }
    }
    ScanRow out{row, {}};
    for (const auto& [first, last] : runs) {
        const int len = last - first + 1;
        if (len < opts.min_run || (opts.max_run > 0 && len > opts.max_run)) continue;
        out.points.push_back(first);
        out.points.push_back(last);
    }
    return out;
}

int first_scan_row(int interval) { return interval / 2; }

}  // namespace

ScanProfile scan(const LabelGrid& grid, MaskClass cls, const ScanOptions& opts) {
    if (opts.interval < 1) throw std::invalid_argument("scan interval must be >= 1");
    ScanProfile profile;
    const auto label = static_cast<std::uint8_t>(cls);
    for (int r = first_scan_row(opts.interval); r < grid.rows(); r += opts.interval) {
        profile.rows.push_back(scan_row(grid.row_span(r), r, label, opts));
    }
    return profile;
}

std::optional<int> modal_count(const ScanProfile& profile) {
    std::map<int, int> histogram;
    for (const ScanRow& r : profile.rows) {
        if (r.count() > 0 && r.count() % 2 == 0) histogram[r.count()]++;
    }
    std::optional<int> best;
    int best_n = 0;
    for (const auto& [count, n] : histogram) {  // ascending count, so >= prefers larger on ties
        if (n >= best_n) {
            best = count;
            best_n = n;
        }
    }
    return best;
}

LineFit least_squares(std::span<const LineSample> samples) {
    if (samples.size() < 2) throw DegenerateFit("line fit needs at least 2 samples");
    double mx = 0.0, my = 0.0;
    for (const auto& s : samples) {
        mx += s.x;
        my += s.y;
    }
    mx /= static_cast<double>(samples.size());
    my /= static_cast<double>(samples.size());
    double syy = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
        syy += (s.y - my) * (s.y - my);
        sxy += (s.y - my) * (s.x - mx);
    }
    if (!(syy > 0.0)) throw DegenerateFit("line samples have no spread along y");
    const double beta = sxy / syy;
    return {beta, mx - beta * my};
}

std::vector<std::vector<LineSample>> line_samples(const ScanProfile& profile, int modal, const BevSpec& bev) {
    if (modal < 2 || modal % 2 != 0) throw DegenerateFit("modal count must be even and >= 2");
    std::vector<std::vector<LineSample>> lines(static_cast<std::size_t>(modal / 2));
    for (const ScanRow& r : profile.rows) {
        if (r.count() != modal) continue;
        const double y = line_frame_y(bev, r.row);
        for (int k = 0; k < modal / 2; ++k) {
            const double x = 0.5 * (r.points[2 * k] + r.points[2 * k + 1]);
            lines[static_cast<std::size_t>(k)].push_back({x, y});
        }
    }
    return lines;
}

namespace {

LineLandmark make_landmark(LandmarkKind kind, std::span<const LineSample> samples, double confidence) {
    const LineFit fit = least_squares(samples);
    LineLandmark lm;
    lm.kind = kind;
    lm.beta = fit.beta;
    lm.theta = fit.theta;
    for (const auto& s : samples) {
        lm.cx += s.x;
        lm.cy += s.y;
    }
    lm.cx /= static_cast<double>(samples.size());
    lm.cy /= static_cast<double>(samples.size());
    lm.phi = std::atan(fit.beta);
    lm.confidence = confidence;
    return lm;
}

std::vector<LineSample> trimmed(std::vector<LineSample> samples, double limit) {
    for (;;) {
        const LineFit fit = least_squares(samples);
        std::vector<LineSample> kept;
        for (const LineSample& s : samples) {
            if (std::abs(s.x - (fit.beta * s.y + fit.theta)) <= limit) kept.push_back(s);
        }
        if (kept.size() == samples.size() || kept.size() < 2) return kept;
        samples = std::move(kept);
    }
}

std::vector<LineLandmark> fit_sample_sets(const std::vector<std::vector<LineSample>>& sets, LandmarkKind kind,
                                          int rows_with_foreground, const FitOptions& opts) {
    const int need = std::max(opts.min_samples, 2);
    std::vector<LineLandmark> out;
    for (const auto& raw : sets) {
        std::vector<LineSample> samples = raw;
        if (opts.trim_residual > 0.0 && static_cast<int>(samples.size()) >= need) {
            samples = trimmed(std::move(samples), opts.trim_residual);
        }
        if (static_cast<int>(samples.size()) < need) {
            throw DegenerateFit("line has " + std::to_string(samples.size()) + " samples, need " +
                                std::to_string(need));
        }
        const double confidence =
            rows_with_foreground > 0 ? static_cast<double>(samples.size()) / rows_with_foreground : 0.0;
        out.push_back(make_landmark(kind, samples, confidence));
    }
    return out;
}

}  // namespace

std::vector<LineLandmark> fit_lines(const ScanProfile& profile, int modal, LandmarkKind kind, const BevSpec& bev,
                                    const FitOptions& opts) {
    return fit_sample_sets(line_samples(profile, modal, bev), kind, profile.rows_with_foreground(), opts);
}

std::vector<LineLandmark> fit_longitudinal_parking(const SegMask& mask, double phi, const LinefitConfig& cfg) {
    const BevSpec& bev = mask.bev;
    const ScanOptions opts = cfg.scan_options(true);
    const auto parking = static_cast<std::uint8_t>(MaskClass::Parking);

    if (phi == 0.0) {
        const ScanProfile profile = scan(mask.labels, MaskClass::Parking, opts);
        const auto modal = modal_count(profile);
        if (!modal) return {};
        return fit_lines(profile, *modal, LandmarkKind::Parking, bev, cfg.fit_options());
    }

    // Resample only the rows that will be scanned.
    const double cc = bev.center_col();
    const double cr = bev.center_row();
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    LabelGrid rotated(mask.labels.rows(), mask.labels.cols());
    for (int r = first_scan_row(cfg.scan_interval); r < rotated.rows(); r += cfg.scan_interval) {
        const double qy = cr - r;
        for (int col = 0; col < rotated.cols(); ++col) {
            const double qx = col - cc;
            const double px = qx * c + qy * s;
            const double py = -qx * s + qy * c;
            const int src_c = static_cast<int>(std::floor(cc + px + 0.5));
            const int src_r = static_cast<int>(std::floor(cr - py + 0.5));
            if (mask.labels.contains(src_r, src_c) && mask.labels.at(src_r, src_c) == parking) {
                rotated.at(r, col) = parking;
            }
        }
    }
    const ScanProfile profile = scan(rotated, MaskClass::Parking, opts);
    const auto modal = modal_count(profile);
    if (!modal) return {};

    // Midpoints in the rotated frame, rotated back into the mask frame.
    auto sets = line_samples(profile, *modal, bev);
    for (auto& samples : sets) {
        for (auto& smp : samples) {
            const double row_rot = bev.ego_row() - smp.y;
            const double qx = smp.x - cc;
            const double qy = cr - row_rot;
            const double px = qx * c + qy * s;
            const double py = -qx * s + qy * c;
            smp.x = cc + px;
            smp.y = line_frame_y(bev, cr - py);
        }
    }
    return fit_sample_sets(sets, LandmarkKind::Parking, profile.rows_with_foreground(), cfg.fit_options());
}

std::vector<LineLandmark> fit_class(const SegMask& mask, MaskClass cls, const LinefitConfig& cfg) {
    const LandmarkKind kind = cls == MaskClass::Median ? LandmarkKind::Median
                              : cls == MaskClass::Parking ? LandmarkKind::Parking
                                                          : LandmarkKind::Lane;
    const ScanProfile profile = scan(mask.labels, cls, cfg.scan_options(false));
    const auto modal = modal_count(profile);
    if (!modal) return {};
    return fit_lines(profile, *modal, kind, mask.bev, cfg.fit_options());
}

FrameLines extract_lines(const SegMask& mask, const LinefitConfig& cfg) {
    FrameLines out;
    auto guarded = [&](auto&& fn) -> std::vector<LineLandmark> {
        try {
            return fn();
        } catch (const DegenerateFit&) {
            ++out.degenerate_fits;
            return {};
        }
    };
    out.lane = guarded([&] { return fit_class(mask, MaskClass::Lane, cfg); });
    out.median = guarded([&] { return fit_class(mask, MaskClass::Median, cfg); });

    double weight = 0.0, sum = 0.0;
    for (const auto* set : {&out.lane, &out.median}) {
        for (const LineLandmark& lm : *set) {
            weight += lm.confidence;
            sum += lm.confidence * lm.phi;
        }
    }
    out.heading = weight > 0.0 ? sum / weight : 0.0;
    out.parking = guarded([&] { return fit_longitudinal_parking(mask, out.heading, cfg); });
    return out;
}

}  // namespace linemark
