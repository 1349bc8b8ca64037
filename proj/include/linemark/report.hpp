#pragma once

// Report files: metrics, error curves, timing, content hashes.

#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "linemark/eval.hpp"

namespace linemark {

std::string sha256_hex(std::string_view bytes);
/// Throws DataError when the file cannot be read.
std::string sha256_file(const std::string& path);

nlohmann::json metrics_to_json(const Metrics& m);
/// One row per kind plus "all": kind,predictions,truths,matched,fd,md,accuracy.
std::string metrics_csv(const Metrics& m);

struct CurveSeries {
    std::string name;
    std::vector<FrameError> curve;
};

/// frame followed by <name>_dc0,<name>_dc1 for each series (equal lengths).
std::string error_curves_csv(std::span<const CurveSeries> series);
/// Two stacked panels (dc0, dc1) with one polyline per series.
std::string error_curves_svg(std::span<const CurveSeries> series);

nlohmann::json timing_to_json(const TimingReport& r);
std::string timing_csv(std::span<const StageTimes> frames);

/// Writes `content` to `path`, throwing DataError with the path on failure.
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace linemark
